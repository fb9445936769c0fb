#include "ltv/policy.hpp"

#include <stdexcept>

namespace ltv {

static int argmax_over(const std::vector<int>& candidates, const ScoreFn& score) {
    if (candidates.empty()) throw std::invalid_argument("empty-eligible-set");
    int best = candidates[0];
    double best_score = score(best);
    for (size_t i = 1; i < candidates.size(); ++i) {
        const double sc = score(candidates[i]);
        if (sc > best_score || (sc == best_score && candidates[i] < best)) {
            best = candidates[i];
            best_score = sc;
        }
    }
    return best;
}

int base_select(const std::vector<int>& candidates, const ScoreFn& f) {
    return argmax_over(candidates, f);
}

int select(const std::vector<int>& candidates, const ScoreFn& f, const ScoreFn& qhat,
           double alpha) {
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("invalid-alpha");
    return argmax_over(candidates,
                       [&](int a) { return (1.0 - alpha) * f(a) + alpha * qhat(a); });
}

int select(const std::vector<int>& candidates, const ScoreFn& f, const ScoreFn& qhat,
           const PolicyConfig& cfg) {
    switch (cfg.kind) {
        case PolicyKind::kBase: return select(candidates, f, qhat, 0.0);
        case PolicyKind::kGreedyQ: return select(candidates, f, qhat, 1.0);
        case PolicyKind::kModified: break;
    }
    return select(candidates, f, qhat, cfg.alpha);
}

double contribution_fraction(double f, double q, double alpha) {
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("invalid-alpha");
    const double qpart = alpha * q;
    const double denom = (1.0 - alpha) * f + qpart;
    if (denom == 0.0) throw std::invalid_argument("zero-denominator");
    return qpart / denom;
}

const std::vector<double>& alpha_grid() {
    // literal values, not i*0.05: accumulated products differ from the decimals
    // users write (19*0.05 != 0.95 in binary), and cap comparisons must see the
    // documented grid points exactly
    static const std::vector<double> grid = {
        0.0,  0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50, 0.55, 0.60,
        0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95, 0.96, 0.97, 0.98, 0.99, 1.0};
    return grid;
}

double mean_contribution(const std::vector<TuneSample>& sample,
                         const std::function<double(int, int)>& f,
                         const std::function<double(int, int)>& qhat, double alpha) {
    double total = 0.0;
    size_t n = 0;
    for (const auto& ts : sample) {
        const int a = select(
            ts.candidates, [&](int x) { return f(ts.state, x); },
            [&](int x) { return qhat(ts.state, x); }, alpha);
        const double fv = f(ts.state, a), qv = qhat(ts.state, a);
        if ((1.0 - alpha) * fv + alpha * qv == 0.0) continue;  // fraction undefined; skip
        total += contribution_fraction(fv, qv, alpha);
        ++n;
    }
    return n ? total / static_cast<double>(n) : 0.0;
}

double tune_alpha(const std::vector<TuneSample>& sample,
                  const std::function<double(int, int)>& f,
                  const std::function<double(int, int)>& qhat, double cap) {
    if (sample.empty()) throw std::invalid_argument("empty-sample");
    if (cap <= 0.0 || cap > 1.0) throw std::invalid_argument("invalid-cap");
    const auto& grid = alpha_grid();
    for (auto it = grid.rbegin(); it != grid.rend(); ++it)
        if (mean_contribution(sample, f, qhat, *it) <= cap) return *it;
    return 0.0;  // no-feasible-alpha (alpha=0 always has fraction 0, so in practice unreached)
}

}  // namespace ltv
