#pragma once

#include <functional>
#include <vector>

// Action selection: the greedy base policy over f, the alpha-blended modified
// policy, and the contribution-fraction machinery that tunes alpha against a cap.
// All argmaxes break ties toward the lowest action id.

namespace ltv {

using ScoreFn = std::function<double(int)>;

enum class PolicyKind { kBase, kModified, kGreedyQ };

struct PolicyConfig {
    PolicyKind kind = PolicyKind::kModified;
    double alpha = 0.96;
};

// argmax_a f(a) over the candidate list
int base_select(const std::vector<int>& candidates, const ScoreFn& f);

// argmax_a (1-alpha) f(a) + alpha qhat(a)
int select(const std::vector<int>& candidates, const ScoreFn& f, const ScoreFn& qhat,
           double alpha);

int select(const std::vector<int>& candidates, const ScoreFn& f, const ScoreFn& qhat,
           const PolicyConfig& cfg);

// alpha*q / ((1-alpha) f + alpha*q); throws "zero-denominator" when both terms vanish
double contribution_fraction(double f, double q, double alpha);

// {0, 0.05, ..., 0.95, 0.96, 0.97, 0.98, 0.99, 1.0}
const std::vector<double>& alpha_grid();

struct TuneSample {
    int state = 0;
    std::vector<int> candidates;
};

// Largest grid alpha whose mean contribution fraction, taken at the action the
// candidate policy itself induces at each sampled state, stays within cap.
// Zero-denominator pairs are skipped. Returns 0 when nothing is feasible.
double tune_alpha(const std::vector<TuneSample>& sample,
                  const std::function<double(int, int)>& f,
                  const std::function<double(int, int)>& qhat, double cap);

// mean realized fraction of an already-chosen alpha on a sample (cap reporting)
double mean_contribution(const std::vector<TuneSample>& sample,
                         const std::function<double(int, int)>& f,
                         const std::function<double(int, int)>& qhat, double alpha);

}  // namespace ltv
