#include "ltv/dp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ltv/csv.hpp"
#include "ltv/rng.hpp"

namespace ltv {

Mask full_mask(int n_states, int n_actions) {
    return Mask(static_cast<size_t>(n_states) * n_actions, 1);
}

static void check_shapes(const TabularMDP& m, const PolicyVec& mu, const Vec& v) {
    if (mu.size() != static_cast<size_t>(m.n_states) ||
        v.size() != static_cast<size_t>(m.n_states))
        throw std::invalid_argument("shape-mismatch: policy/value size != n_states");
    for (int s = 0; s < m.n_states; ++s)
        if (mu[s] < 0 || mu[s] >= m.n_actions)
            throw std::invalid_argument("shape-mismatch: action out of range");
}

Vec bellman_apply_serial(const TabularMDP& m, const PolicyVec& mu, const Vec& v) {
    check_shapes(m, mu, v);
    Vec out(m.n_states);
    for (int s = 0; s < m.n_states; ++s) {
        const double* row = m.row(s, mu[s]);
        double acc = 0.0;
        for (int s2 = 0; s2 < m.n_states; ++s2) acc += row[s2] * v[s2];
        out[s] = m.r(s, mu[s]) + m.gamma * acc;
    }
    return out;
}

Vec bellman_apply(const TabularMDP& m, const PolicyVec& mu, const Vec& v) {
    check_shapes(m, mu, v);
    Vec out(m.n_states);
#pragma omp parallel for schedule(static)
    for (int s = 0; s < m.n_states; ++s) {
        const double* row = m.row(s, mu[s]);
        double acc = 0.0;
        for (int s2 = 0; s2 < m.n_states; ++s2) acc += row[s2] * v[s2];
        out[s] = m.r(s, mu[s]) + m.gamma * acc;
    }
    return out;
}

Vec evaluate(const TabularMDP& m, const PolicyVec& mu, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("invalid-tol: tol must be positive");
    Vec v(m.n_states, 0.0);
    if (m.gamma == 0.0) return bellman_apply(m, mu, v);
    const double stop = tol * (1.0 - m.gamma) / m.gamma;
    for (;;) {
        Vec next = bellman_apply(m, mu, v);
        double delta = 0.0;
        for (int s = 0; s < m.n_states; ++s) delta = std::max(delta, std::abs(next[s] - v[s]));
        v = std::move(next);
        if (delta <= stop) return v;
    }
}

Vec evaluate_linear(const TabularMDP& m, const PolicyVec& mu) {
    check_shapes(m, mu, Vec(m.n_states, 0.0));
    const int n = m.n_states;
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b(n);
    for (int s = 0; s < n; ++s) {
        const double* row = m.row(s, mu[s]);
        for (int s2 = 0; s2 < n; ++s2) A(s, s2) -= m.gamma * row[s2];
        b(s) = m.r(s, mu[s]);
    }
    Eigen::VectorXd x = A.partialPivLu().solve(b);
    return Vec(x.data(), x.data() + n);
}

Vec q_from_v_serial(const TabularMDP& m, const Vec& v) {
    Vec q(static_cast<size_t>(m.n_states) * m.n_actions);
    for (int s = 0; s < m.n_states; ++s)
        for (int a = 0; a < m.n_actions; ++a) {
            const double* row = m.row(s, a);
            double acc = 0.0;
            for (int s2 = 0; s2 < m.n_states; ++s2) acc += row[s2] * v[s2];
            q[static_cast<size_t>(s) * m.n_actions + a] = m.r(s, a) + m.gamma * acc;
        }
    return q;
}

Vec q_from_v(const TabularMDP& m, const Vec& v) {
    Vec q(static_cast<size_t>(m.n_states) * m.n_actions);
    const int pairs = m.n_states * m.n_actions;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < pairs; ++i) {
        const int s = i / m.n_actions, a = i % m.n_actions;
        const double* row = m.row(s, a);
        double acc = 0.0;
        for (int s2 = 0; s2 < m.n_states; ++s2) acc += row[s2] * v[s2];
        q[i] = m.r(s, a) + m.gamma * acc;
    }
    return q;
}

int argmax_action(const double* score, int n_actions, const uint8_t* eligible) {
    int best = -1;
    for (int a = 0; a < n_actions; ++a) {
        if (eligible && !eligible[a]) continue;
        if (best < 0 || score[a] > score[best]) best = a;
    }
    if (best < 0) throw std::invalid_argument("empty-eligible-set");
    return best;
}

PolicyVec greedy_policy(const Vec& score_table, int n_states, int n_actions, const Mask& mask) {
    PolicyVec pi(n_states);
    for (int s = 0; s < n_states; ++s)
        pi[s] = argmax_action(score_table.data() + static_cast<size_t>(s) * n_actions, n_actions,
                              mask.data() + static_cast<size_t>(s) * n_actions);
    return pi;
}

// linear solve is machine-exact for the sizes the verifier sees; fall back to
// iteration beyond 200 states
static Vec eval_for_verify(const TabularMDP& m, const PolicyVec& mu, double tol) {
    return m.n_states <= 200 ? evaluate_linear(m, mu) : evaluate(m, mu, tol * 1e-3);
}

ImprovementReport verify_improvement(const TabularMDP& m, const Vec& f_table, const Mask& mask,
                                     double alpha, double tol, double strict_tol,
                                     double q_noise_sigma, uint64_t noise_seed) {
    if (f_table.size() != static_cast<size_t>(m.n_states) * m.n_actions ||
        mask.size() != f_table.size())
        throw std::invalid_argument("shape-mismatch: f/mask table");
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("invalid-alpha");
    // precondition: f unique over each state's eligible set
    for (int s = 0; s < m.n_states; ++s)
        for (int a = 0; a < m.n_actions; ++a)
            for (int b = a + 1; b < m.n_actions; ++b) {
                const size_t i = static_cast<size_t>(s) * m.n_actions;
                if (mask[i + a] && mask[i + b] && f_table[i + a] == f_table[i + b])
                    throw std::invalid_argument("nonunique-f: duplicate score in state " +
                                                std::to_string(s));
            }

    ImprovementReport rep;
    rep.pi_base = greedy_policy(f_table, m.n_states, m.n_actions, mask);
    rep.v_base = eval_for_verify(m, rep.pi_base, tol);
    rep.q_base = q_from_v(m, rep.v_base);

    Vec q_blend = rep.q_base;
    if (q_noise_sigma > 0.0) {
        rng::Stream st(noise_seed, 0x71706572);
        for (auto& q : q_blend)
            q += q_noise_sigma * (2.0 * st.next_u01() - 1.0);
    }
    Vec blend(q_blend.size());
    for (size_t i = 0; i < blend.size(); ++i)
        blend[i] = (1.0 - alpha) * f_table[i] + alpha * q_blend[i];
    rep.pi_mod = greedy_policy(blend, m.n_states, m.n_actions, mask);
    rep.v_mod = eval_for_verify(m, rep.pi_mod, tol);

    rep.improvement_margin.resize(m.n_states);
    rep.value_margin.resize(m.n_states);
    rep.margin_ok = rep.value_ok = rep.strict_ok = true;
    for (int s = 0; s < m.n_states; ++s) {
        const bool differ = rep.pi_mod[s] != rep.pi_base[s];
        rep.n_diff += differ;
        rep.improvement_margin[s] =
            rep.q_base[static_cast<size_t>(s) * m.n_actions + rep.pi_mod[s]] - rep.v_base[s];
        rep.value_margin[s] = rep.v_mod[s] - rep.v_base[s];
        if (rep.improvement_margin[s] < -tol) rep.margin_ok = false;
        if (rep.value_margin[s] < -tol) rep.value_ok = false;
        if (differ && rep.improvement_margin[s] <= strict_tol) rep.strict_ok = false;
    }
    return rep;
}

void save_margins_csv(const ImprovementReport& rep, const std::string& path) {
    csv::Writer w(path, "s,pi_base,pi_mod,v_base,v_mod,improvement_margin,value_margin");
    for (size_t s = 0; s < rep.pi_base.size(); ++s)
        w.row(s, rep.pi_base[s], rep.pi_mod[s], rep.v_base[s], rep.v_mod[s], rep.improvement_margin[s],
              rep.value_margin[s]);
}

PolicyIterationResult policy_iteration(const TabularMDP& m, const Mask& mask, double tol) {
    PolicyIterationResult res;
    // start from the lowest eligible action in each state
    res.pi.resize(m.n_states);
    for (int s = 0; s < m.n_states; ++s) {
        res.pi[s] = -1;
        for (int a = 0; a < m.n_actions && res.pi[s] < 0; ++a)
            if (mask[static_cast<size_t>(s) * m.n_actions + a]) res.pi[s] = a;
        if (res.pi[s] < 0) throw std::invalid_argument("empty-eligible-set");
    }
    for (;;) {
        ++res.iterations;
        res.v = eval_for_verify(m, res.pi, tol);
        Vec q = q_from_v(m, res.v);
        PolicyVec next = greedy_policy(q, m.n_states, m.n_actions, mask);
        // keep the incumbent unless strictly beaten (avoids tie cycling)
        bool changed = false;
        for (int s = 0; s < m.n_states; ++s) {
            const size_t i = static_cast<size_t>(s) * m.n_actions;
            if (next[s] != res.pi[s] && q[i + next[s]] > q[i + res.pi[s]] + tol) {
                res.pi[s] = next[s];
                changed = true;
            }
        }
        if (!changed) return res;
    }
}

Vec q_interaction_clock(const TabularMDP& m, const Vec& p_interact, const Vec& weights) {
    if (p_interact.size() != static_cast<size_t>(m.n_states))
        throw std::invalid_argument("invalid-config: p_interact shape");
    if (weights.size() != static_cast<size_t>(m.n_states) * m.n_actions)
        throw std::invalid_argument("invalid-config: weights shape");
    Vec g(m.n_states);
    for (int s = 0; s < m.n_states; ++s) {
        const double p = p_interact[s];
        if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("invalid-config: p_interact");
        g[s] = p * m.gamma / (1.0 - m.gamma * (1.0 - p));
    }
    // v(s) = E_{a~w(s)}[rbar(s,a)] + sum_s' E_{a~w(s)}[P(s'|s,a)] g(s') v(s')
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m.n_states, m.n_states);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m.n_states);
    for (int s = 0; s < m.n_states; ++s) {
        double wsum = 0.0;
        for (int a = 0; a < m.n_actions; ++a) {
            const double w = weights[static_cast<size_t>(s) * m.n_actions + a];
            if (w < 0.0) throw std::invalid_argument("invalid-config: negative weight");
            wsum += w;
            if (w == 0.0) continue;
            const double* row = m.row(s, a);
            for (int s2 = 0; s2 < m.n_states; ++s2) A(s, s2) -= w * row[s2] * g[s2];
            b(s) += w * m.r(s, a);
        }
        if (std::abs(wsum - 1.0) > 1e-9)
            throw std::invalid_argument("invalid-config: weights not stochastic");
    }
    const Eigen::VectorXd v = A.partialPivLu().solve(b);
    Vec q(static_cast<size_t>(m.n_states) * m.n_actions);
    for (int s = 0; s < m.n_states; ++s)
        for (int a = 0; a < m.n_actions; ++a) {
            const double* row = m.row(s, a);
            double acc = m.r(s, a);
            for (int s2 = 0; s2 < m.n_states; ++s2) acc += row[s2] * g[s2] * v(s2);
            q[static_cast<size_t>(s) * m.n_actions + a] = acc;
        }
    return q;
}

Vec q_interaction_clock(const TabularMDP& m, const Vec& p_interact, const PolicyVec& mu) {
    Vec w(static_cast<size_t>(m.n_states) * m.n_actions, 0.0);
    for (int s = 0; s < m.n_states; ++s) w[static_cast<size_t>(s) * m.n_actions + mu[s]] = 1.0;
    return q_interaction_clock(m, p_interact, w);
}

}  // namespace ltv
