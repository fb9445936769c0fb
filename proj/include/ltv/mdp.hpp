#pragma once

#include <string>
#include <vector>

namespace ltv {

// Enumerable (S, A, P, rbar, gamma) instance consumed by the exact DP oracle.
// P is row-stochastic over successors per (s,a); rbar is the expected immediate
// reward in [0,1] (binary per-step rewards in expectation).
struct TabularMDP {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> P;     // [s][a][s'] flattened
    std::vector<double> rbar;  // [s][a] flattened
    double gamma = 0.8;

    double p(int s, int a, int s2) const {
        return P[(static_cast<size_t>(s) * n_actions + a) * n_states + s2];
    }
    double& p(int s, int a, int s2) {
        return P[(static_cast<size_t>(s) * n_actions + a) * n_states + s2];
    }
    double r(int s, int a) const { return rbar[static_cast<size_t>(s) * n_actions + a]; }
    double& r(int s, int a) { return rbar[static_cast<size_t>(s) * n_actions + a]; }

    const double* row(int s, int a) const {
        return P.data() + (static_cast<size_t>(s) * n_actions + a) * n_states;
    }

    // throws std::invalid_argument on any invariant violation
    void validate() const;
};

TabularMDP make_mdp(int n_states, int n_actions, double gamma);

// Random instance: each (s,a) row gets `succ` nonzero successors with Dirichlet-ish
// weights; rewards uniform in [r_lo, r_hi]. Deterministic under seed.
TabularMDP random_mdp(uint64_t seed, int n_states, int n_actions, double gamma,
                      int succ = 0, double r_lo = 0.0, double r_hi = 1.0);

// CSV interchange: transitions as (s, a, s_next, prob) rows, rewards as (s, a, rbar) rows.
void save_mdp_csv(const TabularMDP& m, const std::string& transitions_path,
                  const std::string& rewards_path);
TabularMDP load_mdp_csv(const std::string& transitions_path, const std::string& rewards_path,
                        double gamma);

}  // namespace ltv
