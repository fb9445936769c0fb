#pragma once

#include <string>
#include <vector>

#include "ltv/mdp.hpp"

// Exact dynamic programming on TabularMDP: the Bellman operator for a fixed
// deterministic policy, iterative policy evaluation with a contraction-derived
// stopping rule, Q-from-V, policy iteration, and the executable improvement
// verifier. Sweep kernels come in an OpenMP flavor (default entry points) and a
// serial reference; both produce bitwise-identical output (per-state work is
// independent, inner dot products are sequential in s').

namespace ltv {

using Vec = std::vector<double>;
using PolicyVec = std::vector<int>;     // action per state
using Mask = std::vector<uint8_t>;      // [s][a] eligibility, 1 = allowed

Mask full_mask(int n_states, int n_actions);

// T_mu V(s) = rbar(s, mu(s)) + gamma * sum_s' P(s'|s,mu(s)) V(s')
Vec bellman_apply(const TabularMDP& m, const PolicyVec& mu, const Vec& v);
Vec bellman_apply_serial(const TabularMDP& m, const PolicyVec& mu, const Vec& v);

// Iterates T_mu from 0 until ||V_{k+1} - V_k||_inf <= tol*(1-gamma)/gamma,
// which bounds ||V_k - V_mu||_inf by tol.
Vec evaluate(const TabularMDP& m, const PolicyVec& mu, double tol = 1e-9);

// Direct solve of (I - gamma * P_mu) V = rbar_mu (cross-check oracle).
Vec evaluate_linear(const TabularMDP& m, const PolicyVec& mu);

// Q(s,a) = rbar(s,a) + gamma * sum_s' P(s'|s,a) V(s')  for all pairs
Vec q_from_v(const TabularMDP& m, const Vec& v);
Vec q_from_v_serial(const TabularMDP& m, const Vec& v);

// argmax over eligible actions, lowest action id on ties
int argmax_action(const double* score, int n_actions, const uint8_t* eligible);
PolicyVec greedy_policy(const Vec& score_table, int n_states, int n_actions, const Mask& mask);

struct ImprovementReport {
    PolicyVec pi_base, pi_mod;
    Vec v_base, v_mod;
    Vec q_base;                // [s][a]
    Vec improvement_margin;    // Q_base(s, pi_mod(s)) - V_base(s)
    Vec value_margin;          // V_mod(s) - V_base(s)
    int n_diff = 0;            // states where the policies differ
    bool margin_ok = false;    // margins >= -tol everywhere, > tol where actions differ
    bool value_ok = false;     // V_mod >= V_base - tol everywhere
    bool strict_ok = false;    // improvement margin > strict_tol at every differing state
};

// Computes pi_base = argmax f, exact Q_base, pi_mod = argmax of the alpha-blend,
// V_mod, and the one-step improvement / value margins. f must take distinct
// values over each state's eligible set (throws "nonunique-f" otherwise).
// strict_tol gates the strict-improvement claim at differing states.
// q_noise_sigma > 0 perturbs the Q fed to the blend (robustness probe only; the
// margins are still measured against the exact Q).
ImprovementReport verify_improvement(const TabularMDP& m, const Vec& f_table, const Mask& mask,
                                     double alpha, double tol = 1e-9,
                                     double strict_tol = 1e-12, double q_noise_sigma = 0.0,
                                     uint64_t noise_seed = 0);

void save_margins_csv(const ImprovementReport& rep, const std::string& path);

struct PolicyIterationResult {
    PolicyVec pi;
    Vec v;
    int iterations = 0;
};

PolicyIterationResult policy_iteration(const TabularMDP& m, const Mask& mask, double tol = 1e-9);

// Exact Q on the interaction clock: after a transition lands in s' the user
// idles (state frozen) until the next interaction, a Geom(p(s')) gap tau >= 1,
// and the learner discounts by gamma^tau. Marginalizing the gap,
//   E[gamma^tau | s'] = p(s') gamma / (1 - gamma (1 - p(s'))),
// so Q(s,a) = rbar(s,a) + sum_s' P(s'|s,a) g(s') E_{a'~mu(s')} Q(s', a') — the
// fixed point the gamma^tau targets estimate on envs with frozen idle states.
// weights: row-stochastic [s][a] behavior policy.
Vec q_interaction_clock(const TabularMDP& m, const Vec& p_interact, const Vec& weights);
Vec q_interaction_clock(const TabularMDP& m, const Vec& p_interact, const PolicyVec& mu);

}  // namespace ltv
