#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ltv/auction.hpp"
#include "ltv/mdp.hpp"
#include "ltv/pipeline.hpp"

// Simulated marketplace: a population of users whose states evolve in response
// to recommendations, emitting binary conversions. Every random draw is a pure
// hash of (seed, user_id, period, purpose), so trajectories are bit-reproducible,
// independent of population size, and — the property the experiment module
// leans on — two instances with the same seed expose identical randomness to
// both arms of a matched A/B comparison.

namespace ltv {

struct ItemSpec {
    int item_id = 1;                 // >= 1; 0 is NO_REC
    int bidder_id = 1;               // catalogs are disjoint: one owner per item
    double bid = 1.0;
    std::vector<double> conv_prob;   // per state
    std::vector<double> drift;       // per-state row-stochastic kernel, [s][s']
};

struct TabularEnvConfig {
    int n_states = 0;
    int n_users = 10000;
    uint64_t seed = 1;
    std::vector<ItemSpec> items;
    std::vector<double> norec_drift;       // kernel under NO_REC, [s][s']
    std::vector<double> interaction_prob;  // per state
    std::vector<double> init_state_prob;   // distribution over initial states
    Mask static_mask;                      // [s][a] incl. action 0 (forced eligible)
    double avail_prob = 1.0;               // per-interaction availability of each item
    double arrival_prob = 0.0;             // per-period arrival chance before presence
    double init_present_frac = 1.0;        // fraction of users present at t=0

    int n_actions() const { return static_cast<int>(items.size()) + 1; }
    void validate() const;  // throws invalid-config
};

class TabularEnv {
public:
    explicit TabularEnv(TabularEnvConfig cfg);

    int n_states() const { return cfg_.n_states; }
    int n_actions() const { return cfg_.n_actions(); }
    int current_period() const { return t_next_; }
    const TabularEnvConfig& config() const { return cfg_; }

    // users present and drawn to interact at period t (ascending ids);
    // t must be the next unstepped period
    std::vector<int64_t> active_users(int t) const;

    int state_of(int64_t u) const { return state_[static_cast<size_t>(u)]; }

    // NO_REC plus statically eligible items passing this interaction's
    // availability draw, ascending action ids
    std::vector<int> candidates(int64_t u, int t) const;

    struct StepResult {
        bool converted = false;
        int s_next = 0;
    };

    // advances the period; actions must be keyed exactly by active_users(t)
    // (missing-user) and drawn from candidates(u, t) (ineligible-item)
    std::map<int64_t, StepResult> step(int t, const std::map<int64_t, int>& actions);

    // exact per-interaction kernel and expected rewards behind step()'s sampling
    TabularMDP as_tabular(double gamma = 0.8) const;

    // bid x exact conversion probability (a perfectly calibrated scorer)
    ScoringTable scoring() const;
    const Mask& static_mask() const { return cfg_.static_mask; }

    // Exact [s][a] distribution of base_select's pick under availability
    // dropout: rank the eligible f>0 items by (f desc, id asc); the i-th ranked
    // item wins iff all better-ranked ones miss their draw, so
    //   w(rank i) = avail (1-avail)^i,  w(NO_REC) = (1-avail)^m.
    // This is the behavior policy whose value on-policy training estimates.
    Vec behavior_weights() const;

private:
    bool present(int64_t u, int t) const;
    double conv_prob(int s, int a) const;
    const double* drift_row(int s, int a) const;

    TabularEnvConfig cfg_;
    std::vector<int> state_;
    int t_next_ = 0;
};

// move one rung (up or down) with probability p, clamped at the ends, else stay
std::vector<double> ladder_kernel(int n_states, bool up, double p);

// The designed stress instance: the trap item bids high and converts well NOW but
// drags interest down; the steady item converts less but builds it. argmax f picks
// the trap everywhere; the alpha-blend with the trap policy's own Q flips the
// mid-ladder states to the steady item. Constant interaction probability keeps
// impression opportunities arm-neutral; per-interaction availability dropout
// supplies the off-argmax exploration SARSA needs.
TabularEnvConfig myopic_trap_config(int n_users = 10000, uint64_t seed = 1);

// no-long-term-structure control: conversion probabilities are state-independent,
// so the blend has nothing to exploit and expected lift is zero
TabularEnvConfig flat_config(int n_users = 10000, uint64_t seed = 1);

// ---------------------------------------------------------------------------
// vector mode: feature states (z interest, x context, i side info), parametric
// drift — z moves toward an item's direction on conversion and decays otherwise;
// i evolves exogenously; interaction propensity is a function of z.

struct VecState {
    std::vector<double> z, x, i;
};

struct VectorItemSpec {
    int item_id = 1;
    int bidder_id = 1;
    double bid = 1.0;
    double base_logit = -2.0;         // conversion logit offset
    double affinity = 3.0;            // scales dot(z, dir) in the conversion logit
    std::vector<double> dir;          // unit-ish interest direction, dim z_dim
};

struct VectorEnvConfig {
    int z_dim = 8, x_dim = 4, i_dim = 4;
    int n_users = 1000;
    uint64_t seed = 1;
    std::vector<VectorItemSpec> items;
    double eta = 0.3;                 // pull toward item direction on conversion
    double decay = 0.05;              // z decay otherwise
    double i_rho = 0.9, i_sigma = 0.1;
    double p_min = 0.2, p_max = 0.8;  // interaction propensity range (sigmoid of mean z)
    double avail_prob = 1.0;
    void validate() const;
};

class VectorEnv {
public:
    explicit VectorEnv(VectorEnvConfig cfg);

    int n_actions() const { return static_cast<int>(cfg_.items.size()) + 1; }
    int feature_dim() const;  // z+x+i+one-hot(action)
    const VectorEnvConfig& config() const { return cfg_; }

    std::vector<int64_t> active_users(int t) const;
    const VecState& state_of(int64_t u) const { return state_[static_cast<size_t>(u)]; }
    std::vector<int> candidates(int64_t u, int t) const;
    double conv_prob(const VecState& s, int a) const;
    double bid(int a) const;

    struct StepResult {
        bool converted = false;
        VecState s_next;
    };
    std::map<int64_t, StepResult> step(int t, const std::map<int64_t, int>& actions);

    // concatenated (state features, item one-hot) network input
    std::vector<double> featurize(const VecState& s, int a) const;

private:
    VectorEnvConfig cfg_;
    std::vector<VecState> state_;
    int t_next_ = 0;
};

VectorEnvConfig small_vector_config(int n_users = 500, uint64_t seed = 1);

}  // namespace ltv
