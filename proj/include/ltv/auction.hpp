#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ltv/dp.hpp"

// Bid-eCVR scoring and second-price allocation. Action id 0 is reserved for
// NO_RECOMMENDATION: always eligible, scored 0, never owned by a bidder.
// Prices are recorded for metrics only and never feed back into dynamics.

namespace ltv {

inline constexpr int kNoRec = 0;

struct ScoringTable {
    int n_states = 0;
    int n_actions = 0;                 // including action 0 = NO_REC
    std::vector<double> bid;           // [s][a]
    std::vector<double> ecvr;          // [s][a]

    double f(int s, int a) const {
        const size_t i = static_cast<size_t>(s) * n_actions + a;
        return bid[i] * ecvr[i];
    }
    // throws "ineligible-item" if the mask rules the pair out
    double score(int s, int a, const Mask& mask) const;
    Vec f_table() const;               // [s][a] products
    void validate() const;
};

// eligible actions in a state: NO_REC plus the masked items, ascending ids
std::vector<int> eligible_actions(const Mask& mask, int n_states, int n_actions, int s);

struct AuctionResult {
    int winner = kNoRec;
    double price = 0.0;  // second-highest score; 0 when only one candidate
};

// winner = argmax score over candidates (lowest id on ties); price = runner-up score
AuctionResult run_auction(const std::vector<int>& candidates,
                          const std::function<double(int)>& score_fn);

// CSV interchange: rows (state_id, item_id, bid, ecvr)
void save_scoring_csv(const ScoringTable& t, const std::string& path);
ScoringTable load_scoring_csv(const std::string& path);

// random table with continuous draws plus an id-indexed perturbation, making
// equal f values within a state measure-zero (the uniqueness assumption)
ScoringTable random_scoring(uint64_t seed, int n_states, int n_actions, double bid_lo = 0.5,
                            double bid_hi = 2.0);

}  // namespace ltv
