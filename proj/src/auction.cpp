#include "ltv/auction.hpp"

#include <algorithm>
#include <stdexcept>

#include "ltv/csv.hpp"
#include "ltv/rng.hpp"

namespace ltv {

double ScoringTable::score(int s, int a, const Mask& mask) const {
    if (a != kNoRec && !mask[static_cast<size_t>(s) * n_actions + a])
        throw std::invalid_argument("ineligible-item: action " + std::to_string(a) +
                                    " in state " + std::to_string(s));
    return f(s, a);
}

Vec ScoringTable::f_table() const {
    Vec t(bid.size());
    for (size_t i = 0; i < t.size(); ++i) t[i] = bid[i] * ecvr[i];
    return t;
}

void ScoringTable::validate() const {
    if (bid.size() != static_cast<size_t>(n_states) * n_actions || ecvr.size() != bid.size())
        throw std::invalid_argument("invalid-scoring: shape mismatch");
    for (size_t i = 0; i < bid.size(); ++i) {
        if (bid[i] < 0.0) throw std::invalid_argument("invalid-scoring: negative bid");
        if (ecvr[i] < 0.0 || ecvr[i] > 1.0)
            throw std::invalid_argument("invalid-scoring: ecvr outside [0,1]");
    }
    for (int s = 0; s < n_states; ++s)
        if (f(s, kNoRec) != 0.0)
            throw std::invalid_argument("invalid-scoring: NO_REC must score 0");
}

std::vector<int> eligible_actions(const Mask& mask, int n_states, int n_actions, int s) {
    (void)n_states;
    std::vector<int> out{kNoRec};
    for (int a = 1; a < n_actions; ++a)
        if (mask[static_cast<size_t>(s) * n_actions + a]) out.push_back(a);
    return out;
}

AuctionResult run_auction(const std::vector<int>& candidates,
                          const std::function<double(int)>& score_fn) {
    if (candidates.empty()) throw std::invalid_argument("empty-eligible-set");
    AuctionResult res;
    res.winner = candidates[0];
    double best = score_fn(candidates[0]);
    for (size_t i = 1; i < candidates.size(); ++i) {
        const double sc = score_fn(candidates[i]);
        if (sc > best || (sc == best && candidates[i] < res.winner)) {
            best = sc;
            res.winner = candidates[i];
        }
    }
    res.price = 0.0;
    for (int a : candidates)
        if (a != res.winner) res.price = std::max(res.price, score_fn(a));
    return res;
}

void save_scoring_csv(const ScoringTable& t, const std::string& path) {
    csv::Writer w(path, "state_id,item_id,bid,ecvr");
    for (int s = 0; s < t.n_states; ++s)
        for (int a = 0; a < t.n_actions; ++a) {
            const size_t i = static_cast<size_t>(s) * t.n_actions + a;
            w.row(s, a, t.bid[i], t.ecvr[i]);
        }
}

ScoringTable load_scoring_csv(const std::string& path) {
    auto rows = csv::read_rows(path, "state_id,item_id,bid,ecvr");
    ScoringTable t;
    for (const auto& r : rows) {
        t.n_states = std::max(t.n_states, std::stoi(r[0]) + 1);
        t.n_actions = std::max(t.n_actions, std::stoi(r[1]) + 1);
    }
    t.bid.assign(static_cast<size_t>(t.n_states) * t.n_actions, 0.0);
    t.ecvr.assign(t.bid.size(), 0.0);
    for (const auto& r : rows) {
        const size_t i = static_cast<size_t>(std::stoi(r[0])) * t.n_actions + std::stoi(r[1]);
        t.bid[i] = std::stod(r[2]);
        t.ecvr[i] = std::stod(r[3]);
    }
    t.validate();
    return t;
}

ScoringTable random_scoring(uint64_t seed, int n_states, int n_actions, double bid_lo,
                            double bid_hi) {
    ScoringTable t;
    t.n_states = n_states;
    t.n_actions = n_actions;
    t.bid.assign(static_cast<size_t>(n_states) * n_actions, 0.0);
    t.ecvr.assign(t.bid.size(), 0.0);
    rng::Stream st(seed, 0x626964);
    for (int s = 0; s < n_states; ++s)
        for (int a = 1; a < n_actions; ++a) {
            const size_t i = static_cast<size_t>(s) * n_actions + a;
            t.bid[i] = st.next_in(bid_lo, bid_hi);
            // id-indexed infinitesimal perturbation keeps eligible f values distinct
            t.ecvr[i] = st.next_in(0.01, 0.99) + a * 1e-12;
        }
    t.validate();
    return t;
}

}  // namespace ltv
