#include "ltv/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ltv/rng.hpp"

namespace ltv {

static void check_prob(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument(std::string("invalid-config: ") + what + " outside [0,1]");
}

static void check_kernel(const std::vector<double>& k, int n_states, const char* what) {
    if (k.size() != static_cast<size_t>(n_states) * n_states)
        throw std::invalid_argument(std::string("invalid-config: ") + what + " kernel shape");
    for (int s = 0; s < n_states; ++s) {
        double sum = 0.0;
        for (int s2 = 0; s2 < n_states; ++s2) {
            const double v = k[static_cast<size_t>(s) * n_states + s2];
            if (v < 0.0)
                throw std::invalid_argument(std::string("invalid-config: ") + what +
                                            " negative entry");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument(std::string("invalid-config: ") + what +
                                        " row not stochastic");
    }
}

void TabularEnvConfig::validate() const {
    if (n_states <= 0) throw std::invalid_argument("invalid-config: n_states");
    if (n_users <= 0) throw std::invalid_argument("invalid-config: zero users");
    if (items.empty()) throw std::invalid_argument("invalid-config: no items");
    check_kernel(norec_drift, n_states, "norec");
    if (interaction_prob.size() != static_cast<size_t>(n_states))
        throw std::invalid_argument("invalid-config: interaction_prob shape");
    for (double p : interaction_prob) check_prob(p, "interaction_prob");
    if (init_state_prob.size() != static_cast<size_t>(n_states))
        throw std::invalid_argument("invalid-config: init_state_prob shape");
    double init_sum = 0.0;
    for (double p : init_state_prob) {
        check_prob(p, "init_state_prob");
        init_sum += p;
    }
    if (std::abs(init_sum - 1.0) > 1e-12)
        throw std::invalid_argument("invalid-config: init_state_prob must sum to 1");
    check_prob(avail_prob, "avail_prob");
    check_prob(arrival_prob, "arrival_prob");
    check_prob(init_present_frac, "init_present_frac");
    std::vector<int> seen_ids{kNoRec};
    std::map<int, int> owner;  // item -> bidder (catalog disjointness)
    for (size_t k = 0; k < items.size(); ++k) {
        const auto& it = items[k];
        if (it.item_id != static_cast<int>(k) + 1)
            throw std::invalid_argument("invalid-config: item ids must be 1..n in order");
        if (it.bid < 0.0) throw std::invalid_argument("invalid-config: negative bid");
        if (it.conv_prob.size() != static_cast<size_t>(n_states))
            throw std::invalid_argument("invalid-config: conv_prob shape");
        for (double p : it.conv_prob) check_prob(p, "conv_prob");
        check_kernel(it.drift, n_states, "item drift");
        if (!owner.emplace(it.item_id, it.bidder_id).second)
            throw std::invalid_argument("invalid-config: duplicate item");
    }
    if (static_mask.size() != static_cast<size_t>(n_states) * n_actions())
        throw std::invalid_argument("invalid-config: static_mask shape");
    for (int s = 0; s < n_states; ++s)
        if (!static_mask[static_cast<size_t>(s) * n_actions()])
            throw std::invalid_argument("invalid-config: NO_REC must stay eligible");
}

TabularEnv::TabularEnv(TabularEnvConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    state_.resize(cfg_.n_users);
    for (int64_t u = 0; u < cfg_.n_users; ++u) {
        const double x = rng::u01(cfg_.seed, u, 0, rng::kInitState);
        double acc = 0.0;
        int s = cfg_.n_states - 1;
        for (int k = 0; k < cfg_.n_states; ++k) {
            acc += cfg_.init_state_prob[k];
            if (x < acc) {
                s = k;
                break;
            }
        }
        state_[u] = s;
    }
}

bool TabularEnv::present(int64_t u, int t) const {
    if (rng::u01(cfg_.seed, u, 0, rng::kArrival) < cfg_.init_present_frac) return true;
    if (cfg_.arrival_prob == 0.0) return false;
    for (int k = 1; k <= t; ++k)
        if (rng::u01(cfg_.seed, u, k, rng::kArrival) < cfg_.arrival_prob) return true;
    return false;
}

std::vector<int64_t> TabularEnv::active_users(int t) const {
    if (t != t_next_) throw std::invalid_argument("out-of-order-period");
    std::vector<int64_t> out;
    for (int64_t u = 0; u < cfg_.n_users; ++u) {
        if (!present(u, t)) continue;
        if (rng::u01(cfg_.seed, u, t, rng::kActivity) < cfg_.interaction_prob[state_[u]])
            out.push_back(u);
    }
    return out;
}

std::vector<int> TabularEnv::candidates(int64_t u, int t) const {
    if (t != t_next_) throw std::invalid_argument("out-of-order-period");
    std::vector<int> out{kNoRec};
    const int s = state_[u];
    for (int a = 1; a < cfg_.n_actions(); ++a) {
        if (!cfg_.static_mask[static_cast<size_t>(s) * cfg_.n_actions() + a]) continue;
        if (rng::u01(cfg_.seed, u, t, rng::kAvail, a) < cfg_.avail_prob) out.push_back(a);
    }
    return out;
}

double TabularEnv::conv_prob(int s, int a) const {
    return a == kNoRec ? 0.0 : cfg_.items[a - 1].conv_prob[s];
}

const double* TabularEnv::drift_row(int s, int a) const {
    const auto& k = a == kNoRec ? cfg_.norec_drift : cfg_.items[a - 1].drift;
    return k.data() + static_cast<size_t>(s) * cfg_.n_states;
}

std::map<int64_t, TabularEnv::StepResult> TabularEnv::step(
    int t, const std::map<int64_t, int>& actions) {
    if (t != t_next_) throw std::invalid_argument("out-of-order-period");
    const auto active = active_users(t);
    if (actions.size() != active.size()) throw std::invalid_argument("missing-user");
    std::map<int64_t, StepResult> out;
    for (int64_t u : active) {
        const auto it = actions.find(u);
        if (it == actions.end()) throw std::invalid_argument("missing-user");
        const int a = it->second;
        const auto cands = candidates(u, t);
        if (std::find(cands.begin(), cands.end(), a) == cands.end())
            throw std::invalid_argument("ineligible-item");
        const int s = state_[u];
        StepResult res;
        res.converted = rng::u01(cfg_.seed, u, t, rng::kConvert) < conv_prob(s, a);
        const double x = rng::u01(cfg_.seed, u, t, rng::kTransit);
        const double* row = drift_row(s, a);
        double acc = 0.0;
        int s2 = cfg_.n_states - 1;
        for (int k = 0; k < cfg_.n_states; ++k) {
            acc += row[k];
            if (x < acc) {
                s2 = k;
                break;
            }
        }
        res.s_next = s2;
        state_[u] = s2;
        out.emplace(u, res);
    }
    ++t_next_;
    return out;
}

TabularMDP TabularEnv::as_tabular(double gamma) const {
    TabularMDP m = make_mdp(cfg_.n_states, cfg_.n_actions(), gamma);
    for (int s = 0; s < cfg_.n_states; ++s)
        for (int a = 0; a < cfg_.n_actions(); ++a) {
            const double* row = drift_row(s, a);
            for (int s2 = 0; s2 < cfg_.n_states; ++s2) m.p(s, a, s2) = row[s2];
            m.r(s, a) = conv_prob(s, a);
        }
    m.validate();
    return m;
}

ScoringTable TabularEnv::scoring() const {
    ScoringTable t;
    t.n_states = cfg_.n_states;
    t.n_actions = cfg_.n_actions();
    t.bid.assign(static_cast<size_t>(t.n_states) * t.n_actions, 0.0);
    t.ecvr.assign(t.bid.size(), 0.0);
    for (int s = 0; s < t.n_states; ++s)
        for (int a = 1; a < t.n_actions; ++a) {
            const size_t i = static_cast<size_t>(s) * t.n_actions + a;
            t.bid[i] = cfg_.items[a - 1].bid;
            t.ecvr[i] = conv_prob(s, a);
        }
    t.validate();
    return t;
}

Vec TabularEnv::behavior_weights() const {
    const int S = cfg_.n_states, A = cfg_.n_actions();
    const ScoringTable sc = scoring();
    Vec w(static_cast<size_t>(S) * A, 0.0);
    for (int s = 0; s < S; ++s) {
        std::vector<int> ranked;
        for (int a = 1; a < A; ++a)
            if (cfg_.static_mask[static_cast<size_t>(s) * A + a] && sc.f(s, a) > 0.0)
                ranked.push_back(a);
        std::stable_sort(ranked.begin(), ranked.end(),
                         [&](int a, int b) { return sc.f(s, a) > sc.f(s, b); });
        double miss = 1.0;  // P(every better-ranked item missed its draw)
        for (int a : ranked) {
            w[static_cast<size_t>(s) * A + a] = cfg_.avail_prob * miss;
            miss *= 1.0 - cfg_.avail_prob;
        }
        w[static_cast<size_t>(s) * A + kNoRec] = miss;
    }
    return w;
}

std::vector<double> ladder_kernel(int n_states, bool up, double p) {
    std::vector<double> k(static_cast<size_t>(n_states) * n_states, 0.0);
    for (int s = 0; s < n_states; ++s) {
        const int dst = up ? std::min(s + 1, n_states - 1) : std::max(s - 1, 0);
        k[static_cast<size_t>(s) * n_states + dst] += p;
        k[static_cast<size_t>(s) * n_states + s] += 1.0 - p;
    }
    return k;
}

TabularEnvConfig myopic_trap_config(int n_users, uint64_t seed) {
    const int S = 6;
    TabularEnvConfig cfg;
    cfg.n_states = S;
    cfg.n_users = n_users;
    cfg.seed = seed;
    ItemSpec trap;
    trap.item_id = 1;
    trap.bidder_id = 1;
    trap.bid = 2.0;
    trap.drift = ladder_kernel(S, false, 0.85);
    ItemSpec steady;
    steady.item_id = 2;
    steady.bidder_id = 2;
    steady.bid = 1.0;
    steady.drift = ladder_kernel(S, true, 0.85);
    for (int s = 0; s < S; ++s) {
        trap.conv_prob.push_back(0.10 + 0.08 * s);
        steady.conv_prob.push_back(0.02 + 0.08 * s);
    }
    cfg.items = {trap, steady};
    cfg.norec_drift = ladder_kernel(S, false, 0.85);  // idle interest decays like the trap's
    cfg.interaction_prob.assign(S, 0.6);              // constant: impression-neutral
    cfg.init_state_prob.assign(S, 0.0);
    cfg.init_state_prob[0] = cfg.init_state_prob[1] = cfg.init_state_prob[2] = 1.0 / 3.0;
    cfg.static_mask = full_mask(S, cfg.n_actions());
    cfg.avail_prob = 0.80;
    cfg.validate();
    return cfg;
}

TabularEnvConfig flat_config(int n_users, uint64_t seed) {
    TabularEnvConfig cfg = myopic_trap_config(n_users, seed);
    for (auto& item : cfg.items)
        for (double& p : item.conv_prob) p = item.item_id == 1 ? 0.12 : 0.08;
    return cfg;
}

// ---------------------------------------------------------------------------

void VectorEnvConfig::validate() const {
    if (z_dim <= 0 || x_dim <= 0 || i_dim <= 0)
        throw std::invalid_argument("invalid-config: feature dims");
    if (n_users <= 0) throw std::invalid_argument("invalid-config: zero users");
    if (items.empty()) throw std::invalid_argument("invalid-config: no items");
    for (size_t k = 0; k < items.size(); ++k) {
        if (items[k].item_id != static_cast<int>(k) + 1)
            throw std::invalid_argument("invalid-config: item ids must be 1..n in order");
        if (items[k].dir.size() != static_cast<size_t>(z_dim))
            throw std::invalid_argument("invalid-config: item direction dim");
    }
    if (!(eta >= 0.0 && eta <= 1.0) || !(decay >= 0.0 && decay <= 1.0))
        throw std::invalid_argument("invalid-config: drift rates");
    check_prob(avail_prob, "avail_prob");
    if (!(p_min >= 0.0 && p_min <= p_max && p_max <= 1.0))
        throw std::invalid_argument("invalid-config: propensity range");
}

static double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

VectorEnv::VectorEnv(VectorEnvConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    state_.resize(cfg_.n_users);
    for (int64_t u = 0; u < cfg_.n_users; ++u) {
        VecState& st = state_[u];
        st.z.resize(cfg_.z_dim);
        st.x.resize(cfg_.x_dim);
        st.i.resize(cfg_.i_dim);
        for (int k = 0; k < cfg_.z_dim; ++k)
            st.z[k] = 0.2 * (2.0 * rng::u01(cfg_.seed, u, k, rng::kInitState) - 1.0);
        for (int k = 0; k < cfg_.x_dim; ++k)
            st.x[k] = 2.0 * rng::u01(cfg_.seed, u, k, rng::kFeature) - 1.0;
        for (int k = 0; k < cfg_.i_dim; ++k)
            st.i[k] = 2.0 * rng::u01(cfg_.seed, u, 1000 + k, rng::kFeature) - 1.0;
    }
}

int VectorEnv::feature_dim() const {
    return cfg_.z_dim + cfg_.x_dim + cfg_.i_dim + n_actions();
}

static double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

std::vector<int64_t> VectorEnv::active_users(int t) const {
    if (t != t_next_) throw std::invalid_argument("out-of-order-period");
    std::vector<int64_t> out;
    for (int64_t u = 0; u < cfg_.n_users; ++u) {
        const double p =
            cfg_.p_min + (cfg_.p_max - cfg_.p_min) * sigmoid(3.0 * mean_of(state_[u].z));
        if (rng::u01(cfg_.seed, u, t, rng::kActivity) < p) out.push_back(u);
    }
    return out;
}

std::vector<int> VectorEnv::candidates(int64_t u, int t) const {
    if (t != t_next_) throw std::invalid_argument("out-of-order-period");
    std::vector<int> out{kNoRec};
    for (int a = 1; a < n_actions(); ++a)
        if (rng::u01(cfg_.seed, u, t, rng::kAvail, a) < cfg_.avail_prob) out.push_back(a);
    return out;
}

double VectorEnv::conv_prob(const VecState& s, int a) const {
    if (a == kNoRec) return 0.0;
    const auto& item = cfg_.items[a - 1];
    double dot = 0.0;
    for (int k = 0; k < cfg_.z_dim; ++k) dot += s.z[k] * item.dir[k];
    return sigmoid(item.base_logit + item.affinity * dot);
}

double VectorEnv::bid(int a) const { return a == kNoRec ? 0.0 : cfg_.items[a - 1].bid; }

std::map<int64_t, VectorEnv::StepResult> VectorEnv::step(int t,
                                                         const std::map<int64_t, int>& actions) {
    if (t != t_next_) throw std::invalid_argument("out-of-order-period");
    const auto active = active_users(t);
    if (actions.size() != active.size()) throw std::invalid_argument("missing-user");
    std::map<int64_t, StepResult> out;
    for (int64_t u : active) {
        const auto it = actions.find(u);
        if (it == actions.end()) throw std::invalid_argument("missing-user");
        const int a = it->second;
        const auto cands = candidates(u, t);
        if (std::find(cands.begin(), cands.end(), a) == cands.end())
            throw std::invalid_argument("ineligible-item");
        VecState& st = state_[u];
        StepResult res;
        res.converted = rng::u01(cfg_.seed, u, t, rng::kConvert) < conv_prob(st, a);
        if (res.converted) {
            const auto& dir = cfg_.items[a - 1].dir;
            for (int k = 0; k < cfg_.z_dim; ++k)
                st.z[k] = (1.0 - cfg_.eta) * st.z[k] + cfg_.eta * dir[k];
        } else {
            for (double& zk : st.z) zk *= 1.0 - cfg_.decay;
        }
        for (int k = 0; k < cfg_.i_dim; ++k) {
            const double noise = 2.0 * rng::u01(cfg_.seed, u, t, rng::kDrift, k) - 1.0;
            st.i[k] = cfg_.i_rho * st.i[k] + cfg_.i_sigma * noise;
        }
        res.s_next = st;
        out.emplace(u, res);
    }
    ++t_next_;
    return out;
}

std::vector<double> VectorEnv::featurize(const VecState& s, int a) const {
    std::vector<double> x;
    x.reserve(feature_dim());
    x.insert(x.end(), s.z.begin(), s.z.end());
    x.insert(x.end(), s.x.begin(), s.x.end());
    x.insert(x.end(), s.i.begin(), s.i.end());
    for (int k = 0; k < n_actions(); ++k) x.push_back(k == a ? 1.0 : 0.0);
    return x;
}

VectorEnvConfig small_vector_config(int n_users, uint64_t seed) {
    VectorEnvConfig cfg;
    cfg.n_users = n_users;
    cfg.seed = seed;
    rng::Stream st(seed, 0x766563);
    for (int id = 1; id <= 3; ++id) {
        VectorItemSpec item;
        item.item_id = id;
        item.bidder_id = id;
        item.bid = st.next_in(0.5, 2.0);
        item.base_logit = -2.0 + 0.3 * id;
        item.dir.resize(cfg.z_dim);
        double norm = 0.0;
        for (int k = 0; k < cfg.z_dim; ++k) {
            item.dir[k] = 2.0 * st.next_u01() - 1.0;
            norm += item.dir[k] * item.dir[k];
        }
        norm = std::sqrt(norm);
        for (double& d : item.dir) d /= norm;
        cfg.items.push_back(std::move(item));
    }
    cfg.validate();
    return cfg;
}

}  // namespace ltv
