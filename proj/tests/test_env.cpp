#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "ltv/dp.hpp"
#include "ltv/env.hpp"
#include "ltv/pipeline.hpp"
#include "ltv/policy.hpp"
#include "ltv/replay.hpp"
#include "ltv/sarsa.hpp"

using namespace ltv;

TEST_CASE("ladder kernels move one rung with probability p, clamped at the ends") {
    const auto up = ladder_kernel(4, true, 0.85);
    CHECK(up[0 * 4 + 1] == 0.85);
    CHECK(up[0 * 4 + 0] == 1.0 - 0.85);
    CHECK(up[2 * 4 + 3] == 0.85);
    CHECK(up[3 * 4 + 3] == 0.85 + (1.0 - 0.85));  // clamped: all mass on self
    const auto down = ladder_kernel(4, false, 0.85);
    CHECK(down[0 * 4 + 0] == 0.85 + (1.0 - 0.85));
    CHECK(down[2 * 4 + 1] == 0.85);
    CHECK(down[2 * 4 + 2] == 1.0 - 0.85);
    const auto single = ladder_kernel(1, true, 0.5);
    CHECK(single.size() == 1);
    CHECK(single[0] == 1.0);
    for (int s = 0; s < 4; ++s) {
        double sum = 0.0;
        for (int s2 = 0; s2 < 4; ++s2) sum += up[static_cast<size_t>(s) * 4 + s2];
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("config validation rejects each malformed field") {
    auto cfg = myopic_trap_config(100, 1);
    CHECK_NOTHROW(cfg.validate());

    auto bad = cfg;
    bad.interaction_prob[2] = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.items[0].conv_prob.pop_back();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.items[1].drift[0] += 0.1;  // row no longer stochastic
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.items[0].bid = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.items[1].item_id = 5;  // ids must be 1..n in order
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.init_state_prob[0] = 0.9;  // sum != 1
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.static_mask[0 * cfg.n_actions() + 0] = 0;  // NO_REC must stay eligible
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.items.clear();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.avail_prob = 1.01;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("trajectories are bit-reproducible and population-size independent") {
    auto cfg = myopic_trap_config(2000, 77);
    TabularEnv a(cfg), b(cfg);
    const auto act0 = a.active_users(0);
    CHECK(act0 == b.active_users(0));
    CHECK(!act0.empty());
    for (int64_t u : act0) CHECK(a.candidates(u, 0) == b.candidates(u, 0));

    std::map<int64_t, int> actions;
    for (int64_t u : act0) actions[u] = 0;
    const auto ra = a.step(0, actions);
    const auto rb = b.step(0, actions);
    REQUIRE(ra.size() == rb.size());
    for (const auto& [u, res] : ra) {
        CHECK(res.converted == rb.at(u).converted);
        CHECK(res.s_next == rb.at(u).s_next);
    }
    for (int64_t u = 0; u < 2000; ++u) CHECK(a.state_of(u) == b.state_of(u));

    // user draws are pure hashes: a larger population embeds the smaller one
    auto big_cfg = myopic_trap_config(5000, 77);
    TabularEnv big(big_cfg);
    std::vector<int64_t> prefix;
    for (int64_t u : big.active_users(0))
        if (u < 2000) prefix.push_back(u);
    CHECK(prefix == act0);

    auto other_cfg = myopic_trap_config(2000, 78);
    TabularEnv other(other_cfg);
    CHECK(other.active_users(0) != act0);
}

TEST_CASE("step rejects out-of-order periods, missing users, ineligible items") {
    auto cfg = myopic_trap_config(500, 3);
    TabularEnv env(cfg);
    CHECK_THROWS_AS((void)env.active_users(1), std::invalid_argument);
    const auto active = env.active_users(0);
    REQUIRE(active.size() >= 2);
    CHECK_THROWS_AS((void)env.candidates(active[0], 1), std::invalid_argument);

    for (int64_t u : active) {
        const auto cands = env.candidates(u, 0);
        REQUIRE(!cands.empty());
        CHECK(cands[0] == 0);  // NO_REC always offered first
        CHECK(std::is_sorted(cands.begin(), cands.end()));
    }

    std::map<int64_t, int> actions;
    for (int64_t u : active) actions[u] = 0;
    auto short_map = actions;
    short_map.erase(active[0]);
    CHECK_THROWS_WITH_AS((void)env.step(0, short_map), "missing-user", std::invalid_argument);
    auto swapped = short_map;
    swapped[cfg.n_users + 5] = 0;  // right size, wrong key
    CHECK_THROWS_WITH_AS((void)env.step(0, swapped), "missing-user", std::invalid_argument);
    auto bad_item = actions;
    bad_item[active[0]] = 99;  // never in any candidate list
    CHECK_THROWS_WITH_AS((void)env.step(0, bad_item), "ineligible-item", std::invalid_argument);
    CHECK_THROWS_AS((void)env.step(1, actions), std::invalid_argument);

    CHECK_NOTHROW((void)env.step(0, actions));
    CHECK(env.current_period() == 1);
}

TEST_CASE("empirical conversion and transition frequencies match the exact kernel") {
    auto cfg = myopic_trap_config(30000, 9);
    TabularEnv env(cfg);
    const auto m = env.as_tabular(0.8);

    // initial states follow init_state_prob
    std::vector<int> init_counts(cfg.n_states, 0);
    for (int64_t u = 0; u < cfg.n_users; ++u) ++init_counts[env.state_of(u)];
    for (int s = 0; s < 3; ++s)
        CHECK(std::abs(init_counts[s] / 30000.0 - 1.0 / 3.0) < 0.015);
    for (int s = 3; s < 6; ++s) CHECK(init_counts[s] == 0);

    // push the trap item wherever it is available, NO_REC otherwise
    const auto active = env.active_users(0);
    std::map<int64_t, int> actions;
    std::map<int64_t, int> prior;
    for (int64_t u : active) {
        const auto cands = env.candidates(u, 0);
        actions[u] = std::find(cands.begin(), cands.end(), 1) != cands.end() ? 1 : 0;
        prior[u] = env.state_of(u);
    }
    const auto res = env.step(0, actions);

    std::map<std::pair<int, int>, std::vector<int>> next_counts;
    std::map<std::pair<int, int>, std::pair<int, int>> conv;  // (converted, total)
    for (const auto& [u, r] : res) {
        const std::pair<int, int> k{prior[u], actions[u]};
        auto& nc = next_counts[k];
        nc.resize(cfg.n_states, 0);
        ++nc[r.s_next];
        auto& cv = conv[k];
        cv.first += r.converted ? 1 : 0;
        ++cv.second;
    }
    int checked = 0;
    for (const auto& [k, cv] : conv) {
        const auto [s, a] = k;
        if (cv.second < 2000) continue;
        ++checked;
        const double emp_conv = static_cast<double>(cv.first) / cv.second;
        CHECK(std::abs(emp_conv - m.r(s, a)) < 0.025);
        if (a == 0) CHECK(cv.first == 0);  // NO_REC never converts
        double tv = 0.0;
        for (int s2 = 0; s2 < cfg.n_states; ++s2)
            tv += std::abs(static_cast<double>(next_counts[k][s2]) / cv.second - m.p(s, a, s2));
        CHECK(tv / 2.0 < 0.025);
    }
    CHECK(checked >= 3);
}

TEST_CASE("the tabular projection reproduces drift rows and conversion rates exactly") {
    auto cfg = myopic_trap_config(100, 1);
    TabularEnv env(cfg);
    const auto m = env.as_tabular(0.8);
    CHECK(m.n_states == 6);
    CHECK(m.n_actions == 3);
    CHECK(m.gamma == 0.8);
    const auto down = ladder_kernel(6, false, 0.85);
    const auto up = ladder_kernel(6, true, 0.85);
    for (int s = 0; s < 6; ++s) {
        CHECK(m.r(s, 0) == 0.0);
        CHECK(m.r(s, 1) == cfg.items[0].conv_prob[s]);
        CHECK(m.r(s, 2) == cfg.items[1].conv_prob[s]);
        for (int s2 = 0; s2 < 6; ++s2) {
            CHECK(m.p(s, 0, s2) == down[static_cast<size_t>(s) * 6 + s2]);  // norec decays
            CHECK(m.p(s, 1, s2) == down[static_cast<size_t>(s) * 6 + s2]);
            CHECK(m.p(s, 2, s2) == up[static_cast<size_t>(s) * 6 + s2]);
        }
    }
}

TEST_CASE("the scorer is perfectly calibrated: f = bid x conversion probability") {
    auto cfg = myopic_trap_config(100, 1);
    TabularEnv env(cfg);
    const auto sc = env.scoring();
    for (int s = 0; s < 6; ++s) {
        CHECK(sc.f(s, 0) == 0.0);
        CHECK(sc.f(s, 1) == 2.0 * (0.10 + 0.08 * s));
        CHECK(sc.f(s, 2) == 1.0 * (0.02 + 0.08 * s));
        // the myopic argmax lands on the trap item in every state
        CHECK(sc.f(s, 1) > sc.f(s, 2));
    }
    const auto flat = flat_config(100, 1);
    for (int s = 0; s < 6; ++s) {
        CHECK(flat.items[0].conv_prob[s] == 0.12);
        CHECK(flat.items[1].conv_prob[s] == 0.08);
    }
}

TEST_CASE("behavior weights follow the availability-ranked closed form") {
    auto cfg = myopic_trap_config(100, 1);  // f(s,1) > f(s,2) > 0 everywhere, avail 0.8
    const int A = cfg.n_actions();
    {
        TabularEnv env(cfg);
        const auto w = env.behavior_weights();
        for (int s = 0; s < 6; ++s) {
            CHECK(w[static_cast<size_t>(s) * A + 1] == 0.8);
            CHECK(w[static_cast<size_t>(s) * A + 2] == 0.8 * (1.0 - 0.8));
            CHECK(w[static_cast<size_t>(s) * A + 0] == (1.0 - 0.8) * (1.0 - 0.8));
            double sum = 0.0;
            for (int a = 0; a < A; ++a) sum += w[static_cast<size_t>(s) * A + a];
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
        }
    }
    {   // flipping the ranking flips the weights; exact f ties keep id order
        auto flipped = cfg;
        flipped.items[1].bid = 10.0;
        TabularEnv env(flipped);
        const auto w = env.behavior_weights();
        CHECK(w[1 * A + 2] == 0.8);  // f(1,2) = 1.0 > f(1,1) = 0.36
        CHECK(w[1 * A + 1] == 0.8 * (1.0 - 0.8));
        CHECK(w[0 * A + 1] == 0.8);  // f(0,1) == f(0,2) == 0.2: lower id ranks first
        CHECK(w[0 * A + 2] == 0.8 * (1.0 - 0.8));
    }
    {   // a masked item never wins; its mass shifts down the ranking
        auto masked = cfg;
        masked.static_mask[0 * A + 1] = 0;
        TabularEnv env(masked);
        const auto w = env.behavior_weights();
        CHECK(w[0 * A + 1] == 0.0);
        CHECK(w[0 * A + 2] == 0.8);
        CHECK(w[0 * A + 0] == 1.0 - 0.8);
        CHECK(w[1 * A + 1] == 0.8);  // other states unaffected
    }
    {   // an f = 0 item is never picked by the argmax
        auto zeroed = cfg;
        zeroed.items[1].bid = 0.0;
        TabularEnv env(zeroed);
        const auto w = env.behavior_weights();
        CHECK(w[0 * A + 2] == 0.0);
        CHECK(w[0 * A + 1] == 0.8);
        CHECK(w[0 * A + 0] == 1.0 - 0.8);
    }
}

TEST_CASE("on-policy training on env rollouts recovers the interaction-clock values") {
    // end-to-end interlock: env rollout under the base policy -> buffer table ->
    // replay -> gamma^tau SARSA, checked against the exact linear-system values
    // at the pairs the behavior policy actually covers
    auto cfg = myopic_trap_config(4000, 11);
    TabularEnv env(cfg);
    const auto sc = env.scoring();
    const double gamma = 0.8;

    BufferTable<int> table(15);
    ReplayBuffer<Transition> buffer(1 << 20);
    std::vector<int64_t> pair_count(static_cast<size_t>(6) * 3, 0);
    auto take = [&](const std::vector<TabTuple>& tuples) {
        for (const auto& d : tuples) {
            ++pair_count[static_cast<size_t>(d.s) * 3 + d.a];
            Transition tr;
            tr.s = d.s; tr.a = d.a; tr.r = d.r;
            tr.s2 = d.s2; tr.a2 = d.a2; tr.tau = d.tau; tr.terminal = d.terminal;
            buffer.push(tr);
        }
    };
    for (int t = 0; t < 80; ++t) {
        const auto active = env.active_users(t);
        std::map<int64_t, int> actions;
        std::vector<TabInteraction> period;
        for (int64_t u : active) {
            const int s = env.state_of(u);
            const auto cands = env.candidates(u, t);
            const int a = base_select(cands, [&](int x) { return sc.f(s, x); });
            actions[u] = a;
            TabInteraction rec;
            rec.t = t; rec.user_id = u; rec.s = s; rec.a = a;
            period.push_back(rec);
        }
        const auto res = env.step(t, actions);
        for (auto& rec : period) rec.r = res.at(rec.user_id).converted ? 1.0 : 0.0;
        take(table.ingest(period, t));
    }
    take(table.flush());
    REQUIRE(buffer.size() > 100000);

    TrainerConfig tcfg;
    tcfg.batch_size = 32;
    tcfg.step = {0.5, 2000.0};
    tcfg.gamma = gamma;
    tcfg.target_sync_k = 100;
    tcfg.seed = 4;
    TabularTrainer trainer(TabularQ(6, 3), tcfg);
    for (int i = 0; i < 25000; ++i) trainer.train_step(buffer);

    const auto m = env.as_tabular(gamma);
    const auto qstar = q_interaction_clock(m, cfg.interaction_prob, env.behavior_weights());
    int covered = 0;
    double sup = 0.0;
    for (size_t i = 0; i < qstar.size(); ++i) {
        if (pair_count[i] < 1000) continue;
        ++covered;
        sup = std::max(sup, std::abs(trainer.q().theta[i] - qstar[i]));
    }
    CHECK(covered >= 6);
    CHECK(sup < 0.12);
}

TEST_CASE("vector env: determinism, drift arithmetic, and feature layout") {
    auto cfg = small_vector_config(400, 21);
    VectorEnv a(cfg), b(cfg);
    CHECK(a.n_actions() == 4);
    CHECK(a.feature_dim() == cfg.z_dim + cfg.x_dim + cfg.i_dim + 4);

    const auto act0 = a.active_users(0);
    CHECK(act0 == b.active_users(0));
    REQUIRE(!act0.empty());

    std::map<int64_t, VecState> prior;
    std::map<int64_t, int> actions;
    for (int64_t u : act0) {
        prior[u] = a.state_of(u);
        const auto cands = a.candidates(u, 0);
        CHECK(cands == b.candidates(u, 0));
        actions[u] = std::find(cands.begin(), cands.end(), 1) != cands.end() ? 1 : 0;
    }
    const auto ra = a.step(0, actions);
    const auto rb = b.step(0, actions);

    int conversions = 0;
    for (const auto& [u, res] : ra) {
        CHECK(res.converted == rb.at(u).converted);
        CHECK(res.s_next.z == rb.at(u).s_next.z);
        const VecState& before = prior[u];
        const VecState& after = res.s_next;
        CHECK(after.x == before.x);  // context never moves
        if (res.converted) {
            ++conversions;
            REQUIRE(actions[u] == 1);
            const auto& dir = cfg.items[0].dir;
            for (int k = 0; k < cfg.z_dim; ++k)
                CHECK(after.z[k] == (1.0 - cfg.eta) * before.z[k] + cfg.eta * dir[k]);
        } else {
            for (int k = 0; k < cfg.z_dim; ++k)
                CHECK(after.z[k] == before.z[k] * (1.0 - cfg.decay));
        }
        for (int k = 0; k < cfg.i_dim; ++k)
            CHECK(std::abs(after.i[k] - cfg.i_rho * before.i[k]) <= cfg.i_sigma + 1e-15);
        CHECK(a.state_of(u).z == after.z);
    }
    CHECK(conversions > 0);  // the drift branch above actually ran both ways

    const auto& st = a.state_of(act0[0]);
    const auto x = a.featurize(st, 2);
    REQUIRE(static_cast<int>(x.size()) == a.feature_dim());
    for (int k = 0; k < cfg.z_dim; ++k) CHECK(x[k] == st.z[k]);
    for (int k = 0; k < cfg.x_dim; ++k) CHECK(x[cfg.z_dim + k] == st.x[k]);
    for (int k = 0; k < cfg.i_dim; ++k) CHECK(x[cfg.z_dim + cfg.x_dim + k] == st.i[k]);
    const int base = cfg.z_dim + cfg.x_dim + cfg.i_dim;
    for (int k = 0; k < 4; ++k) CHECK(x[base + k] == (k == 2 ? 1.0 : 0.0));

    CHECK(a.bid(0) == 0.0);
    CHECK(a.bid(1) == cfg.items[0].bid);
}

TEST_CASE("vector env config validation rejects malformed items and rates") {
    auto cfg = small_vector_config(100, 1);
    CHECK_NOTHROW(cfg.validate());
    auto bad = cfg;
    bad.items[1].item_id = 7;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.items[0].dir.pop_back();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.eta = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.p_min = 0.9;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.n_users = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
