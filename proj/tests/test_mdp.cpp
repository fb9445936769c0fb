#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "ltv/mdp.hpp"

using namespace ltv;

TEST_CASE("make_mdp shapes and validates") {
    TabularMDP m = make_mdp(4, 3, 0.8);
    for (int s = 0; s < 4; ++s) m.p(s, 0, (s + 1) % 4) = 1.0;
    for (int s = 0; s < 4; ++s)
        for (int a = 1; a < 3; ++a) m.p(s, a, s) = 1.0;
    m.r(2, 1) = 0.5;
    m.validate();
    CHECK(m.p(0, 0, 1) == 1.0);
    CHECK(m.r(2, 1) == 0.5);
    CHECK(m.r(0, 0) == 0.0);
}

TEST_CASE("validate rejects broken kernels and rewards") {
    TabularMDP m = make_mdp(2, 1, 0.8);
    m.p(0, 0, 0) = 0.7;  // row sums to 0.7
    m.p(1, 0, 1) = 1.0;
    CHECK_THROWS(m.validate());
    m.p(0, 0, 1) = 0.3;
    m.validate();
    m.r(0, 0) = 1.5;  // conversion probabilities live in [0,1]
    CHECK_THROWS(m.validate());
}

TEST_CASE("random_mdp rows are stochastic across many seeds") {
    for (uint64_t seed = 0; seed < 40; ++seed) {
        const TabularMDP m = random_mdp(seed, 5 + seed % 12, 2 + seed % 7, 0.8);
        m.validate();  // row sums within 1e-12, rewards in range
        double total = 0.0;
        for (int s = 0; s < m.n_states; ++s)
            for (int a = 0; a < m.n_actions; ++a)
                for (int s2 = 0; s2 < m.n_states; ++s2) total += m.p(s, a, s2);
        CHECK(total == doctest::Approx(m.n_states * m.n_actions).epsilon(1e-9));
    }
}

TEST_CASE("random_mdp is seed-deterministic") {
    const TabularMDP a = random_mdp(123, 8, 4, 0.8);
    const TabularMDP b = random_mdp(123, 8, 4, 0.8);
    const TabularMDP c = random_mdp(124, 8, 4, 0.8);
    CHECK(a.P == b.P);
    CHECK(a.rbar == b.rbar);
    CHECK(a.P != c.P);
}

TEST_CASE("sparse successor count is honored") {
    const TabularMDP m = random_mdp(7, 10, 3, 0.8, /*succ=*/3);
    for (int s = 0; s < 10; ++s)
        for (int a = 0; a < 3; ++a) {
            int nz = 0;
            for (int s2 = 0; s2 < 10; ++s2) nz += m.p(s, a, s2) > 0.0;
            CHECK(nz <= 3);
            CHECK(nz >= 1);
        }
}

TEST_CASE("mdp csv round-trip is exact") {
    const TabularMDP m = random_mdp(99, 6, 3, 0.8);
    const std::string dir = std::filesystem::temp_directory_path() / "mdp_rt";
    std::filesystem::create_directories(dir);
    save_mdp_csv(m, dir + "/p.csv", dir + "/r.csv");
    const TabularMDP back = load_mdp_csv(dir + "/p.csv", dir + "/r.csv", m.gamma);
    CHECK(back.n_states == m.n_states);
    CHECK(back.n_actions == m.n_actions);
    CHECK(back.P == m.P);        // shortest round-trip formatting: bit-exact
    CHECK(back.rbar == m.rbar);
}
