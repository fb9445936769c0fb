#include <doctest.h>

#include <cmath>
#include <vector>

#include "ltv/auction.hpp"
#include "ltv/policy.hpp"
#include "ltv/rng.hpp"

using namespace ltv;

TEST_CASE("base_select is argmax f with lowest-id ties") {
    CHECK(base_select({0, 1, 2}, [](int a) { return a == 1 ? 2.0 : 1.0; }) == 1);
    CHECK(base_select({0, 1, 2}, [](int) { return 1.0; }) == 0);
    CHECK_THROWS(base_select({}, [](int) { return 0.0; }));
}

TEST_CASE("select at alpha endpoints collapses to base and greedy-Q") {
    for (uint64_t seed = 0; seed < 100; ++seed) {
        rng::Stream st(seed, 0x73656c);
        const int n = 2 + static_cast<int>(st.next_below(6));
        std::vector<int> cands;
        std::vector<double> f(8), q(8);
        for (int a = 0; a < 8; ++a) {
            f[a] = st.next_in(0.0, 2.0);
            q[a] = st.next_in(0.0, 2.0);
        }
        for (int a = 0; a < n; ++a) cands.push_back(static_cast<int>(st.next_below(8)));
        std::sort(cands.begin(), cands.end());
        cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
        const auto ff = [&](int a) { return f[a]; };
        const auto qf = [&](int a) { return q[a]; };
        CHECK(select(cands, ff, qf, 0.0) == base_select(cands, ff));
        CHECK(select(cands, ff, qf, 1.0) == base_select(cands, qf));  // argmax q
    }
}

TEST_CASE("the blend can flip the choice where Q disagrees with f") {
    const std::vector<int> cands = {1, 2};
    const auto f = [](int a) { return a == 1 ? 1.0 : 0.9; };   // base prefers 1
    const auto q = [](int a) { return a == 1 ? 0.1 : 2.0; };   // long-term prefers 2
    CHECK(select(cands, f, q, 0.0) == 1);
    CHECK(select(cands, f, q, 0.96) == 2);
    CHECK_THROWS(select(cands, f, q, 1.5));
    CHECK_THROWS(select(cands, f, q, -0.1));
}

TEST_CASE("contribution_fraction endpoints and errors") {
    CHECK(contribution_fraction(2.0, 5.0, 0.0) == 0.0);
    CHECK(contribution_fraction(0.0, 5.0, 0.3) == 1.0);   // all long-term
    CHECK(contribution_fraction(1.0, 1.0, 0.5) == doctest::Approx(0.5));
    // alpha q / ((1-alpha) f + alpha q) against a direct evaluation
    const double v = contribution_fraction(1.3, 0.7, 0.25);
    CHECK(v == doctest::Approx(0.25 * 0.7 / (0.75 * 1.3 + 0.25 * 0.7)).epsilon(1e-15));
    CHECK_THROWS(contribution_fraction(0.0, 0.0, 0.5));
}

TEST_CASE("alpha grid is the documented 25-point ladder") {
    const auto& g = alpha_grid();
    CHECK(g.size() == 25);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
    CHECK(std::count(g.begin(), g.end(), 0.95) == 1);
    CHECK(std::count(g.begin(), g.end(), 0.96) == 1);
    CHECK(std::count(g.begin(), g.end(), 0.97) == 1);
    CHECK(std::count(g.begin(), g.end(), 0.98) == 1);
    CHECK(std::count(g.begin(), g.end(), 0.99) == 1);
    CHECK(std::is_sorted(g.begin(), g.end()));
    for (size_t i = 0; i + 1 < g.size(); ++i) CHECK(g[i] < g[i + 1]);
    for (int i = 0; i <= 19; ++i) CHECK(g[i] == doctest::Approx(0.05 * i).epsilon(1e-12));
}

TEST_CASE("tune_alpha picks the largest feasible grid point") {
    // f = q = 1 at the chosen action makes the fraction exactly alpha
    std::vector<TuneSample> sample(10);
    for (auto& s : sample) s.candidates = {0, 1};
    const auto f = [](int, int) { return 1.0; };
    const auto q = [](int, int) { return 1.0; };
    CHECK(tune_alpha(sample, f, q, 0.08) == 0.05);
    CHECK(tune_alpha(sample, f, q, 0.30) == 0.30);
    CHECK(tune_alpha(sample, f, q, 0.97) == 0.97);
    CHECK(tune_alpha(sample, f, q, 1.0) == 1.0);
    CHECK(mean_contribution(sample, f, q, 0.05) == doctest::Approx(0.05));
    CHECK(mean_contribution(sample, f, q, 0.0) == 0.0);
}

TEST_CASE("tune_alpha returns zero when every positive alpha overshoots") {
    // any alpha >= 0.05 flips the induced action to the q-heavy item, where the
    // fraction is already 0.05*1000 / (0.95*9.9 + 0.05*1000) = 0.84 > cap
    std::vector<TuneSample> sample(5);
    for (auto& s : sample) s.candidates = {1, 2};
    const auto f = [](int, int a) { return a == 1 ? 10.0 : 9.9; };
    const auto q = [](int, int a) { return a == 1 ? 0.0 : 1000.0; };
    CHECK(tune_alpha(sample, f, q, 0.5) == 0.0);
    CHECK(mean_contribution(sample, f, q, 0.0) == 0.0);
}

TEST_CASE("tune_alpha validates inputs") {
    std::vector<TuneSample> sample(1);
    sample[0].candidates = {0};
    const auto z = [](int, int) { return 0.0; };
    CHECK_THROWS(tune_alpha({}, z, z, 0.5));
    CHECK_THROWS(tune_alpha(sample, z, z, 0.0));
    CHECK_THROWS(tune_alpha(sample, z, z, 1.0001));
    // all-zero scores: every pair is zero-denominator, skipped, mean treated as 0
    CHECK(mean_contribution(sample, z, z, 0.5) == 0.0);
}
