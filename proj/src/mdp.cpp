#include "ltv/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ltv/csv.hpp"
#include "ltv/rng.hpp"

namespace ltv {

void TabularMDP::validate() const {
    if (n_states <= 0 || n_actions <= 0)
        throw std::invalid_argument("invalid-mdp: nonpositive dimensions");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("invalid-mdp: gamma outside [0,1)");
    if (P.size() != static_cast<size_t>(n_states) * n_actions * n_states ||
        rbar.size() != static_cast<size_t>(n_states) * n_actions)
        throw std::invalid_argument("invalid-mdp: shape mismatch");
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) {
            double sum = 0.0;
            for (int s2 = 0; s2 < n_states; ++s2) {
                double v = p(s, a, s2);
                if (v < 0.0) throw std::invalid_argument("invalid-mdp: negative probability");
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw std::invalid_argument("invalid-mdp: row sum off by >1e-12");
            double rv = r(s, a);
            if (rv < 0.0 || rv > 1.0)
                throw std::invalid_argument("invalid-mdp: rbar outside [0,1]");
        }
}

TabularMDP make_mdp(int n_states, int n_actions, double gamma) {
    TabularMDP m;
    m.n_states = n_states;
    m.n_actions = n_actions;
    m.gamma = gamma;
    m.P.assign(static_cast<size_t>(n_states) * n_actions * n_states, 0.0);
    m.rbar.assign(static_cast<size_t>(n_states) * n_actions, 0.0);
    return m;
}

TabularMDP random_mdp(uint64_t seed, int n_states, int n_actions, double gamma, int succ,
                      double r_lo, double r_hi) {
    TabularMDP m = make_mdp(n_states, n_actions, gamma);
    rng::Stream st(seed, 0x6d6470);
    if (succ <= 0 || succ > n_states) succ = n_states;
    std::vector<int> ids(n_states);
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) {
            // pick `succ` distinct successors, exponential weights, normalize
            for (int i = 0; i < n_states; ++i) ids[i] = i;
            for (int i = 0; i < succ; ++i)
                std::swap(ids[i], ids[i + st.next_below(n_states - i)]);
            double total = 0.0;
            for (int i = 0; i < succ; ++i) {
                double w = -std::log(1.0 - st.next_u01());
                m.p(s, a, ids[i]) = w;
                total += w;
            }
            for (int i = 0; i < succ; ++i) m.p(s, a, ids[i]) /= total;
            // exact renormalization so validate()'s 1e-12 row-sum gate holds
            double sum = 0.0;
            for (int s2 = 0; s2 < n_states; ++s2) sum += m.p(s, a, s2);
            for (int s2 = 0; s2 < n_states; ++s2) m.p(s, a, s2) /= sum;
            m.r(s, a) = st.next_in(r_lo, r_hi);
        }
    return m;
}

void save_mdp_csv(const TabularMDP& m, const std::string& transitions_path,
                  const std::string& rewards_path) {
    csv::Writer tw(transitions_path, "s,a,s_next,prob");
    for (int s = 0; s < m.n_states; ++s)
        for (int a = 0; a < m.n_actions; ++a)
            for (int s2 = 0; s2 < m.n_states; ++s2)
                if (m.p(s, a, s2) != 0.0) tw.row(s, a, s2, m.p(s, a, s2));
    csv::Writer rw(rewards_path, "s,a,rbar");
    for (int s = 0; s < m.n_states; ++s)
        for (int a = 0; a < m.n_actions; ++a) rw.row(s, a, m.r(s, a));
}

TabularMDP load_mdp_csv(const std::string& transitions_path, const std::string& rewards_path,
                        double gamma) {
    auto trows = csv::read_rows(transitions_path, "s,a,s_next,prob");
    auto rrows = csv::read_rows(rewards_path, "s,a,rbar");
    int n_states = 0, n_actions = 0;
    for (const auto& r : trows) {
        n_states = std::max({n_states, std::stoi(r[0]) + 1, std::stoi(r[2]) + 1});
        n_actions = std::max(n_actions, std::stoi(r[1]) + 1);
    }
    TabularMDP m = make_mdp(n_states, n_actions, gamma);
    for (const auto& r : trows)
        m.p(std::stoi(r[0]), std::stoi(r[1]), std::stoi(r[2])) = std::stod(r[3]);
    for (const auto& r : rrows) m.r(std::stoi(r[0]), std::stoi(r[1])) = std::stod(r[2]);
    m.validate();
    return m;
}

}  // namespace ltv
