#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

// Sliding h-period buffer table over logged interactions, per-period
// classification (New / Active / Inactive / Carryover), and TransitionTuple
// emission, plus the offline whole-trajectory reference scanner used as its
// oracle. Pairing joins consecutive interactions of a user at gap tau <= h;
// a record whose successor arrives at gap h+1 — or never — terminates with the
// dummy pair instead (tau would otherwise escape [1, h]). The payload types are
// generic: tabular mode carries state indices, vector mode carries features.

namespace ltv {

template <class S>
struct Interaction {
    int t = 0;
    int64_t user_id = 0;
    S s{};
    int a = 0;
    double r = 0.0;
};

template <class S>
struct RawTuple {
    S s{};
    int a = 0;
    double r = 0.0;
    S s2{};
    int a2 = 0;
    int tau = 0;      // 0 on terminal tuples
    bool terminal = false;
};

enum class UserClass { kNew, kActive, kInactive, kCarryover };

template <class S>
class BufferTable {
public:
    explicit BufferTable(int h) : h_(h) {
        if (h < 1) throw std::invalid_argument("invalid-config: h must be >= 1");
    }

    int h() const { return h_; }
    int current_period() const { return t_cur_; }
    size_t pending_users() const { return latest_.size(); }

    // Labels a user for the next period (reporting; ingest is authoritative).
    // Inactive means the latest (hence only: older hits already left the window)
    // in-window interaction sits at t-h and is about to fall out unpaired.
    UserClass classify(int64_t u, int t_next, bool interacted_now) const {
        if (t_next != t_cur_ + 1) throw std::invalid_argument("out-of-order-period");
        const auto it = latest_.find(u);
        const bool in_window = it != latest_.end();
        if (interacted_now) return in_window ? UserClass::kActive : UserClass::kNew;
        if (in_window && it->second.t == t_cur_ - h_) return UserClass::kInactive;
        return UserClass::kCarryover;
    }

    // Processes one period's records (all stamped t_cur+1). Active heads at gap <= h
    // pair into non-terminal tuples; heads reaching age h+1 emit exactly one terminal.
    std::vector<RawTuple<S>> ingest(const std::vector<Interaction<S>>& period_data, int t_next) {
        if (t_next != t_cur_ + 1) throw std::invalid_argument("out-of-order-period");
        std::vector<RawTuple<S>> out;

        std::map<int64_t, const Interaction<S>*> now;
        for (const auto& rec : period_data) {
            if (rec.t != t_next) throw std::invalid_argument("out-of-order-period");
            if (!now.emplace(rec.user_id, &rec).second)
                throw std::invalid_argument("duplicate-user-period");
        }

        for (const auto& rec : period_data) {
            auto it = latest_.find(rec.user_id);
            if (it != latest_.end()) {
                const Head& head = it->second;
                const int gap = t_next - head.t;
                if (gap <= h_) {
                    out.push_back({head.s, head.a, head.r, rec.s, rec.a, gap, false});
                } else {
                    out.push_back({head.s, head.a, head.r, S{}, 0, 0, true});
                }
            }
            latest_[rec.user_id] = Head{t_next, rec.s, rec.a, rec.r};
        }

        // silent users whose head falls out of the new window {t_next-h, ..., t_next}
        std::vector<int64_t> expired;
        for (const auto& [u, head] : latest_)
            if (head.t < t_next - h_) expired.push_back(u);
        for (int64_t u : expired) {
            const Head& head = latest_[u];
            out.push_back({head.s, head.a, head.r, S{}, 0, 0, true});
            latest_.erase(u);
        }

        window_.push_back(now_records(period_data));
        while (static_cast<int>(window_.size()) > h_ + 1) window_.pop_front();
        t_cur_ = t_next;
        return out;
    }

    // periods currently held, newest last; spans {t-h, ..., t} once warmed up
    int window_span() const { return static_cast<int>(window_.size()); }

    // drains pending heads by ingesting empty periods until none remain
    std::vector<RawTuple<S>> flush() {
        std::vector<RawTuple<S>> out;
        while (!latest_.empty()) {
            auto part = ingest({}, t_cur_ + 1);
            out.insert(out.end(), part.begin(), part.end());
        }
        return out;
    }

private:
    struct Head {
        int t = 0;
        S s{};
        int a = 0;
        double r = 0.0;
    };
    struct Rec {
        S s{};
        int a = 0;
        double r = 0.0;
    };

    std::map<int64_t, Rec> now_records(const std::vector<Interaction<S>>& period_data) const {
        std::map<int64_t, Rec> m;
        for (const auto& rec : period_data) m.emplace(rec.user_id, Rec{rec.s, rec.a, rec.r});
        return m;
    }

    int h_;
    int t_cur_ = -1;
    std::deque<std::map<int64_t, Rec>> window_;  // back = period t_cur_
    std::map<int64_t, Head> latest_;
};

// Offline oracle: per user, consecutive interaction pairs at gap <= h become
// non-terminal tuples; records with no successor within h periods become terminals.
template <class S>
std::vector<RawTuple<S>> reference_scan(const std::vector<Interaction<S>>& logs, int h) {
    if (h < 1) throw std::invalid_argument("invalid-config: h must be >= 1");
    std::map<int64_t, std::map<int, const Interaction<S>*>> per_user;
    for (const auto& rec : logs)
        if (!per_user[rec.user_id].emplace(rec.t, &rec).second)
            throw std::invalid_argument("duplicate-user-period");
    std::vector<RawTuple<S>> out;
    for (const auto& [u, times] : per_user) {
        const Interaction<S>* prev = nullptr;
        for (const auto& [t, rec] : times) {
            if (prev) {
                const int gap = t - prev->t;
                if (gap <= h)
                    out.push_back({prev->s, prev->a, prev->r, rec->s, rec->a, gap, false});
                else
                    out.push_back({prev->s, prev->a, prev->r, S{}, 0, 0, true});
            }
            prev = rec;
        }
        if (prev) out.push_back({prev->s, prev->a, prev->r, S{}, 0, 0, true});
    }
    return out;
}

// tabular aliases + CSV interchange
using TabInteraction = Interaction<int>;
using TabTuple = RawTuple<int>;

// accepts header "t,user_id,state_repr,item_id,reward" (pipeline form) or
// "t,user_id,state_repr,item_id,converted" (environment dump form)
std::vector<TabInteraction> load_logs_csv(const std::string& path);
void save_logs_csv(const std::vector<TabInteraction>& logs, const std::string& path,
                   bool converted_header = false);
void save_tuples_csv(const std::vector<TabTuple>& tuples, const std::string& path);

}  // namespace ltv
