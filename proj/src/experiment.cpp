#include "ltv/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "ltv/csv.hpp"
#include "ltv/dp.hpp"
#include "ltv/pipeline.hpp"
#include "ltv/replay.hpp"

namespace ltv {

void ExperimentConfig::validate() const {
    env.validate();
    ltv::validate(trainer);
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("invalid-config: alpha");
    if (!(split > 0.0 && split < 1.0)) throw std::invalid_argument("invalid-config: split");
    if (n_seeds < 1) throw std::invalid_argument("invalid-config: n_seeds");
    if (n_periods < 1) throw std::invalid_argument("invalid-config: n_periods");
    if (h < 1) throw std::invalid_argument("invalid-config: h");
    if (steps_per_period < 0) throw std::invalid_argument("invalid-config: steps_per_period");
    if (week_len < 1) throw std::invalid_argument("invalid-config: week_len");
    if (tune_cap < 0.0 || tune_cap > 1.0) throw std::invalid_argument("invalid-config: tune_cap");
    if (std::llround(split * env.n_users) < 1)
        throw std::invalid_argument("invalid-config: no enrolled users");
}

MeanCI mean_ci(const std::vector<double>& xs) {
    MeanCI out;
    const size_t n = xs.size();
    if (n == 0) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / static_cast<double>(n);
    if (n < 2) return out;
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    out.half_width = 1.96 * sd / std::sqrt(static_cast<double>(n));
    return out;
}

static double ratio_lift(double test, double control) {
    if (control <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (test - control) / control;
}

namespace {

struct ArmPeriod {
    long conversions = 0;
    long impressions = 0;
};

struct ArmState {
    TabularEnv env;
    std::vector<ArmPeriod> by_period;
    explicit ArmState(const TabularEnvConfig& cfg, int n_periods)
        : env(cfg), by_period(n_periods) {}
};

}  // namespace

SeedTotals run_ab_seed(const ExperimentConfig& cfg, int seed, double alpha,
                       std::vector<MetricsRow>* rows_out) {
    TabularEnvConfig ecfg = cfg.env;
    ecfg.n_users = static_cast<int>(std::llround(cfg.split * cfg.env.n_users));
    ecfg.seed = rng::key(cfg.env.seed, static_cast<uint64_t>(seed));

    ArmState ctrl(ecfg, cfg.n_periods), test(ecfg, cfg.n_periods);
    const ScoringTable scoring = ctrl.env.scoring();
    const int A = ecfg.n_actions();

    TrainerConfig tcfg = cfg.trainer;
    tcfg.seed = rng::key(cfg.trainer.seed, static_cast<uint64_t>(seed), 0x7472);
    TabularTrainer trainer(TabularQ(ecfg.n_states, A), tcfg);
    BufferTable<int> pipe(cfg.h);
    ReplayBuffer<Transition> buffer(tcfg.buffer_capacity);
    Vec qserve(static_cast<size_t>(ecfg.n_states) * A, 0.0);

    double contrib_sum = 0.0;
    long contrib_n = 0;

    for (int t = 0; t < cfg.n_periods; ++t) {
        std::vector<TabInteraction> regime_records;

        // control arm: greedy in f
        {
            const auto active = ctrl.env.active_users(t);
            std::map<int64_t, int> actions;
            for (int64_t u : active) {
                const int s = ctrl.env.state_of(u);
                const auto cands = ctrl.env.candidates(u, t);
                const int a = base_select(cands, [&](int x) { return scoring.f(s, x); });
                actions.emplace(u, a);
                if (cfg.data_regime == DataRegime::kBase)
                    regime_records.push_back({t, u, s, a, 0.0});
            }
            const auto res = ctrl.env.step(t, actions);
            size_t k = 0;
            for (int64_t u : active) {
                const bool conv = res.at(u).converted;
                ctrl.by_period[t].conversions += conv;
                ctrl.by_period[t].impressions += actions.at(u) != kNoRec;
                if (cfg.data_regime == DataRegime::kBase) regime_records[k].r = conv;
                ++k;
            }
        }

        // test arm: alpha-blend against the current Q snapshot
        {
            const auto active = test.env.active_users(t);
            std::map<int64_t, int> actions;
            const size_t base_idx = regime_records.size();
            for (int64_t u : active) {
                const int s = test.env.state_of(u);
                const auto cands = test.env.candidates(u, t);
                const auto qfn = [&](int x) {
                    return qserve[static_cast<size_t>(s) * A + x];
                };
                const int a =
                    select(cands, [&](int x) { return scoring.f(s, x); }, qfn, alpha);
                actions.emplace(u, a);
                const double fv = scoring.f(s, a), qv = qfn(a);
                if ((1.0 - alpha) * fv + alpha * qv > 0.0) {
                    contrib_sum += contribution_fraction(fv, qv, alpha);
                    ++contrib_n;
                }
                if (cfg.data_regime == DataRegime::kMod)
                    regime_records.push_back({t, u, s, a, 0.0});
            }
            const auto res = test.env.step(t, actions);
            size_t k = base_idx;
            for (int64_t u : active) {
                const bool conv = res.at(u).converted;
                test.by_period[t].conversions += conv;
                test.by_period[t].impressions += actions.at(u) != kNoRec;
                if (cfg.data_regime == DataRegime::kMod) regime_records[k].r = conv;
                ++k;
            }
        }

        for (auto& tup : pipe.ingest(regime_records, t))
            buffer.push(Transition{tup.s, tup.a, tup.r, tup.s2, tup.a2, tup.tau, tup.terminal});
        if (!buffer.empty())
            for (int k = 0; k < cfg.steps_per_period; ++k) trainer.train_step(buffer);
        qserve = trainer.q().theta;  // serving snapshot refreshes once per period
    }

    SeedTotals totals;
    totals.seed = seed;
    for (int t = 0; t < cfg.n_periods; ++t) {
        totals.conv_control += ctrl.by_period[t].conversions;
        totals.imp_control += ctrl.by_period[t].impressions;
        totals.conv_test += test.by_period[t].conversions;
        totals.imp_test += test.by_period[t].impressions;
    }
    totals.conv_lift = ratio_lift(totals.conv_test, totals.conv_control);
    const double rate_c = totals.imp_control > 0
                              ? static_cast<double>(totals.conv_control) / totals.imp_control
                              : 0.0;
    const double rate_t =
        totals.imp_test > 0 ? static_cast<double>(totals.conv_test) / totals.imp_test : 0.0;
    totals.rate_lift = ratio_lift(rate_t, rate_c);
    totals.imp_lift = ratio_lift(totals.imp_test, totals.imp_control);
    totals.mean_contribution = contrib_n ? contrib_sum / static_cast<double>(contrib_n) : 0.0;

    if (rows_out) {
        auto emit = [&](const std::string& scope, int index, const ArmPeriod& c,
                        const ArmPeriod& x) {
            const double rc = c.impressions ? static_cast<double>(c.conversions) / c.impressions
                                            : 0.0;
            const double rt = x.impressions ? static_cast<double>(x.conversions) / x.impressions
                                            : 0.0;
            rows_out->push_back(
                {seed, scope, index, "control", c.conversions, c.impressions, rc, 0.0, 0.0});
            rows_out->push_back({seed, scope, index, "test", x.conversions, x.impressions, rt,
                                 ratio_lift(x.conversions, c.conversions), ratio_lift(rt, rc)});
        };
        for (int t = 0; t < cfg.n_periods; ++t) emit("day", t, ctrl.by_period[t], test.by_period[t]);
        for (int w = 0; w * cfg.week_len < cfg.n_periods; ++w) {
            ArmPeriod c, x;
            for (int t = w * cfg.week_len; t < std::min((w + 1) * cfg.week_len, cfg.n_periods);
                 ++t) {
                c.conversions += ctrl.by_period[t].conversions;
                c.impressions += ctrl.by_period[t].impressions;
                x.conversions += test.by_period[t].conversions;
                x.impressions += test.by_period[t].impressions;
            }
            emit("week", w, c, x);
        }
    }
    return totals;
}

ABResult run_ab(const ExperimentConfig& cfg) {
    cfg.validate();
    ABResult res;
    res.alpha = cfg.tune_cap > 0.0 ? tune_alpha_on_env(cfg, cfg.tune_cap).alpha : cfg.alpha;

    std::vector<std::vector<MetricsRow>> per_seed_rows(cfg.n_seeds);
    res.seeds.resize(cfg.n_seeds);
#pragma omp parallel for schedule(dynamic)
    for (int seed = 0; seed < cfg.n_seeds; ++seed)
        res.seeds[seed] = run_ab_seed(cfg, seed, res.alpha, &per_seed_rows[seed]);

    std::vector<double> conv, rate, imp, contrib;
    for (const auto& st : res.seeds) {
        conv.push_back(st.conv_lift);
        rate.push_back(st.rate_lift);
        imp.push_back(st.imp_lift);
        contrib.push_back(st.mean_contribution);
    }
    res.conv_lift = mean_ci(conv);
    res.rate_lift = mean_ci(rate);
    res.imp_lift = mean_ci(imp);
    res.mean_contribution = mean_ci(contrib).mean;
    for (auto& rows : per_seed_rows)
        res.rows.insert(res.rows.end(), rows.begin(), rows.end());
    return res;
}

std::vector<SweepRow> sweep_alpha(const ExperimentConfig& cfg,
                                  const std::vector<double>& alphas) {
    cfg.validate();
    std::vector<SweepRow> out;
    for (double a : alphas) {
        if (a < 0.0 || a > 1.0) throw std::invalid_argument("invalid-alpha");
        ExperimentConfig c = cfg;
        c.alpha = a;
        c.tune_cap = 0.0;
        const ABResult r = run_ab(c);  // same seeds for every alpha
        out.push_back({a, r.conv_lift, r.rate_lift, r.mean_contribution});
    }
    return out;
}

TuneResult tune_alpha_on_env(const ExperimentConfig& cfg, double cap) {
    // control-only rollout: train Q-hat on base-policy tuples and log visited states
    TabularEnvConfig ecfg = cfg.env;
    ecfg.n_users = static_cast<int>(std::llround(cfg.split * cfg.env.n_users));
    ecfg.seed = rng::key(cfg.env.seed, 0x74756e65);
    TabularEnv env(ecfg);
    const ScoringTable scoring = env.scoring();
    const int A = ecfg.n_actions();

    TrainerConfig tcfg = cfg.trainer;
    tcfg.seed = rng::key(cfg.trainer.seed, 0x74756e65);
    TabularTrainer trainer(TabularQ(ecfg.n_states, A), tcfg);
    BufferTable<int> pipe(cfg.h);
    ReplayBuffer<Transition> buffer(tcfg.buffer_capacity);

    std::vector<TuneSample> samples;
    for (int t = 0; t < cfg.n_periods; ++t) {
        const auto active = env.active_users(t);
        std::map<int64_t, int> actions;
        std::vector<TabInteraction> records;
        for (int64_t u : active) {
            const int s = env.state_of(u);
            const auto cands = env.candidates(u, t);
            const int a = base_select(cands, [&](int x) { return scoring.f(s, x); });
            actions.emplace(u, a);
            records.push_back({t, u, s, a, 0.0});
            samples.push_back({s, cands});
        }
        const auto res = env.step(t, actions);
        size_t k = 0;
        for (int64_t u : active) records[k++].r = res.at(u).converted;
        for (auto& tup : pipe.ingest(records, t))
            buffer.push(Transition{tup.s, tup.a, tup.r, tup.s2, tup.a2, tup.tau, tup.terminal});
        if (!buffer.empty())
            for (int k2 = 0; k2 < cfg.steps_per_period; ++k2) trainer.train_step(buffer);
    }
    if (samples.empty()) throw std::runtime_error("empty-sample: no interactions logged");

    std::vector<TuneSample> tune_half, holdout_half;
    for (size_t i = 0; i < samples.size(); ++i)
        (i % 2 == 0 ? tune_half : holdout_half).push_back(std::move(samples[i]));
    if (holdout_half.empty()) holdout_half = tune_half;

    const auto& q = trainer.q();
    const auto f_fn = [&](int s, int a) { return scoring.f(s, a); };
    const auto q_fn = [&](int s, int a) { return q.value(s, a); };
    TuneResult out;
    out.alpha = tune_alpha(tune_half, f_fn, q_fn, cap);
    out.tuned_fraction = mean_contribution(tune_half, f_fn, q_fn, out.alpha);
    out.holdout_fraction = mean_contribution(holdout_half, f_fn, q_fn, out.alpha);
    return out;
}

void report(const ABResult& res, const std::string& out_dir) {
    if (res.rows.empty()) throw std::runtime_error("io-failure: empty metrics table");
    csv::Writer daily(out_dir + "/ab_daily.csv", "seed,period,arm,conversions,impressions,"
                                                 "conversion_rate,conv_lift,rate_lift");
    csv::Writer weekly(out_dir + "/ab_weekly.csv", "seed,week,arm,conversions,impressions,"
                                                   "conversion_rate,conv_lift,rate_lift");
    for (const auto& r : res.rows) {
        auto& w = r.scope == "day" ? daily : weekly;
        w.row(r.seed, r.index, r.arm, r.conversions, r.impressions, r.conversion_rate,
              r.conv_lift, r.rate_lift);
    }
    csv::Writer seeds(out_dir + "/ab_seeds.csv",
                      "seed,conv_control,conv_test,imp_control,imp_test,conv_lift,rate_lift,"
                      "imp_lift,mean_contribution");
    for (const auto& s : res.seeds)
        seeds.row(s.seed, s.conv_control, s.conv_test, s.imp_control, s.imp_test, s.conv_lift,
                  s.rate_lift, s.imp_lift, s.mean_contribution);
    csv::Writer summary(out_dir + "/ab_summary.csv",
                        "alpha,n_seeds,conv_lift_mean,conv_lift_ci95,rate_lift_mean,"
                        "rate_lift_ci95,imp_lift_mean,mean_contribution");
    summary.row(res.alpha, res.seeds.size(), res.conv_lift.mean, res.conv_lift.half_width,
                res.rate_lift.mean, res.rate_lift.half_width, res.imp_lift.mean,
                res.mean_contribution);
}

void report_sweep(const std::vector<SweepRow>& rows, const std::string& out_dir) {
    if (rows.empty()) throw std::runtime_error("io-failure: empty sweep table");
    csv::Writer w(out_dir + "/sweep.csv",
                  "alpha,conv_lift_mean,conv_lift_ci95,rate_lift_mean,rate_lift_ci95,"
                  "mean_contribution");
    for (const auto& r : rows)
        w.row(r.alpha, r.conv_lift.mean, r.conv_lift.half_width, r.rate_lift.mean,
              r.rate_lift.half_width, r.mean_contribution);
}

}  // namespace ltv
