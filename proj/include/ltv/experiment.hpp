#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ltv/env.hpp"
#include "ltv/policy.hpp"
#include "ltv/sarsa.hpp"

// A/B-style simulation comparing pi_base vs pi_mod. The enrolled users (a
// `split` fraction of the population) are simulated under BOTH policies in twin
// environments sharing every per-(user, period) random stream, so identical
// policies produce identical trajectories and exactly zero lift. Q-hat trains
// online on the pipeline's tuples (control-arm data by default, since the
// estimator targets the base policy's own value) and the test arm serves from
// a snapshot refreshed once per period.

namespace ltv {

enum class DataRegime { kBase, kMod };

struct ExperimentConfig {
    TabularEnvConfig env;
    TrainerConfig trainer;
    double alpha = 0.96;
    double tune_cap = 0.0;      // > 0: pick alpha by contribution cap before the A/B run
    int n_seeds = 30;
    int n_periods = 42;
    double split = 0.4;         // enrolled fraction of the population
    int h = 15;
    int steps_per_period = 300;
    int week_len = 7;
    DataRegime data_regime = DataRegime::kBase;

    void validate() const;
};

struct MetricsRow {
    int seed = 0;
    std::string scope;          // "day" | "week"
    int index = 0;              // period or week number
    std::string arm;            // "control" | "test"
    long conversions = 0;
    long impressions = 0;
    double conversion_rate = 0.0;
    // relative change vs the matched control row; 0 on control rows
    double conv_lift = 0.0;
    double rate_lift = 0.0;
};

struct SeedTotals {
    int seed = 0;
    long conv_control = 0, conv_test = 0;
    long imp_control = 0, imp_test = 0;
    double conv_lift = 0.0, rate_lift = 0.0, imp_lift = 0.0;
    double mean_contribution = 0.0;  // realized fraction on test-arm selections
};

struct MeanCI {
    double mean = 0.0;
    double half_width = 0.0;  // 1.96 * sd / sqrt(n)
    double lo() const { return mean - half_width; }
    double hi() const { return mean + half_width; }
};

MeanCI mean_ci(const std::vector<double>& xs);

struct ABResult {
    double alpha = 0.0;  // the alpha actually served (after tuning, if requested)
    std::vector<MetricsRow> rows;
    std::vector<SeedTotals> seeds;
    MeanCI conv_lift, rate_lift, imp_lift;
    double mean_contribution = 0.0;
};

ABResult run_ab(const ExperimentConfig& cfg);
SeedTotals run_ab_seed(const ExperimentConfig& cfg, int seed, double alpha,
                       std::vector<MetricsRow>* rows_out);

struct SweepRow {
    double alpha = 0.0;
    MeanCI conv_lift, rate_lift;
    double mean_contribution = 0.0;
};

// one run_ab block per alpha on shared seeds
std::vector<SweepRow> sweep_alpha(const ExperimentConfig& cfg, const std::vector<double>& alphas);

// Trains Q-hat on a control-only run, then applies the policy-level grid rule on
// logged states: tuned on even-indexed samples, realized fraction reported on the
// odd-indexed held-out half.
struct TuneResult {
    double alpha = 0.0;
    double tuned_fraction = 0.0;     // mean on the tuning half
    double holdout_fraction = 0.0;   // realized mean on the held-out half
};
TuneResult tune_alpha_on_env(const ExperimentConfig& cfg, double cap);

// writes <dir>/ab_daily.csv, <dir>/ab_weekly.csv, <dir>/ab_summary.csv
// (byte-stable across reruns; throws on an empty table)
void report(const ABResult& res, const std::string& out_dir);
void report_sweep(const std::vector<SweepRow>& rows, const std::string& out_dir);

}  // namespace ltv
