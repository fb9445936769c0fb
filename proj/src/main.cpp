#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ltv/checkpoint.hpp"
#include "ltv/config.hpp"
#include "ltv/csv.hpp"
#include "ltv/dp.hpp"
#include "ltv/experiment.hpp"
#include "ltv/pipeline.hpp"

namespace {

using namespace ltv;

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

// randomized end-to-end check that the alpha-blend policy never loses value
int cmd_verify(int instances, int s_min, int s_max, int a_min, int a_max, double gamma,
               const std::string& alphas_csv, uint64_t seed, double perturb_q,
               const std::string& margins_csv, bool dp_checks) {
    const auto alphas = parse_list(alphas_csv);
    int violations = 0, checked = 0;
    double worst_value = 1e300, worst_margin = 1e300;
    for (int i = 0; i < instances; ++i) {
        rng::Stream pick(rng::key(seed, i), 0x766572);
        const int S = s_min + static_cast<int>(pick.next_below(s_max - s_min + 1));
        const int A = a_min + static_cast<int>(pick.next_below(a_max - a_min + 1));
        const TabularMDP m = random_mdp(rng::key(seed, i, 1), S, A, gamma);
        const ScoringTable sc = random_scoring(rng::key(seed, i, 2), S, A);
        Mask mask = full_mask(S, A);
        for (int s = 0; s < S; ++s)  // random ineligibility, NO_REC always kept
            for (int a = 1; a < A; ++a)
                if (pick.next_u01() < 0.25) mask[static_cast<size_t>(s) * A + a] = 0;
        for (double alpha : alphas) {
            const auto rep = verify_improvement(m, sc.f_table(), mask, alpha, 1e-9, 1e-12,
                                                perturb_q, rng::key(seed, i, 3));
            ++checked;
            for (int s = 0; s < S; ++s) {
                worst_value = std::min(worst_value, rep.value_margin[s]);
                if (rep.pi_base[s] != rep.pi_mod[s])
                    worst_margin = std::min(worst_margin, rep.improvement_margin[s]);
            }
            if (!rep.value_ok || !rep.margin_ok || !rep.strict_ok) ++violations;
            if (!margins_csv.empty() && i == 0 && alpha == alphas.front())
                save_margins_csv(rep, margins_csv);
        }
        if (dp_checks && i < 50) {
            const PolicyVec mu = greedy_policy(sc.f_table(), S, A, mask);
            const Vec vi = evaluate(m, mu, 1e-10);
            const Vec vl = evaluate_linear(m, mu);
            double gap = 0.0;
            for (int s = 0; s < S; ++s) gap = std::max(gap, std::abs(vi[s] - vl[s]));
            if (gap > 1e-8) {
                std::printf("dp-crosscheck violation on instance %d: gap %.3e\n", i, gap);
                ++violations;
            }
        }
    }
    std::printf("verify: %d policy checks on %d instances, %d violations\n", checked, instances,
                violations);
    std::printf("  min value margin   %.3e\n", worst_value);
    std::printf("  min one-step margin at differing states %.3e\n", worst_margin);
    return violations ? 1 : 0;
}

int cmd_train(const ExperimentConfig& cfg, size_t steps, const std::string& checkpoint_path,
              const std::string& curve_path, size_t eval_every) {
    // control-arm rollout feeding the pairing pipeline, exact-DP error as the curve
    TabularEnvConfig ecfg = cfg.env;
    ecfg.seed = rng::key(cfg.env.seed, 0x7472616e);
    TabularEnv env(ecfg);
    const ScoringTable scoring = env.scoring();
    const int S = ecfg.n_states, A = ecfg.n_actions();

    const TabularMDP m = env.as_tabular(cfg.trainer.gamma);
    const PolicyVec pi_base = greedy_policy(scoring.f_table(), S, A, env.static_mask());
    // gaps between interactions are geometric in the state's interaction
    // probability and availability dropout randomizes the served action, so the
    // estimator's fixed point is the behavior policy's interaction-clock Q
    const Vec q_exact = q_interaction_clock(m, ecfg.interaction_prob, env.behavior_weights());

    TabularTrainer trainer(TabularQ(S, A), cfg.trainer);
    BufferTable<int> pipe(cfg.h);
    ReplayBuffer<Transition> buffer(cfg.trainer.buffer_capacity);

    csv::Writer curve(curve_path, "step,loss,eval_error");
    std::vector<long> pair_count(static_cast<size_t>(S) * A, 0);
    int t = 0;
    const auto source = [&](size_t) {
        std::vector<Transition> out;
        if (t >= cfg.n_periods) return out;  // after the horizon, keep training on the buffer
        const auto active = env.active_users(t);
        std::map<int64_t, int> actions;
        std::vector<TabInteraction> records;
        for (int64_t u : active) {
            const int s = env.state_of(u);
            const int a = base_select(env.candidates(u, t),
                                      [&](int x) { return scoring.f(s, x); });
            actions.emplace(u, a);
            records.push_back({t, u, s, a, 0.0});
        }
        const auto res = env.step(t, actions);
        size_t k = 0;
        for (int64_t u : active) records[k++].r = res.at(u).converted;
        for (auto& tup : pipe.ingest(records, t)) {
            out.push_back({tup.s, tup.a, tup.r, tup.s2, tup.a2, tup.tau, tup.terminal});
            if (!tup.terminal) ++pair_count[static_cast<size_t>(tup.s) * A + tup.a];
        }
        ++t;
        return out;
    };
    // sup error over pairs the behavior policy actually covers: on-policy data
    // says nothing about pairs it rarely visits, so a raw sup-norm only measures
    // the initializer there
    constexpr long kMinSamples = 1000;
    const auto covered_err = [&] {
        double err = 0.0;
        for (size_t i = 0; i < pair_count.size(); ++i)
            if (pair_count[i] >= kMinSamples)
                err = std::max(err, std::abs(trainer.q().theta[i] - q_exact[i]));
        return err;
    };
    const auto on_step = [&](size_t k, double loss) {
        if (k % eval_every != 0 && k != steps) return;
        curve.row(k, loss, covered_err());
    };
    fit(trainer, buffer, source, steps, on_step);

    save_checkpoint(trainer.q(), checkpoint_path);
    long covered = 0;
    for (long c : pair_count) covered += c >= kMinSamples;
    std::printf("train: %zu steps, %zu tuples buffered, sup error %.4f over %ld/%d covered pairs\n",
                trainer.steps_done(), buffer.size(), covered_err(), covered, S * A);
    std::printf("  checkpoint -> %s\n  curve -> %s\n", checkpoint_path.c_str(),
                curve_path.c_str());
    return 0;
}

int cmd_ab(const ExperimentConfig& cfg, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const ABResult res = run_ab(cfg);
    report(res, out_dir);
    std::printf("ab: alpha %.4f over %d seeds\n", res.alpha, cfg.n_seeds);
    std::printf("  conversion lift  %+.4f (95%% CI %+.4f .. %+.4f)\n", res.conv_lift.mean,
                res.conv_lift.lo(), res.conv_lift.hi());
    std::printf("  rate lift        %+.4f (95%% CI %+.4f .. %+.4f)\n", res.rate_lift.mean,
                res.rate_lift.lo(), res.rate_lift.hi());
    std::printf("  impression lift  %+.4f\n", res.imp_lift.mean);
    std::printf("  mean contribution fraction %.4f\n", res.mean_contribution);
    std::printf("  reports -> %s/ab_{daily,weekly,seeds,summary}.csv\n", out_dir.c_str());
    // sanity invariant: the two lifts must agree in sign when significant
    if (res.conv_lift.lo() > 0 && res.rate_lift.hi() < 0) return 1;
    if (res.conv_lift.hi() < 0 && res.rate_lift.lo() > 0) return 1;
    return 0;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& alphas_csv,
              const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const auto rows = sweep_alpha(cfg, parse_list(alphas_csv));
    report_sweep(rows, out_dir);
    for (const auto& r : rows)
        std::printf("alpha %.3f  conv lift %+.4f +/- %.4f  contribution %.4f\n", r.alpha,
                    r.conv_lift.mean, r.conv_lift.half_width, r.mean_contribution);
    std::printf("sweep -> %s/sweep.csv\n", out_dir.c_str());
    return 0;
}

int cmd_tuples(const std::string& logs_path, const std::string& out_path, int h) {
    const auto logs = load_logs_csv(logs_path);
    const auto tuples = reference_scan<int>(logs, h);
    save_tuples_csv(tuples, out_path);
    long terminals = 0;
    for (const auto& tup : tuples) terminals += tup.terminal;
    std::printf("tuples: %zu interactions -> %zu tuples (%ld terminal) -> %s\n", logs.size(),
                tuples.size(), terminals, out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"long-term-value policy toolkit: verification, training, A/B simulation"};
    app.require_subcommand(1);

    std::string config_path;

    auto* verify = app.add_subcommand("verify", "randomized policy-improvement verification");
    int instances = 200, s_min = 5, s_max = 20, a_min = 2, a_max = 10;
    double gamma = 0.8, perturb_q = 0.0;
    std::string alphas = "0.25,0.5,0.96";
    uint64_t vseed = 1;
    std::string margins_csv;
    bool dp_checks = false;
    verify->add_option("--instances", instances);
    verify->add_option("--states-min", s_min);
    verify->add_option("--states-max", s_max);
    verify->add_option("--actions-min", a_min);
    verify->add_option("--actions-max", a_max);
    verify->add_option("--gamma", gamma);
    verify->add_option("--alphas", alphas, "comma-separated alpha values");
    verify->add_option("--seed", vseed);
    verify->add_option("--perturb-q", perturb_q, "sigma of noise injected into the blended Q");
    verify->add_option("--margins-csv", margins_csv, "dump per-state margins of instance 0");
    verify->add_flag("--dp-checks", dp_checks, "cross-check iterative vs linear evaluation");

    auto* train = app.add_subcommand("train", "train the Q-estimator on simulated control data");
    size_t steps = 0, eval_every = 500;
    std::string checkpoint_path = "checkpoint.json", curve_path = "curve.csv";
    train->add_option("--config", config_path, "JSON run configuration");
    train->add_option("--steps", steps, "overrides trainer.total_steps (default 20000)");
    train->add_option("--checkpoint", checkpoint_path);
    train->add_option("--curve", curve_path);
    train->add_option("--eval-every", eval_every);

    auto* ab = app.add_subcommand("ab", "twin-arm A/B simulation");
    std::string out_dir = "out";
    double alpha = -1.0, tune_cap = -1.0;
    int seeds_override = 0, periods_override = 0;
    ab->add_option("--config", config_path, "JSON run configuration");
    ab->add_option("--alpha", alpha, "serve this alpha");
    ab->add_option("--tune-cap", tune_cap, "pick alpha by contribution cap instead");
    ab->add_option("--out", out_dir);
    ab->add_option("--seeds", seeds_override);
    ab->add_option("--periods", periods_override);

    auto* sweep = app.add_subcommand("sweep", "A/B lift across an alpha grid");
    std::string sweep_alphas = "0,0.25,0.5,0.75,0.9,0.96,1.0";
    sweep->add_option("--config", config_path, "JSON run configuration");
    sweep->add_option("--alphas", sweep_alphas);
    sweep->add_option("--out", out_dir);
    sweep->add_option("--seeds", seeds_override);
    sweep->add_option("--periods", periods_override);

    auto* tuples = app.add_subcommand("tuples", "pair an offline interaction log into tuples");
    std::string logs_path, tuples_out = "tuples.csv";
    int h = 15;
    tuples->add_option("--logs", logs_path)->required();
    tuples->add_option("--out", tuples_out);
    tuples->add_option("--horizon", h);

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg =
            config_path.empty() ? ltv::default_config() : ltv::load_config(config_path);
        if (seeds_override > 0) cfg.n_seeds = seeds_override;
        if (periods_override > 0) cfg.n_periods = periods_override;

        if (verify->parsed())
            return cmd_verify(instances, s_min, s_max, a_min, a_max, gamma, alphas, vseed,
                              perturb_q, margins_csv, dp_checks);
        if (train->parsed()) {
            if (steps == 0) steps = cfg.trainer.total_steps > 0 ? cfg.trainer.total_steps : 20000;
            return cmd_train(cfg, steps, checkpoint_path, curve_path, eval_every);
        }
        if (ab->parsed()) {
            if (alpha >= 0.0 && tune_cap >= 0.0)
                throw std::runtime_error("bad-config: --alpha and --tune-cap are exclusive");
            if (alpha >= 0.0) {
                cfg.alpha = alpha;
                cfg.tune_cap = 0.0;
            }
            if (tune_cap >= 0.0) cfg.tune_cap = tune_cap;
            return cmd_ab(cfg, out_dir);
        }
        if (sweep->parsed()) return cmd_sweep(cfg, sweep_alphas, out_dir);
        if (tuples->parsed()) return cmd_tuples(logs_path, tuples_out, h);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
