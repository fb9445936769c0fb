#pragma once

#include <functional>
#include <vector>

#include "ltv/qfunction.hpp"
#include "ltv/replay.hpp"
#include "ltv/rng.hpp"

// On-policy Q-estimation: replay sampling, gamma^tau-discounted targets from the
// frozen copy, batch-mean semi-gradient updates, periodic target sync.
//
// Conventions (they interlock; see README): the descended objective is
// L = (1/(2N)) sum_j (y_j - Q_theta(s_j,a_j))^2 with targets y held constant, so a
// tabular batch of one at step size 1 sets Q(s,a) exactly to y, and the prescribed
// decaying schedules are stable for any batch size. The scalar loss train_step
// RETURNS is sum_j (y_j - Q)^2 (the conventional sum-of-squares readout).

namespace ltv {

// (s, a, r, s', a', tau) with the dummy terminal pair flagged out-of-band
struct Transition {
    int s = 0, a = 0;
    double r = 0.0;
    int s2 = 0, a2 = 0;
    int tau = 0;
    bool terminal = false;
};

// featurized form: x = features(s,a), x2 = features(s',a')
struct FeatTransition {
    std::vector<double> x;
    double r = 0.0;
    std::vector<double> x2;
    int tau = 0;
    bool terminal = false;
};

// gamma^tau by repeated multiplication (std::pow is not exact for small integer powers)
inline double pow_gamma(double gamma, int tau) {
    double p = 1.0;
    for (int i = 0; i < tau; ++i) p *= gamma;
    return p;
}

inline double compute_target(const Transition& d, const TabularQ& q, double gamma) {
    if (d.terminal) return d.r;
    return d.r + pow_gamma(gamma, d.tau) * q.target_value(d.s2, d.a2);
}

inline double compute_target(const FeatTransition& d, const MlpQ& q, double gamma) {
    if (d.terminal) return d.r;
    return d.r + pow_gamma(gamma, d.tau) * q.target_value(d.x2);
}

// alpha_k = c / (1 + k / k0), k = completed steps (so the first step uses c)
struct StepSchedule {
    double c = 0.5;
    double k0 = 1000.0;
    double at(size_t k) const { return c / (1.0 + static_cast<double>(k) / k0); }
};

struct TrainerConfig {
    int batch_size = 32;
    StepSchedule step;
    double gamma = 0.8;
    int target_sync_k = 100;   // theta^- <- theta every k-th step, after the update
    size_t total_steps = 0;    // used by fit()
    size_t buffer_capacity = 1'000'000;
    uint64_t seed = 0;
};

void validate(const TrainerConfig& cfg);

class TabularTrainer {
public:
    TabularTrainer(TabularQ q, const TrainerConfig& cfg)
        : q_(std::move(q)), cfg_(cfg), st_(cfg.seed, 0x747261696e) {
        validate(cfg_);
    }

    // one training iteration: sample batch, targets from theta^-, batch-mean
    // semi-gradient step, then sync if due; returns sum_j (y_j - Q)^2
    double train_step(const ReplayBuffer<Transition>& buffer);

    TabularQ& q() { return q_; }
    const TabularQ& q() const { return q_; }
    size_t steps_done() const { return steps_; }

private:
    TabularQ q_;
    TrainerConfig cfg_;
    rng::Stream st_;
    size_t steps_ = 0;
};

class MlpTrainer {
public:
    MlpTrainer(MlpQ q, const TrainerConfig& cfg)
        : q_(std::move(q)), cfg_(cfg), st_(cfg.seed, 0x747261696e) {
        validate(cfg_);
    }

    double train_step(const ReplayBuffer<FeatTransition>& buffer);

    MlpQ& q() { return q_; }
    const MlpQ& q() const { return q_; }
    size_t steps_done() const { return steps_; }

private:
    MlpQ q_;
    TrainerConfig cfg_;
    rng::Stream st_;
    size_t steps_ = 0;
};

// Runs cfg.total_steps iterations, pushing whatever the source yields before each
// step (empty vectors are fine once the buffer is nonempty). on_step, if given,
// sees (step index starting at 1, reported loss) — hook for curve CSVs.
template <class Trainer, class Buffer, class Source>
void fit(Trainer& trainer, Buffer& buffer, Source&& source, size_t total_steps,
         const std::function<void(size_t, double)>& on_step = {}) {
    for (size_t t = 1; t <= total_steps; ++t) {
        for (auto& tup : source(t)) buffer.push(std::move(tup));
        if (buffer.empty()) continue;  // nothing to learn from yet
        const double loss = trainer.train_step(buffer);
        if (on_step) on_step(t, loss);
    }
}

}  // namespace ltv
