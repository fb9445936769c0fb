#include "ltv/sarsa.hpp"

#include <stdexcept>

namespace ltv {

void validate(const TrainerConfig& cfg) {
    if (cfg.batch_size <= 0) throw std::invalid_argument("invalid-config: batch_size");
    if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0))
        throw std::invalid_argument("invalid-config: gamma outside [0,1)");
    if (cfg.target_sync_k < 1) throw std::invalid_argument("invalid-config: target_sync_k");
    if (cfg.step.c <= 0.0 || cfg.step.k0 <= 0.0)
        throw std::invalid_argument("invalid-config: step schedule");
}

double TabularTrainer::train_step(const ReplayBuffer<Transition>& buffer) {
    if (buffer.empty()) throw std::runtime_error("empty-buffer");
    const int n = cfg_.batch_size;
    const double alpha = cfg_.step.at(steps_);
    const double inv_n = 1.0 / static_cast<double>(n);

    // all deltas against the pre-update theta (semi-gradient: y from theta^-)
    std::vector<const Transition*> batch(n);
    for (int j = 0; j < n; ++j) batch[j] = &buffer.sample(st_);
    double loss = 0.0;
    std::vector<std::pair<size_t, double>> corr(n);
    for (int j = 0; j < n; ++j) {
        const Transition& d = *batch[j];
        const double y = compute_target(d, q_, cfg_.gamma);
        const double delta = y - q_.value(d.s, d.a);
        loss += delta * delta;
        corr[j] = {static_cast<size_t>(d.s) * q_.n_actions + d.a, delta};
    }
    for (const auto& [idx, delta] : corr) q_.theta[idx] += alpha * inv_n * delta;

    ++steps_;
    if (steps_ % static_cast<size_t>(cfg_.target_sync_k) == 0) q_.sync_target();
    return loss;
}

double MlpTrainer::train_step(const ReplayBuffer<FeatTransition>& buffer) {
    if (buffer.empty()) throw std::runtime_error("empty-buffer");
    const int n = cfg_.batch_size;
    const double alpha = cfg_.step.at(steps_);

    std::vector<const std::vector<double>*> xs(n);
    std::vector<double> ys(n);
    for (int j = 0; j < n; ++j) {
        const FeatTransition& d = buffer.sample(st_);
        xs[j] = &d.x;
        ys[j] = compute_target(d, q_, cfg_.gamma);
    }
    std::vector<double> grad;
    const double loss = batch_semigrad(q_, xs, ys, grad);
    auto& theta = q_.params();
    for (size_t k = 0; k < theta.size(); ++k) theta[k] -= alpha * grad[k];

    ++steps_;
    if (steps_ % static_cast<size_t>(cfg_.target_sync_k) == 0) q_.sync_target();
    return loss;
}

}  // namespace ltv
