#pragma once

#include <cstdint>
#include <vector>

// State-action value estimators: a tabular table and a small fully connected
// network (two ReLU hidden layers, scalar output) over concatenated state/item
// features. Both carry an explicit frozen target copy that changes only via
// sync_target. The dummy terminal pair (s*, a*) is represented out-of-band:
// value paths take a `terminal` flag and return exactly 0 for it, so no
// training schedule can move it.

namespace ltv {

struct TabularQ {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> theta;         // [s][a]
    std::vector<double> theta_target;

    TabularQ() = default;
    TabularQ(int s, int a)
        : n_states(s), n_actions(a),
          theta(static_cast<size_t>(s) * a, 0.0), theta_target(theta) {}

    double value(int s, int a, bool terminal = false) const {
        return terminal ? 0.0 : theta[static_cast<size_t>(s) * n_actions + a];
    }
    double target_value(int s, int a, bool terminal = false) const {
        return terminal ? 0.0 : theta_target[static_cast<size_t>(s) * n_actions + a];
    }
    void sync_target() { theta_target = theta; }
};

struct MlpConfig {
    int input_dim = 0;
    int hidden1 = 64;
    int hidden2 = 64;
};

class MlpQ {
public:
    MlpQ() = default;
    // symmetric uniform init scaled by fan-in, deterministic under seed
    MlpQ(const MlpConfig& cfg, uint64_t seed);

    double value(const std::vector<double>& x, bool terminal = false) const {
        return terminal ? 0.0 : forward(theta_, x.data());
    }
    double target_value(const std::vector<double>& x, bool terminal = false) const {
        return terminal ? 0.0 : forward(theta_target_, x.data());
    }
    void sync_target() { theta_target_ = theta_; }

    // grad += coeff * dQ/dtheta at input x (single sample; grad has n_params slots)
    void accumulate_grad(const std::vector<double>& x, double coeff, double* grad) const;

    size_t n_params() const { return theta_.size(); }
    const MlpConfig& config() const { return cfg_; }
    std::vector<double>& params() { return theta_; }
    const std::vector<double>& params() const { return theta_; }
    std::vector<double>& target_params() { return theta_target_; }
    const std::vector<double>& target_params() const { return theta_target_; }

private:
    double forward(const std::vector<double>& th, const double* x) const;
    MlpConfig cfg_;
    std::vector<double> theta_, theta_target_;
};

// Batch semi-gradient of L(theta) = (1/(2N)) sum_j (y_j - Q(x_j))^2 with y held
// constant: g = (1/N) sum_j (Q(x_j) - y_j) * dQ/dtheta(x_j). The parallel kernel
// writes per-tuple gradient slabs and reduces them serially in tuple order, so
// its output is bitwise identical to the serial reference at any thread count.
// Returns the reported loss sum_j (y_j - Q(x_j))^2 (the scalar logged in curves).
double batch_semigrad(const MlpQ& q, const std::vector<const std::vector<double>*>& xs,
                      const std::vector<double>& ys, std::vector<double>& grad);
double batch_semigrad_serial(const MlpQ& q, const std::vector<const std::vector<double>*>& xs,
                             const std::vector<double>& ys, std::vector<double>& grad);

}  // namespace ltv
