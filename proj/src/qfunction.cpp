#include "ltv/qfunction.hpp"

#include <cmath>
#include <stdexcept>

#include "ltv/rng.hpp"

namespace ltv {

// parameter layout: W1 [h1 x d], b1 [h1], W2 [h2 x h1], b2 [h2], w3 [h2], b3
static size_t param_count(const MlpConfig& c) {
    return static_cast<size_t>(c.hidden1) * c.input_dim + c.hidden1 +
           static_cast<size_t>(c.hidden2) * c.hidden1 + c.hidden2 + c.hidden2 + 1;
}

MlpQ::MlpQ(const MlpConfig& cfg, uint64_t seed) : cfg_(cfg) {
    if (cfg.input_dim <= 0 || cfg.hidden1 <= 0 || cfg.hidden2 <= 0)
        throw std::invalid_argument("invalid-config: nonpositive layer width");
    theta_.resize(param_count(cfg));
    rng::Stream st(seed, 0x6d6c70);
    size_t i = 0;
    auto fill = [&](size_t n, int fan_in) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (size_t k = 0; k < n; ++k) theta_[i++] = st.next_in(-scale, scale);
    };
    fill(static_cast<size_t>(cfg.hidden1) * cfg.input_dim + cfg.hidden1, cfg.input_dim);
    fill(static_cast<size_t>(cfg.hidden2) * cfg.hidden1 + cfg.hidden2, cfg.hidden1);
    fill(static_cast<size_t>(cfg.hidden2) + 1, cfg.hidden2);
    theta_target_ = theta_;
}

double MlpQ::forward(const std::vector<double>& th, const double* x) const {
    const int d = cfg_.input_dim, h1 = cfg_.hidden1, h2 = cfg_.hidden2;
    const double* w1 = th.data();
    const double* b1 = w1 + static_cast<size_t>(h1) * d;
    const double* w2 = b1 + h1;
    const double* b2 = w2 + static_cast<size_t>(h2) * h1;
    const double* w3 = b2 + h2;
    const double b3 = w3[h2];

    std::vector<double> a1(h1), a2(h2);
    for (int i = 0; i < h1; ++i) {
        double z = b1[i];
        const double* row = w1 + static_cast<size_t>(i) * d;
        for (int j = 0; j < d; ++j) z += row[j] * x[j];
        a1[i] = z > 0.0 ? z : 0.0;
    }
    for (int i = 0; i < h2; ++i) {
        double z = b2[i];
        const double* row = w2 + static_cast<size_t>(i) * h1;
        for (int j = 0; j < h1; ++j) z += row[j] * a1[j];
        a2[i] = z > 0.0 ? z : 0.0;
    }
    double out = b3;
    for (int i = 0; i < h2; ++i) out += w3[i] * a2[i];
    return out;
}

void MlpQ::accumulate_grad(const std::vector<double>& x, double coeff, double* grad) const {
    const int d = cfg_.input_dim, h1 = cfg_.hidden1, h2 = cfg_.hidden2;
    const double* w1 = theta_.data();
    const double* b1 = w1 + static_cast<size_t>(h1) * d;
    const double* w2 = b1 + h1;
    const double* b2 = w2 + static_cast<size_t>(h2) * h1;
    const double* w3 = b2 + h2;

    std::vector<double> a1(h1), a2(h2);
    std::vector<uint8_t> on1(h1), on2(h2);
    for (int i = 0; i < h1; ++i) {
        double z = b1[i];
        const double* row = w1 + static_cast<size_t>(i) * d;
        for (int j = 0; j < d; ++j) z += row[j] * x[j];
        on1[i] = z > 0.0;
        a1[i] = on1[i] ? z : 0.0;
    }
    for (int i = 0; i < h2; ++i) {
        double z = b2[i];
        const double* row = w2 + static_cast<size_t>(i) * h1;
        for (int j = 0; j < h1; ++j) z += row[j] * a1[j];
        on2[i] = z > 0.0;
        a2[i] = on2[i] ? z : 0.0;
    }

    // backprop dQ/dtheta scaled by coeff
    double* g1 = grad;
    double* gb1 = g1 + static_cast<size_t>(h1) * d;
    double* g2 = gb1 + h1;
    double* gb2 = g2 + static_cast<size_t>(h2) * h1;
    double* g3 = gb2 + h2;

    std::vector<double> d2(h2), d1(h1, 0.0);
    for (int i = 0; i < h2; ++i) {
        g3[i] += coeff * a2[i];
        d2[i] = on2[i] ? coeff * w3[i] : 0.0;
    }
    g3[h2] += coeff;  // b3
    for (int i = 0; i < h2; ++i) {
        if (d2[i] == 0.0) continue;
        double* grow = g2 + static_cast<size_t>(i) * h1;
        const double* wrow = w2 + static_cast<size_t>(i) * h1;
        for (int j = 0; j < h1; ++j) {
            grow[j] += d2[i] * a1[j];
            d1[j] += d2[i] * wrow[j];
        }
        gb2[i] += d2[i];
    }
    for (int i = 0; i < h1; ++i) {
        if (!on1[i] || d1[i] == 0.0) continue;
        double* grow = g1 + static_cast<size_t>(i) * d;
        for (int j = 0; j < d; ++j) grow[j] += d1[i] * x[j];
        gb1[i] += d1[i];
    }
}

double batch_semigrad_serial(const MlpQ& q, const std::vector<const std::vector<double>*>& xs,
                             const std::vector<double>& ys, std::vector<double>& grad) {
    if (xs.empty() || xs.size() != ys.size())
        throw std::invalid_argument("invalid-batch: empty or mismatched");
    grad.assign(q.n_params(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(xs.size());
    double loss = 0.0;
    for (size_t j = 0; j < xs.size(); ++j) {
        const double pred = q.value(*xs[j]);
        const double delta = pred - ys[j];
        loss += delta * delta;
        q.accumulate_grad(*xs[j], inv_n * delta, grad.data());
    }
    return loss;
}

double batch_semigrad(const MlpQ& q, const std::vector<const std::vector<double>*>& xs,
                      const std::vector<double>& ys, std::vector<double>& grad) {
    if (xs.empty() || xs.size() != ys.size())
        throw std::invalid_argument("invalid-batch: empty or mismatched");
    const size_t n = xs.size(), p = q.n_params();
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> slabs(n * p, 0.0);
    std::vector<double> losses(n);
#pragma omp parallel for schedule(static)
    for (long j = 0; j < static_cast<long>(n); ++j) {
        const double pred = q.value(*xs[j]);
        const double delta = pred - ys[j];
        losses[j] = delta * delta;
        q.accumulate_grad(*xs[j], inv_n * delta, slabs.data() + j * p);
    }
    grad.assign(p, 0.0);
    double loss = 0.0;
    for (size_t j = 0; j < n; ++j) {  // fixed-order reduction: bitwise == serial
        loss += losses[j];
        const double* slab = slabs.data() + j * p;
        for (size_t k = 0; k < p; ++k) grad[k] += slab[k];
    }
    return loss;
}

}  // namespace ltv
