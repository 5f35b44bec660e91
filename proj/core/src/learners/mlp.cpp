#include "adherence/learners/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "adherence/error.hpp"
#include "adherence/rng.hpp"

namespace adherence {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace

Mlp::Mlp(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  offsets_.push_back(0);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const auto in = static_cast<std::size_t>(sizes_[l]);
    const auto out = static_cast<std::size_t>(sizes_[l + 1]);
    offsets_.push_back(offsets_.back() + out * in + out);
  }
  params_.assign(offsets_.back(), 0.0);
}

void Mlp::initialize(std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t l = 0; l < n_layers(); ++l) {
    const auto in = static_cast<std::size_t>(sizes_[l]);
    const auto out = static_cast<std::size_t>(sizes_[l + 1]);
    const bool output = l + 1 == n_layers();
    const double limit = output ? std::sqrt(6.0 / static_cast<double>(in + out))
                                : std::sqrt(6.0 / static_cast<double>(in));
    double* w = params_.data() + offsets_[l];
    for (std::size_t i = 0; i < out * in; ++i) w[i] = rng.uniform(-limit, limit);
    std::fill(w + out * in, w + out * in + out, 0.0);
  }
}

double Mlp::logit(std::span<const double> x) const {
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> z;
  for (std::size_t l = 0; l < n_layers(); ++l) {
    const auto in = static_cast<std::size_t>(sizes_[l]);
    const auto out = static_cast<std::size_t>(sizes_[l + 1]);
    const double* w = params_.data() + offsets_[l];
    const double* b = w + out * in;
    z.assign(out, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      double s = b[o];
      const double* wr = w + o * in;
      for (std::size_t i = 0; i < in; ++i) s += wr[i] * a[i];
      z[o] = s;
    }
    if (l + 1 < n_layers()) {
      for (double& v : z) v = std::max(0.0, v);
    }
    a.swap(z);
  }
  return a[0];
}

double Mlp::predict_proba(std::span<const double> x) const { return sigmoid(logit(x)); }

double Mlp::loss(const Dataset& data, std::span<const std::size_t> rows) const {
  double total = 0.0;
  for (std::size_t r : rows) {
    const double z = logit(data.row(r));
    total += softplus(z) - static_cast<double>(data.y[r]) * z;
  }
  return rows.empty() ? 0.0 : total / static_cast<double>(rows.size());
}

double Mlp::loss_and_gradient(const Dataset& data, std::span<const std::size_t> rows,
                              std::vector<double>& grad) const {
  grad.assign(params_.size(), 0.0);
  if (rows.empty()) return 0.0;
  const std::size_t L = n_layers();
  const double inv_n = 1.0 / static_cast<double>(rows.size());

  // activations[l] is the input to layer l; activations[L] holds the logit.
  std::vector<std::vector<double>> act(L + 1);
  std::vector<double> delta, prev_delta;
  double total = 0.0;

  for (std::size_t r : rows) {
    const auto x = data.row(r);
    act[0].assign(x.begin(), x.end());
    for (std::size_t l = 0; l < L; ++l) {
      const auto in = static_cast<std::size_t>(sizes_[l]);
      const auto out = static_cast<std::size_t>(sizes_[l + 1]);
      const double* w = params_.data() + offsets_[l];
      const double* b = w + out * in;
      act[l + 1].assign(out, 0.0);
      for (std::size_t o = 0; o < out; ++o) {
        double s = b[o];
        const double* wr = w + o * in;
        for (std::size_t i = 0; i < in; ++i) s += wr[i] * act[l][i];
        act[l + 1][o] = (l + 1 < L) ? std::max(0.0, s) : s;
      }
    }
    const double z = act[L][0];
    const double y = static_cast<double>(data.y[r]);
    total += softplus(z) - y * z;

    delta.assign(1, (sigmoid(z) - y) * inv_n);
    for (std::size_t l = L; l-- > 0;) {
      const auto in = static_cast<std::size_t>(sizes_[l]);
      const auto out = static_cast<std::size_t>(sizes_[l + 1]);
      const double* w = params_.data() + offsets_[l];
      double* gw = grad.data() + offsets_[l];
      double* gb = gw + out * in;
      for (std::size_t o = 0; o < out; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        double* gwr = gw + o * in;
        for (std::size_t i = 0; i < in; ++i) gwr[i] += d * act[l][i];
        gb[o] += d;
      }
      if (l == 0) break;
      prev_delta.assign(in, 0.0);
      for (std::size_t o = 0; o < out; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        const double* wr = w + o * in;
        for (std::size_t i = 0; i < in; ++i) prev_delta[i] += wr[i] * d;
      }
      // Rectifier derivative: 1 where the unit was active.
      for (std::size_t i = 0; i < in; ++i) {
        if (act[l][i] <= 0.0) prev_delta[i] = 0.0;
      }
      delta.swap(prev_delta);
    }
  }
  return total * inv_n;
}

Mlp train_mlp_network(const Dataset& data, const ModelConfig& config,
                      std::vector<double>* loss_history) {
  if (data.empty()) fail(ErrorCode::EmptyDataset, "cannot train a network on zero rows");
  config.validate();

  std::vector<int> sizes{static_cast<int>(data.n_features)};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(1);
  Mlp net(std::move(sizes));
  net.initialize(derive_seed(config.seed, 0));

  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::vector<double>& theta = net.params();
  std::vector<double> m(theta.size(), 0.0), v(theta.size(), 0.0), grad;
  Rng order_rng(derive_seed(config.seed, 1));
  const auto batch = static_cast<std::size_t>(config.batch_size);
  long step = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const std::vector<std::size_t> order = order_rng.permutation(data.n_rows());
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch) {
      const std::size_t end = std::min(order.size(), begin + batch);
      const std::span<const std::size_t> rows(order.data() + begin, end - begin);
      const double l = net.loss_and_gradient(data, rows, grad);
      if (!std::isfinite(l)) {
        fail(ErrorCode::NonFiniteLoss,
             fmt::format("network loss diverged at epoch {} (step size {})", epoch,
                         config.step_size));
      }
      epoch_loss += l * static_cast<double>(rows.size());
      ++step;
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      for (std::size_t i = 0; i < theta.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
        theta[i] -= config.step_size * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
      }
    }
    epoch_loss /= static_cast<double>(data.n_rows());
    if (!std::isfinite(epoch_loss)) {
      fail(ErrorCode::NonFiniteLoss, fmt::format("network loss diverged at epoch {}", epoch));
    }
    if (loss_history) loss_history->push_back(epoch_loss);
  }
  return net;
}

}  // namespace adherence
