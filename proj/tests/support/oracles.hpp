#pragma once

// Slow, obviously-correct reference computations used to check the library.
// None of these call into the code under test.

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace oracle {

/// (concordant pairs + 0.5 * tied pairs) / (n_pos * n_neg), O(n^2).
inline double pairwise_auc(std::span<const double> scores, std::span<const int> truth) {
  double good = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (truth[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (truth[j] != 0) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) good += 1.0;
      else if (scores[i] == scores[j]) good += 0.5;
    }
  }
  return good / pairs;
}

/// Information gain from an explicit contingency table, natural log
/// converted to bits at the end.
inline double info_gain_bits(std::span<const int> x, std::span<const int> y) {
  const double n = static_cast<double>(y.size());
  std::map<int, std::map<int, double>> table;
  std::map<int, double> y_count, x_count;
  for (std::size_t i = 0; i < y.size(); ++i) {
    table[x[i]][y[i]] += 1.0;
    y_count[y[i]] += 1.0;
    x_count[x[i]] += 1.0;
  }
  double hy = 0.0;
  for (const auto& [v, c] : y_count) hy -= (c / n) * std::log(c / n);
  double hyx = 0.0;
  for (const auto& [xv, row] : table) {
    for (const auto& [yv, c] : row) {
      hyx -= (c / n) * std::log(c / x_count[xv]);
    }
  }
  return (hy - hyx) / std::log(2.0);
}

/// Central finite-difference gradient of f at x with step h.
inline std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// ||a - b|| / (||a|| + ||b||), 0 when both vanish.
inline double relative_error(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double denom = std::sqrt(na) + std::sqrt(nb);
  return denom == 0.0 ? 0.0 : std::sqrt(diff) / denom;
}

/// Mean binary cross-entropy of a network written out longhand:
/// rectifier hidden layers, sigmoid output. `params` uses the
/// [W (out x in), b] per-layer layout.
inline double mlp_loss(const std::vector<int>& sizes, const std::vector<double>& params,
                       const std::vector<std::vector<double>>& xs, const std::vector<int>& ys) {
  double total = 0.0;
  for (std::size_t r = 0; r < xs.size(); ++r) {
    std::vector<double> a = xs[r];
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
      const int in = sizes[l], out = sizes[l + 1];
      std::vector<double> z(static_cast<std::size_t>(out));
      for (int o = 0; o < out; ++o) {
        double s = params[off + static_cast<std::size_t>(out * in) + static_cast<std::size_t>(o)];
        for (int i = 0; i < in; ++i) {
          s += params[off + static_cast<std::size_t>(o * in + i)] * a[static_cast<std::size_t>(i)];
        }
        z[static_cast<std::size_t>(o)] = s;
      }
      off += static_cast<std::size_t>(out * in + out);
      if (l + 2 < sizes.size()) {
        for (double& v : z) v = v > 0.0 ? v : 0.0;
      }
      a = std::move(z);
    }
    const double p = 1.0 / (1.0 + std::exp(-a[0]));
    total -= ys[r] == 1 ? std::log(p) : std::log(1.0 - p);
  }
  return total / static_cast<double>(xs.size());
}

}  // namespace oracle
