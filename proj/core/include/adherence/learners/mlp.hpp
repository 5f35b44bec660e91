#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "adherence/learners/dataset.hpp"
#include "adherence/learners/model_config.hpp"

namespace adherence {

/// Fully connected network: rectifier hidden layers, one sigmoid output,
/// binary cross-entropy loss. Parameters live in one flat vector, layer by
/// layer as [W (out x in, row-major), b (out)].
class Mlp {
 public:
  Mlp() = default;
  /// layer_sizes = {inputs, hidden..., 1}
  explicit Mlp(std::vector<int> layer_sizes);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  std::size_t n_layers() const { return sizes_.size() - 1; }
  std::size_t n_inputs() const { return static_cast<std::size_t>(sizes_.front()); }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  /// Offset and length of layer `l`'s block (weights followed by biases).
  std::size_t layer_offset(std::size_t l) const { return offsets_[l]; }
  std::size_t layer_size(std::size_t l) const { return offsets_[l + 1] - offsets_[l]; }

  /// He-uniform weights for rectifier layers, Glorot-uniform for the output,
  /// zero biases.
  void initialize(std::uint64_t seed);

  /// Output logit for one input row.
  double logit(std::span<const double> x) const;
  double predict_proba(std::span<const double> x) const;

  /// Mean cross-entropy over `rows` of `data`; writes d(loss)/d(params) into
  /// `grad` (resized to params().size()).
  double loss_and_gradient(const Dataset& data, std::span<const std::size_t> rows,
                           std::vector<double>& grad) const;
  double loss(const Dataset& data, std::span<const std::size_t> rows) const;

 private:
  std::vector<int> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

/// Mini-batch Adam over a seeded per-epoch shuffle; single-threaded so the
/// batch order is reproducible. Appends per-epoch mean loss to
/// `loss_history` when given. Throws NonFiniteLoss on divergence.
Mlp train_mlp_network(const Dataset& data, const ModelConfig& config,
                      std::vector<double>* loss_history = nullptr);

}  // namespace adherence
