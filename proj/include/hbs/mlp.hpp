// SPDX-License-Identifier: Apache-2.0
//
// hbsched - joint user scheduling and hybrid beamforming for mmWave MIMO-OFDM
// Copyright (C) 2026 The hbsched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef HBS_MLP_HPP
#define HBS_MLP_HPP

#include "hbs/common.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace hbs {

/// Fully connected network with a logistic sigmoid after every layer,
/// including the output. Samples are columns.
template <typename Scalar>
class BasicMlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Layer {
    Matrix weight;  // out x in
    Vector bias;    // out
  };

  BasicMlp() = default;

  /// All-zero parameters for the dimension chain dims[0] -> ... -> dims.back().
  explicit BasicMlp(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.size() < 2) throw InputError("BasicMlp: need at least input and output sizes");
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
      if (dims_[l] < 1 || dims_[l + 1] < 1) throw InputError("BasicMlp: layer sizes must be >= 1");
      layers_.push_back({Matrix::Zero(dims_[l + 1], dims_[l]), Vector::Zero(dims_[l + 1])});
    }
  }

  /// Uniform Glorot initialization, biases zero.
  static BasicMlp glorot(std::vector<int> dims, Rng& rng) {
    BasicMlp net(std::move(dims));
    for (auto& layer : net.layers_) {
      const double limit = std::sqrt(6.0 / static_cast<double>(layer.weight.rows() + layer.weight.cols()));
      std::uniform_real_distribution<double> u(-limit, limit);
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) layer.weight(r, c) = static_cast<Scalar>(u(rng));
    }
    return net;
  }

  const std::vector<int>& dims() const { return dims_; }
  int input_size() const { return dims_.front(); }
  int output_size() const { return dims_.back(); }
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  Matrix forward(const Matrix& x) const {
    check_input(x.rows());
    Matrix a = x;
    for (const auto& layer : layers_) a = sigmoid((layer.weight * a).colwise() + layer.bias);
    return clamp_open(a);
  }

  Vector forward(const Vector& x) const {
    check_input(x.rows());
    Vector a = x;
    for (const auto& layer : layers_) a = sigmoid_vec(layer.weight * a + layer.bias);
    return clamp_open(a);
  }

  /// Mean binary cross-entropy over outputs and samples. When `grads` is
  /// non-null it receives dLoss/dParams with the same layout as layers().
  Scalar loss(const Matrix& x, const Matrix& labels, std::vector<Layer>* grads = nullptr) const {
    check_input(x.rows());
    if (labels.rows() != output_size() || labels.cols() != x.cols()) throw InputError("BasicMlp: label shape mismatch");
    const std::size_t n_layers = layers_.size();
    std::vector<Matrix> act(n_layers + 1);
    act[0] = x;
    Matrix logits;
    for (std::size_t l = 0; l < n_layers; ++l) {
      Matrix pre = (layers_[l].weight * act[l]).colwise() + layers_[l].bias;
      if (l + 1 == n_layers) logits = pre;
      act[l + 1] = sigmoid(pre);
    }
    const Scalar scale = Scalar(1) / static_cast<Scalar>(labels.rows() * labels.cols());
    // softplus(a) - y a is the cross-entropy of sigmoid(a) against y.
    Scalar total = 0;
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
      for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const Scalar a = logits(r, c);
        const Scalar softplus = a > 0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
        total += softplus - labels(r, c) * a;
      }
    }
    if (grads) {
      grads->resize(n_layers);
      Matrix delta = (act[n_layers] - labels) * scale;
      for (std::size_t l = n_layers; l-- > 0;) {
        (*grads)[l].weight.noalias() = delta * act[l].transpose();
        (*grads)[l].bias = delta.rowwise().sum();
        if (l > 0) {
          Matrix back = layers_[l].weight.transpose() * delta;
          delta = back.array() * act[l].array() * (Scalar(1) - act[l].array());
        }
      }
    }
    return total * scale;
  }

  template <typename Other>
  BasicMlp<Other> cast() const {
    BasicMlp<Other> out(dims_);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      out.layers()[l].weight = layers_[l].weight.template cast<Other>();
      out.layers()[l].bias = layers_[l].bias.template cast<Other>();
    }
    return out;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers_) n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
    return n;
  }

 private:
  void check_input(Eigen::Index rows) const {
    if (dims_.empty() || rows != dims_.front()) throw InputError("BasicMlp: input length does not match the first layer");
  }

  // Saturated sigmoids round to exactly 0 or 1; outputs stay inside (0, 1).
  template <typename M>
  static M clamp_open(const M& m) {
    const Scalar lo = std::numeric_limits<Scalar>::min();
    const Scalar hi = std::nextafter(Scalar(1), Scalar(0));
    return m.cwiseMax(lo).cwiseMin(hi);
  }

  static Matrix sigmoid(const Matrix& m) { return (Scalar(1) / (Scalar(1) + (-m.array()).exp())).matrix(); }
  static Vector sigmoid_vec(const Vector& v) { return (Scalar(1) / (Scalar(1) + (-v.array()).exp())).matrix(); }

  std::vector<int> dims_;
  std::vector<Layer> layers_;
};

using Mlp = BasicMlp<float>;

}  // namespace hbs

#endif  // HBS_MLP_HPP
