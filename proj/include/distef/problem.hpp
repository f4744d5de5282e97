// Copyright 2026 The distef Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#ifndef DISTEF_PROBLEM_HPP_
#define DISTEF_PROBLEM_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "distef/core.hpp"
#include "distef/partition.hpp"

namespace distef {

enum class ProblemKind { kQuadratic, kLogistic, kMlp };

const char* to_string(ProblemKind kind);

struct ProblemSpec {
  ProblemKind kind = ProblemKind::kQuadratic;
  std::size_t dim = 1;          // quadratic dim / logistic feature dim
  std::size_t samples = 0;      // logistic / mlp dataset size
  double condition_number = 1.0;  // quadratic
  double sigma = 0.0;             // quadratic gradient noise
  std::vector<std::size_t> layers;  // mlp layer sizes, [in, hidden..., out]
  std::uint64_t seed = 0;           // data-generation seed
};

// Stochastic first-order oracle. Unbiased: the sampling distribution of
// stochastic_gradient has mean exact_gradient(x). Sampling is a pure
// function of (seed, t, worker), so a draw can be replayed at will and
// workers consume disjoint streams.
class GradOracle {
 public:
  virtual ~GradOracle() = default;

  virtual std::size_t dim() const = 0;
  virtual double loss(const ParamVector& x) const = 0;
  virtual ParamVector exact_gradient(const ParamVector& x) const = 0;
  virtual ParamVector stochastic_gradient(const ParamVector& x,
                                          std::uint64_t seed, std::uint64_t t,
                                          std::uint32_t worker,
                                          std::size_t batch_size) const = 0;
  // Documented Lipschitz constant of the gradient (exact or an upper bound;
  // an estimate for the mlp, see MlpOracle).
  virtual double smoothness() const = 0;
  // Natural block structure; a single block unless the problem has per-tensor
  // parameters.
  virtual BlockPartition natural_partition() const;
};

// Deterministic minibatch index sampling: a pure function of
// (seed, t, worker). Draws batch_size distinct indices from {0, ..., n-1}
// by partial Fisher-Yates; batch_size >= n returns all indices.
std::vector<std::size_t> sample_minibatch(std::uint64_t seed, std::uint64_t t,
                                          std::uint32_t worker,
                                          std::size_t batch_size,
                                          std::size_t n);

// In-memory synthetic dataset with its on-disk format: header of three
// little-endian u64 (n, dim, label_width) followed by n rows of
// (dim + label_width) little-endian f64.
struct Dataset {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::size_t label_width = 0;
  std::vector<double> features;  // row-major n x dim
  std::vector<double> labels;    // row-major n x label_width
};

void write_dataset(const std::string& path, const Dataset& data);
Dataset read_dataset(const std::string& path);

// F(x) = 1/2 x'Ax - b'x with A symmetric positive definite. Stochastic
// gradient: Ax - b + z / sqrt(batch), z ~ N(0, sigma^2/d I).
class QuadraticOracle final : public GradOracle {
 public:
  // matrix is row-major d x d, symmetric positive definite.
  QuadraticOracle(std::vector<double> matrix, ParamVector b, double sigma);

  std::size_t dim() const override { return b_.size(); }
  double loss(const ParamVector& x) const override;
  ParamVector exact_gradient(const ParamVector& x) const override;
  ParamVector stochastic_gradient(const ParamVector& x, std::uint64_t seed,
                                  std::uint64_t t, std::uint32_t worker,
                                  std::size_t batch_size) const override;
  double smoothness() const override { return smoothness_; }

  const ParamVector& minimizer() const { return minimizer_; }
  double optimal_value() const { return optimal_value_; }
  double sigma() const { return sigma_; }

 private:
  std::vector<double> matrix_;
  ParamVector b_;
  double sigma_;
  ParamVector minimizer_;
  double optimal_value_;
  double smoothness_;
};

// Binary logistic loss (no regularizer) over synthetic Gaussian-class data
// with labels in {-1, +1}. L <= max_j ||f_j||^2 / 4.
class LogisticOracle final : public GradOracle {
 public:
  explicit LogisticOracle(Dataset data);

  std::size_t dim() const override { return data_.dim; }
  double loss(const ParamVector& x) const override;
  ParamVector exact_gradient(const ParamVector& x) const override;
  ParamVector stochastic_gradient(const ParamVector& x, std::uint64_t seed,
                                  std::uint64_t t, std::uint32_t worker,
                                  std::size_t batch_size) const override;
  double smoothness() const override { return smoothness_; }

  std::size_t n_samples() const { return data_.n; }
  const Dataset& data() const { return data_; }

 private:
  ParamVector gradient_over(const ParamVector& x,
                            const std::vector<std::size_t>& indices) const;

  Dataset data_;
  double smoothness_;
};

// Fully connected tanh network with linear output and squared loss,
// F(x) = mean_j 1/2 ||net(x, input_j) - y_j||^2. Supplies the per-tensor
// block partition [W1, b1, W2, b2, ...].
class MlpOracle final : public GradOracle {
 public:
  MlpOracle(std::vector<std::size_t> layers, Dataset data);

  std::size_t dim() const override { return total_params_; }
  double loss(const ParamVector& x) const override;
  ParamVector exact_gradient(const ParamVector& x) const override;
  ParamVector stochastic_gradient(const ParamVector& x, std::uint64_t seed,
                                  std::uint64_t t, std::uint32_t worker,
                                  std::size_t batch_size) const override;
  // Estimated over random parameter pairs with coordinates ~ N(0, 1), with a
  // 1.5x safety margin; tanh networks admit no useful closed form.
  double smoothness() const override { return smoothness_; }
  BlockPartition natural_partition() const override { return partition_; }

  std::size_t n_samples() const { return data_.n; }
  const Dataset& data() const { return data_; }
  const std::vector<std::size_t>& layers() const { return layers_; }

  ParamVector forward(const ParamVector& x, const double* input) const;

 private:
  double sample_loss_grad(const ParamVector& x, std::size_t j,
                          ParamVector* grad) const;
  ParamVector gradient_over(const ParamVector& x,
                            const std::vector<std::size_t>& indices) const;
  void estimate_smoothness();

  std::vector<std::size_t> layers_;
  Dataset data_;
  std::size_t total_params_ = 0;
  BlockPartition partition_;
  double smoothness_ = 0.0;
};

std::unique_ptr<QuadraticOracle> make_quadratic(std::size_t dim,
                                                double condition_number,
                                                double sigma,
                                                std::uint64_t seed);
std::unique_ptr<LogisticOracle> make_logistic(std::size_t samples,
                                              std::size_t feature_dim,
                                              std::uint64_t seed);
std::unique_ptr<MlpOracle> make_mlp(const std::vector<std::size_t>& layers,
                                    std::size_t samples, std::uint64_t seed);
std::unique_ptr<GradOracle> make_oracle(const ProblemSpec& spec);

}  // namespace distef

#endif  // DISTEF_PROBLEM_HPP_
