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

#include "distef/problem.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "distef/rng.hpp"

namespace distef {

const char* to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kQuadratic:
      return "quadratic";
    case ProblemKind::kLogistic:
      return "logistic";
    case ProblemKind::kMlp:
      return "mlp";
  }
  return "unknown";
}

BlockPartition GradOracle::natural_partition() const {
  return BlockPartition::single(dim());
}

std::vector<std::size_t> sample_minibatch(std::uint64_t seed, std::uint64_t t,
                                          std::uint32_t worker,
                                          std::size_t batch_size,
                                          std::size_t n) {
  if (n == 0) throw PreconditionError("sample_minibatch: empty dataset");
  if (batch_size == 0) {
    throw PreconditionError("sample_minibatch: batch size must be positive");
  }
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  if (batch_size >= n) return pool;  // full batch
  Rng rng(mix_seed(seed, stream::kMinibatch, t, worker));
  // Partial Fisher-Yates: distinct indices, uniform without replacement.
  for (std::size_t j = 0; j < batch_size; ++j) {
    const std::size_t pick = j + rng.uniform_index(n - j);
    std::swap(pool[j], pool[pick]);
  }
  pool.resize(batch_size);
  return pool;
}

// ---------------------------------------------------------------------------
// Dataset file format
// ---------------------------------------------------------------------------

namespace {

void put_u64_le(std::ostream& out, std::uint64_t v) {
  std::uint8_t buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<std::uint8_t>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64_le(std::istream& in) {
  std::uint8_t buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw WireFormatError("dataset: truncated header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void put_f64_le(std::ostream& out, double x) {
  put_u64_le(out, std::bit_cast<std::uint64_t>(x));
}

double get_f64_le(std::istream& in) {
  return std::bit_cast<double>(get_u64_le(in));
}

}  // namespace

void write_dataset(const std::string& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValueError("write_dataset: cannot open " + path);
  put_u64_le(out, data.n);
  put_u64_le(out, data.dim);
  put_u64_le(out, data.label_width);
  for (std::size_t j = 0; j < data.n; ++j) {
    for (std::size_t i = 0; i < data.dim; ++i) {
      put_f64_le(out, data.features[j * data.dim + i]);
    }
    for (std::size_t i = 0; i < data.label_width; ++i) {
      put_f64_le(out, data.labels[j * data.label_width + i]);
    }
  }
  if (!out) throw ValueError("write_dataset: write failed for " + path);
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValueError("read_dataset: cannot open " + path);
  Dataset data;
  data.n = get_u64_le(in);
  data.dim = get_u64_le(in);
  data.label_width = get_u64_le(in);
  data.features.resize(data.n * data.dim);
  data.labels.resize(data.n * data.label_width);
  for (std::size_t j = 0; j < data.n; ++j) {
    for (std::size_t i = 0; i < data.dim; ++i) {
      data.features[j * data.dim + i] = get_f64_le(in);
    }
    for (std::size_t i = 0; i < data.label_width; ++i) {
      data.labels[j * data.label_width + i] = get_f64_le(in);
    }
  }
  return data;
}

// ---------------------------------------------------------------------------
// Quadratic
// ---------------------------------------------------------------------------

namespace {

// Solves A x = b by Gauss elimination with partial pivoting; A is row-major.
ParamVector solve_linear(std::vector<double> a, ParamVector b) {
  const std::size_t d = b.size();
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < d; ++r) {
      if (std::fabs(a[r * d + col]) > std::fabs(a[pivot * d + col])) pivot = r;
    }
    if (a[pivot * d + col] == 0.0) {
      throw ValueError("solve_linear: singular matrix");
    }
    if (pivot != col) {
      for (std::size_t c = 0; c < d; ++c) std::swap(a[col * d + c], a[pivot * d + c]);
      std::swap(b[col], b[pivot]);
    }
    const double inv = 1.0 / a[col * d + col];
    for (std::size_t r = col + 1; r < d; ++r) {
      const double f = a[r * d + col] * inv;
      if (f == 0.0) continue;
      for (std::size_t c = col; c < d; ++c) a[r * d + c] -= f * a[col * d + c];
      b[r] -= f * b[col];
    }
  }
  ParamVector x(d, 0.0);
  for (std::size_t ri = d; ri-- > 0;) {
    double s = b[ri];
    for (std::size_t c = ri + 1; c < d; ++c) s -= a[ri * d + c] * x[c];
    x[ri] = s / a[ri * d + ri];
  }
  return x;
}

ParamVector mat_vec(const std::vector<double>& a, const ParamVector& x) {
  const std::size_t d = x.size();
  ParamVector y(d, 0.0);
  for (std::size_t r = 0; r < d; ++r) {
    double s = 0.0;
    const double* row = a.data() + r * d;
    for (std::size_t c = 0; c < d; ++c) s += row[c] * x[c];
    y[r] = s;
  }
  return y;
}

double largest_eigenvalue(const std::vector<double>& a, std::size_t d) {
  ParamVector v(d, 1.0 / std::sqrt(static_cast<double>(d)));
  double lambda = 1.0;
  for (int iter = 0; iter < 300; ++iter) {
    ParamVector w = mat_vec(a, v);
    const double norm = std::sqrt(l2_norm_squared(w));
    if (norm == 0.0) return 0.0;
    for (std::size_t i = 0; i < d; ++i) v[i] = w[i] / norm;
    lambda = norm;
  }
  return lambda;
}

// A <- (I - 2 u u') A (I - 2 u u') for a unit vector u.
void apply_householder(std::vector<double>& a, const ParamVector& u) {
  const std::size_t d = u.size();
  // Row transform: A <- A - 2 u (u' A).
  ParamVector ua(d, 0.0);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) ua[c] += u[r] * a[r * d + c];
  }
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) a[r * d + c] -= 2.0 * u[r] * ua[c];
  }
  // Column transform: A <- A - 2 (A u) u'.
  ParamVector au(d, 0.0);
  for (std::size_t r = 0; r < d; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) s += a[r * d + c] * u[c];
    au[r] = s;
  }
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) a[r * d + c] -= 2.0 * au[r] * u[c];
  }
}

}  // namespace

QuadraticOracle::QuadraticOracle(std::vector<double> matrix, ParamVector b,
                                 double sigma)
    : matrix_(std::move(matrix)), b_(std::move(b)), sigma_(sigma) {
  const std::size_t d = b_.size();
  if (d == 0 || matrix_.size() != d * d) {
    throw DimensionError("quadratic: matrix must be d x d");
  }
  if (sigma_ < 0.0) throw ValueError("quadratic: sigma must be nonnegative");
  minimizer_ = solve_linear(matrix_, b_);
  optimal_value_ = loss(minimizer_);
  smoothness_ = largest_eigenvalue(matrix_, d);
}

double QuadraticOracle::loss(const ParamVector& x) const {
  require_same_dim(x, b_, "quadratic loss");
  const ParamVector ax = mat_vec(matrix_, x);
  return 0.5 * dot(x, ax) - dot(b_, x);
}

ParamVector QuadraticOracle::exact_gradient(const ParamVector& x) const {
  require_same_dim(x, b_, "quadratic gradient");
  ParamVector g = mat_vec(matrix_, x);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] -= b_[i];
  return g;
}

ParamVector QuadraticOracle::stochastic_gradient(const ParamVector& x,
                                                 std::uint64_t seed,
                                                 std::uint64_t t,
                                                 std::uint32_t worker,
                                                 std::size_t batch_size) const {
  if (batch_size == 0) {
    throw PreconditionError("quadratic: batch size must be positive");
  }
  ParamVector g = exact_gradient(x);
  if (sigma_ == 0.0) return g;
  Rng rng(mix_seed(seed, stream::kGradientNoise, t, worker));
  // Per-coordinate variance sigma^2 / d gives E||g - grad F||^2 = sigma^2;
  // a batch of size b averages b independent draws.
  const double scale = sigma_ / std::sqrt(static_cast<double>(g.size())) /
                       std::sqrt(static_cast<double>(batch_size));
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += scale * rng.normal();
  return g;
}

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

namespace {

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double softplus(double t) {
  // log(1 + exp(t)) without overflow.
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

}  // namespace

LogisticOracle::LogisticOracle(Dataset data) : data_(std::move(data)) {
  if (data_.n == 0 || data_.dim == 0 || data_.label_width != 1) {
    throw DimensionError("logistic: need n x dim features and one label");
  }
  double max_row = 0.0;
  for (std::size_t j = 0; j < data_.n; ++j) {
    double row = 0.0;
    for (std::size_t i = 0; i < data_.dim; ++i) {
      const double f = data_.features[j * data_.dim + i];
      row += f * f;
    }
    max_row = std::max(max_row, row);
    const double y = data_.labels[j];
    if (y != 1.0 && y != -1.0) {
      throw ValueError("logistic: labels must be +1 or -1");
    }
  }
  smoothness_ = 0.25 * max_row;
}

double LogisticOracle::loss(const ParamVector& x) const {
  require_finite(x, "logistic loss");
  if (x.size() != data_.dim) throw DimensionError("logistic loss: bad dim");
  double total = 0.0;
  for (std::size_t j = 0; j < data_.n; ++j) {
    const double* f = data_.features.data() + j * data_.dim;
    double z = 0.0;
    for (std::size_t i = 0; i < data_.dim; ++i) z += x[i] * f[i];
    total += softplus(-data_.labels[j] * z);
  }
  return total / static_cast<double>(data_.n);
}

ParamVector LogisticOracle::gradient_over(
    const ParamVector& x, const std::vector<std::size_t>& indices) const {
  ParamVector g(data_.dim, 0.0);
  for (std::size_t j : indices) {
    const double* f = data_.features.data() + j * data_.dim;
    const double y = data_.labels[j];
    double z = 0.0;
    for (std::size_t i = 0; i < data_.dim; ++i) z += x[i] * f[i];
    const double w = -y * sigmoid(-y * z);
    for (std::size_t i = 0; i < data_.dim; ++i) g[i] += w * f[i];
  }
  const double inv = 1.0 / static_cast<double>(indices.size());
  for (double& v : g) v *= inv;
  return g;
}

ParamVector LogisticOracle::exact_gradient(const ParamVector& x) const {
  if (x.size() != data_.dim) throw DimensionError("logistic grad: bad dim");
  std::vector<std::size_t> all(data_.n);
  std::iota(all.begin(), all.end(), 0);
  return gradient_over(x, all);
}

ParamVector LogisticOracle::stochastic_gradient(const ParamVector& x,
                                                std::uint64_t seed,
                                                std::uint64_t t,
                                                std::uint32_t worker,
                                                std::size_t batch_size) const {
  if (x.size() != data_.dim) throw DimensionError("logistic grad: bad dim");
  return gradient_over(x,
                       sample_minibatch(seed, t, worker, batch_size, data_.n));
}

// ---------------------------------------------------------------------------
// Tanh network
// ---------------------------------------------------------------------------

MlpOracle::MlpOracle(std::vector<std::size_t> layers, Dataset data)
    : layers_(std::move(layers)), data_(std::move(data)) {
  if (layers_.size() < 3) {
    throw ConfigError("mlp: need at least one hidden layer");
  }
  for (std::size_t width : layers_) {
    if (width == 0) throw ConfigError("mlp: zero-width layer");
  }
  if (data_.n == 0 || data_.dim != layers_.front() ||
      data_.label_width != layers_.back()) {
    throw DimensionError("mlp: dataset does not match layer sizes");
  }
  std::vector<std::size_t> block_sizes;
  total_params_ = 0;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    block_sizes.push_back(layers_[l + 1] * layers_[l]);  // weights
    block_sizes.push_back(layers_[l + 1]);               // bias
    total_params_ += layers_[l + 1] * layers_[l] + layers_[l + 1];
  }
  if (total_params_ > 100'000) {
    throw ConfigError("mlp: parameter count exceeds 1e5");
  }
  partition_ = make_partition(block_sizes);
  estimate_smoothness();
}

ParamVector MlpOracle::forward(const ParamVector& x,
                               const double* input) const {
  ParamVector act(input, input + layers_.front());
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    const std::size_t in = layers_[l];
    const std::size_t out = layers_[l + 1];
    const double* w = x.data() + offset;
    const double* b = x.data() + offset + out * in;
    ParamVector next(out, 0.0);
    for (std::size_t r = 0; r < out; ++r) {
      double z = b[r];
      for (std::size_t c = 0; c < in; ++c) z += w[r * in + c] * act[c];
      next[r] = (l + 2 == layers_.size()) ? z : std::tanh(z);
    }
    act = std::move(next);
    offset += out * in + out;
  }
  return act;
}

double MlpOracle::sample_loss_grad(const ParamVector& x, std::size_t j,
                                   ParamVector* grad) const {
  const std::size_t depth = layers_.size() - 1;
  // Forward pass, keeping every activation.
  std::vector<ParamVector> acts(depth + 1);
  acts[0].assign(data_.features.begin() + j * data_.dim,
                 data_.features.begin() + (j + 1) * data_.dim);
  std::size_t offset = 0;
  std::vector<std::size_t> offsets(depth);
  for (std::size_t l = 0; l < depth; ++l) {
    offsets[l] = offset;
    const std::size_t in = layers_[l];
    const std::size_t out = layers_[l + 1];
    const double* w = x.data() + offset;
    const double* b = x.data() + offset + out * in;
    acts[l + 1].assign(out, 0.0);
    for (std::size_t r = 0; r < out; ++r) {
      double z = b[r];
      for (std::size_t c = 0; c < in; ++c) z += w[r * in + c] * acts[l][c];
      acts[l + 1][r] = (l + 1 == depth) ? z : std::tanh(z);
    }
    offset += out * in + out;
  }
  const double* y = data_.labels.data() + j * data_.label_width;
  double loss = 0.0;
  ParamVector delta(layers_.back());
  for (std::size_t r = 0; r < layers_.back(); ++r) {
    delta[r] = acts[depth][r] - y[r];
    loss += 0.5 * delta[r] * delta[r];
  }
  if (grad == nullptr) return loss;
  // Backward pass.
  for (std::size_t l = depth; l-- > 0;) {
    const std::size_t in = layers_[l];
    const std::size_t out = layers_[l + 1];
    const double* w = x.data() + offsets[l];
    double* gw = grad->data() + offsets[l];
    double* gb = grad->data() + offsets[l] + out * in;
    for (std::size_t r = 0; r < out; ++r) {
      gb[r] += delta[r];
      for (std::size_t c = 0; c < in; ++c) {
        gw[r * in + c] += delta[r] * acts[l][c];
      }
    }
    if (l == 0) break;
    ParamVector prev(in, 0.0);
    for (std::size_t c = 0; c < in; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < out; ++r) s += w[r * in + c] * delta[r];
      // tanh'(z) = 1 - tanh(z)^2 and acts[l] holds tanh(z).
      prev[c] = s * (1.0 - acts[l][c] * acts[l][c]);
    }
    delta = std::move(prev);
  }
  return loss;
}

double MlpOracle::loss(const ParamVector& x) const {
  if (x.size() != total_params_) throw DimensionError("mlp loss: bad dim");
  double total = 0.0;
  for (std::size_t j = 0; j < data_.n; ++j) {
    total += sample_loss_grad(x, j, nullptr);
  }
  return total / static_cast<double>(data_.n);
}

ParamVector MlpOracle::gradient_over(
    const ParamVector& x, const std::vector<std::size_t>& indices) const {
  if (x.size() != total_params_) throw DimensionError("mlp grad: bad dim");
  ParamVector g(total_params_, 0.0);
  for (std::size_t j : indices) sample_loss_grad(x, j, &g);
  const double inv = 1.0 / static_cast<double>(indices.size());
  for (double& v : g) v *= inv;
  return g;
}

ParamVector MlpOracle::exact_gradient(const ParamVector& x) const {
  std::vector<std::size_t> all(data_.n);
  std::iota(all.begin(), all.end(), 0);
  return gradient_over(x, all);
}

ParamVector MlpOracle::stochastic_gradient(const ParamVector& x,
                                           std::uint64_t seed, std::uint64_t t,
                                           std::uint32_t worker,
                                           std::size_t batch_size) const {
  return gradient_over(x,
                       sample_minibatch(seed, t, worker, batch_size, data_.n));
}

void MlpOracle::estimate_smoothness() {
  // Power iteration on the Hessian (via gradient differences) at random
  // parameter points; the 2x margin covers curvature between sample points.
  Rng rng(mix_seed(hash_u64(0x511a), stream::kTeacher, total_params_));
  const double fd_step = 1e-4;
  double max_norm = 0.0;
  for (int point = 0; point < 32; ++point) {
    ParamVector x(total_params_);
    for (double& v : x) v = rng.normal();
    ParamVector dir(total_params_);
    for (double& v : dir) v = rng.normal();
    double norm = 0.0;
    for (int iter = 0; iter < 6; ++iter) {
      double dir_norm = std::sqrt(l2_norm_squared(dir));
      if (dir_norm == 0.0) break;
      ParamVector lo(total_params_), hi(total_params_);
      for (std::size_t i = 0; i < total_params_; ++i) {
        const double step = fd_step * dir[i] / dir_norm;
        lo[i] = x[i] - step;
        hi[i] = x[i] + step;
      }
      const ParamVector glo = exact_gradient(lo);
      const ParamVector ghi = exact_gradient(hi);
      for (std::size_t i = 0; i < total_params_; ++i) {
        dir[i] = (ghi[i] - glo[i]) / (2.0 * fd_step);
      }
      norm = std::sqrt(l2_norm_squared(dir));
    }
    max_norm = std::max(max_norm, norm);
  }
  smoothness_ = 2.0 * max_norm;
}

// ---------------------------------------------------------------------------
// Factories
// ---------------------------------------------------------------------------

std::unique_ptr<QuadraticOracle> make_quadratic(std::size_t dim,
                                                double condition_number,
                                                double sigma,
                                                std::uint64_t seed) {
  if (dim == 0) throw ConfigError("quadratic: dim must be positive");
  if (condition_number < 1.0) {
    throw ConfigError("quadratic: condition number must be >= 1");
  }
  // Spectrum spread evenly over [1, kappa], then mixed by two random
  // Householder reflections; L = kappa exactly.
  std::vector<double> a(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    const double lambda =
        dim == 1 ? condition_number
                 : 1.0 + static_cast<double>(i) * (condition_number - 1.0) /
                             static_cast<double>(dim - 1);
    a[i * dim + i] = lambda;
  }
  Rng rng(mix_seed(seed, stream::kDataset));
  for (int reflection = 0; reflection < 2 && dim > 1; ++reflection) {
    ParamVector u(dim);
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      u[i] = rng.normal();
      norm_sq += u[i] * u[i];
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& v : u) v *= inv;
    apply_householder(a, u);
  }
  // Symmetrize away the rounding skew.
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = r + 1; c < dim; ++c) {
      const double avg = 0.5 * (a[r * dim + c] + a[c * dim + r]);
      a[r * dim + c] = avg;
      a[c * dim + r] = avg;
    }
  }
  ParamVector target(dim);
  for (std::size_t i = 0; i < dim; ++i) target[i] = rng.normal();
  const ParamVector b = mat_vec(a, target);
  auto oracle = std::make_unique<QuadraticOracle>(std::move(a), b, sigma);
  return oracle;
}

std::unique_ptr<LogisticOracle> make_logistic(std::size_t samples,
                                              std::size_t feature_dim,
                                              std::uint64_t seed) {
  if (samples == 0 || feature_dim == 0) {
    throw ConfigError("logistic: samples and feature dim must be positive");
  }
  Rng rng(mix_seed(seed, stream::kDataset));
  ParamVector direction(feature_dim);
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < feature_dim; ++i) {
    direction[i] = rng.normal();
    norm_sq += direction[i] * direction[i];
  }
  const double scale = 1.5 / std::sqrt(norm_sq);
  for (double& v : direction) v *= scale;

  Dataset data;
  data.n = samples;
  data.dim = feature_dim;
  data.label_width = 1;
  data.features.resize(samples * feature_dim);
  data.labels.resize(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    const double y = (j % 2 == 0) ? 1.0 : -1.0;  // balanced classes
    data.labels[j] = y;
    for (std::size_t i = 0; i < feature_dim; ++i) {
      data.features[j * feature_dim + i] = y * direction[i] + rng.normal();
    }
  }
  return std::make_unique<LogisticOracle>(std::move(data));
}

std::unique_ptr<MlpOracle> make_mlp(const std::vector<std::size_t>& layers,
                                    std::size_t samples, std::uint64_t seed) {
  if (layers.size() < 3) throw ConfigError("mlp: need [in, hidden..., out]");
  if (samples == 0) throw ConfigError("mlp: samples must be positive");

  // Teacher network with the same architecture generates the targets.
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    total += layers[l + 1] * layers[l] + layers[l + 1];
  }
  ParamVector teacher(total);
  Rng trng(mix_seed(seed, stream::kTeacher));
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    const std::size_t in = layers[l];
    const std::size_t out = layers[l + 1];
    const double w_scale = 1.0 / std::sqrt(static_cast<double>(in));
    for (std::size_t i = 0; i < out * in; ++i) {
      teacher[offset + i] = w_scale * trng.normal();
    }
    for (std::size_t i = 0; i < out; ++i) {
      teacher[offset + out * in + i] = 0.1 * trng.normal();
    }
    offset += out * in + out;
  }

  Dataset data;
  data.n = samples;
  data.dim = layers.front();
  data.label_width = layers.back();
  data.features.resize(samples * data.dim);
  data.labels.resize(samples * data.label_width);
  Rng rng(mix_seed(seed, stream::kDataset));
  for (std::size_t j = 0; j < samples * data.dim; ++j) {
    data.features[j] = rng.normal();
  }

  const auto teacher_forward = [&layers, &teacher](const double* input) {
    ParamVector act(input, input + layers.front());
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
      const std::size_t in = layers[l];
      const std::size_t out = layers[l + 1];
      const double* w = teacher.data() + off;
      const double* b = teacher.data() + off + out * in;
      ParamVector next(out, 0.0);
      for (std::size_t r = 0; r < out; ++r) {
        double z = b[r];
        for (std::size_t c = 0; c < in; ++c) z += w[r * in + c] * act[c];
        next[r] = (l + 2 == layers.size()) ? z : std::tanh(z);
      }
      act = std::move(next);
      off += out * in + out;
    }
    return act;
  };
  for (std::size_t j = 0; j < samples; ++j) {
    const ParamVector out = teacher_forward(data.features.data() + j * data.dim);
    for (std::size_t r = 0; r < data.label_width; ++r) {
      data.labels[j * data.label_width + r] = out[r];
    }
  }
  return std::make_unique<MlpOracle>(layers, std::move(data));
}

std::unique_ptr<GradOracle> make_oracle(const ProblemSpec& spec) {
  switch (spec.kind) {
    case ProblemKind::kQuadratic:
      return make_quadratic(spec.dim, spec.condition_number, spec.sigma,
                            spec.seed);
    case ProblemKind::kLogistic:
      return make_logistic(spec.samples == 0 ? 256 : spec.samples, spec.dim,
                           spec.seed);
    case ProblemKind::kMlp:
      return make_mlp(spec.layers, spec.samples == 0 ? 256 : spec.samples,
                      spec.seed);
  }
  throw ConfigError("problem: unknown kind");
}

}  // namespace distef
