#include "zspa/embedding.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "zspa/error.hpp"

namespace zspa {

namespace {

constexpr std::size_t kLanes = 8;

void check_shape(std::size_t rows, std::size_t cols, std::size_t size) {
  if (cols == 0) throw Error(ErrorCode::BadShape, "embedding dimension must be >= 1");
  if (rows > std::numeric_limits<std::size_t>::max() / cols || size != rows * cols) {
    throw Error(ErrorCode::DimensionMismatch, "data length " + std::to_string(size) +
                                                  " != " + std::to_string(rows) + " x " +
                                                  std::to_string(cols));
  }
}

void check_finite(std::span<const float> data, std::size_t cols) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw Error(ErrorCode::NonFiniteValue, "non-finite value at row " + std::to_string(i / cols) +
                                                 ", column " + std::to_string(i % cols));
    }
  }
}

double combine_lanes(const std::array<double, kLanes>& acc) noexcept {
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
}

}  // namespace

MatrixView::MatrixView(std::span<const float> data, std::size_t rows, std::size_t cols)
    : data_(data), rows_(rows), cols_(cols) {
  check_shape(rows, cols, data.size());
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0f) {
  if (cols == 0) throw Error(ErrorCode::BadShape, "embedding dimension must be >= 1");
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  check_shape(rows_, cols_, data_.size());
  check_finite(data_, cols_);
}

EmbeddingMatrix EmbeddingMatrix::from_rows(const std::vector<std::vector<float>>& rows) {
  if (rows.empty()) throw Error(ErrorCode::BadShape, "from_rows needs at least one row");
  const std::size_t cols = rows.front().size();
  std::vector<float> data;
  data.reserve(rows.size() * cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) {
      throw Error(ErrorCode::DimensionMismatch, "row " + std::to_string(i) + " has length " +
                                                    std::to_string(rows[i].size()) + ", expected " +
                                                    std::to_string(cols));
    }
    data.insert(data.end(), rows[i].begin(), rows[i].end());
  }
  return EmbeddingMatrix(rows.size(), cols, std::move(data));
}

EmbeddingMatrix EmbeddingMatrix::copy_of(MatrixView view) {
  return EmbeddingMatrix(view.rows(), view.cols(),
                         std::vector<float>(view.data().begin(), view.data().end()));
}

MatrixView EmbeddingMatrix::view() const noexcept {
  return MatrixView(std::span<const float>(data_), rows_, cols_);
}

std::string_view to_string(PoolingMode mode) noexcept {
  switch (mode) {
    case PoolingMode::none: return "none";
    case PoolingMode::max: return "max";
    case PoolingMode::mean: return "mean";
  }
  return "unknown";
}

PoolingMode parse_pooling(std::string_view text) {
  if (text == "none") return PoolingMode::none;
  if (text == "max") return PoolingMode::max;
  if (text == "mean") return PoolingMode::mean;
  throw Error(ErrorCode::InvalidConfig, "unknown pooling mode '" + std::string(text) + "'");
}

PooledPrompt mean_pool(MatrixView prompt) {
  if (prompt.empty()) throw Error(ErrorCode::EmptyPrompt, "cannot pool a prompt with 0 tokens");
  const std::size_t d = prompt.cols();
  std::vector<double> sum(d, 0.0);
  for (std::size_t i = 0; i < prompt.rows(); ++i) {
    const auto row = prompt.row(i);
    for (std::size_t j = 0; j < d; ++j) sum[j] += static_cast<double>(row[j]);
  }
  std::vector<float> out(d);
  const auto m = static_cast<double>(prompt.rows());
  for (std::size_t j = 0; j < d; ++j) out[j] = static_cast<float>(sum[j] / m);
  return {PoolingMode::mean, EmbeddingMatrix(1, d, std::move(out))};
}

PooledPrompt max_pool(MatrixView prompt) {
  if (prompt.empty()) throw Error(ErrorCode::EmptyPrompt, "cannot pool a prompt with 0 tokens");
  const auto first = prompt.row(0);
  std::vector<float> out(first.begin(), first.end());
  for (std::size_t i = 1; i < prompt.rows(); ++i) {
    const auto row = prompt.row(i);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::max(out[j], row[j]);
  }
  const std::size_t d = out.size();
  return {PoolingMode::max, EmbeddingMatrix(1, d, std::move(out))};
}

PooledPrompt pool_prompt(MatrixView prompt, PoolingMode mode) {
  switch (mode) {
    case PoolingMode::mean: return mean_pool(prompt);
    case PoolingMode::max: return max_pool(prompt);
    case PoolingMode::none:
      if (prompt.empty()) throw Error(ErrorCode::EmptyPrompt, "prompt has 0 tokens");
      return {PoolingMode::none, EmbeddingMatrix::copy_of(prompt)};
  }
  throw Error(ErrorCode::InvalidConfig, "unknown pooling mode");
}

double dot(std::span<const float> a, std::span<const float> b) noexcept {
  std::array<double, kLanes> acc{};
  const std::size_t n = std::min(a.size(), b.size());
  const float* pa = a.data();
  const float* pb = b.data();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      acc[l] += static_cast<double>(pa[i + l]) * static_cast<double>(pb[i + l]);
    }
  }
  for (std::size_t l = 0; i < n; ++i, ++l) {
    acc[l] += static_cast<double>(pa[i]) * static_cast<double>(pb[i]);
  }
  return combine_lanes(acc);
}

double squared_norm(std::span<const float> a) noexcept { return dot(a, a); }

double cosine_from_parts(double dot_ab, double sq_norm_a, double sq_norm_b) noexcept {
  if (sq_norm_a == 0.0 || sq_norm_b == 0.0) return 0.0;
  // sqrt(x * x) == x in IEEE arithmetic, so cos(v, v) is exactly 1.
  const double c = dot_ab / std::sqrt(sq_norm_a * sq_norm_b);
  return std::clamp(c, -1.0, 1.0);
}

double cosine_sim(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "vector lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  return cosine_from_parts(dot(a, b), squared_norm(a), squared_norm(b));
}

}  // namespace zspa
