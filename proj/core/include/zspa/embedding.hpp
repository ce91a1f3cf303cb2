#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace zspa {

/// Non-owning, read-only view of a row-major float32 matrix. Kernels take
/// views so caller-owned buffers can be scored without a copy.
class MatrixView {
 public:
  MatrixView() = default;
  /// Throws DimensionMismatch if data.size() != rows * cols, BadShape if cols == 0.
  MatrixView(std::span<const float> data, std::size_t rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }
  std::span<const float> data() const noexcept { return data_; }
  std::span<const float> row(std::size_t i) const noexcept {
    return data_.subspan(i * cols_, cols_);
  }

 private:
  std::span<const float> data_{};
  std::size_t rows_ = 0;
  std::size_t cols_ = 1;
};

/// Dense row-major matrix of token embeddings (one token per row).
/// Holds the invariants rows >= 0, cols >= 1, every value finite.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  /// Zero-filled rows x cols matrix.
  EmbeddingMatrix(std::size_t rows, std::size_t cols);
  /// Takes ownership of `data`; validates shape and finiteness.
  EmbeddingMatrix(std::size_t rows, std::size_t cols, std::vector<float> data);
  /// Convenience for small literal matrices; all rows must share one length.
  static EmbeddingMatrix from_rows(const std::vector<std::vector<float>>& rows);
  static EmbeddingMatrix copy_of(MatrixView view);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::span<const float> data() const noexcept { return data_; }
  std::span<const float> row(std::size_t i) const noexcept {
    return std::span<const float>(data_).subspan(i * cols_, cols_);
  }
  std::span<float> mutable_row(std::size_t i) noexcept {
    return std::span<float>(data_).subspan(i * cols_, cols_);
  }

  MatrixView view() const noexcept;
  operator MatrixView() const noexcept { return view(); }

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 1;
  std::vector<float> data_;
};

enum class PoolingMode { none, max, mean };

std::string_view to_string(PoolingMode mode) noexcept;
/// Accepts "none", "max", "mean". Throws InvalidConfig otherwise.
PoolingMode parse_pooling(std::string_view text);

/// Result of prompt simplification. For mean/max pooling `tokens` is a single
/// row; for `none` it is a copy of the full prompt matrix and relevance is
/// aggregated per prompt row downstream.
struct PooledPrompt {
  PoolingMode mode = PoolingMode::mean;
  EmbeddingMatrix tokens;

  /// The pooled vector (row 0). Only meaningful for mean/max.
  std::span<const float> vector() const noexcept { return tokens.row(0); }
};

PooledPrompt mean_pool(MatrixView prompt);
PooledPrompt max_pool(MatrixView prompt);
PooledPrompt pool_prompt(MatrixView prompt, PoolingMode mode);

// Reductions accumulate float products in double across eight interleaved
// lanes combined by a fixed tree, so results are bitwise reproducible and
// exactly scale by powers of two.
double dot(std::span<const float> a, std::span<const float> b) noexcept;
double squared_norm(std::span<const float> a) noexcept;

/// Cosine from a precomputed dot product and squared norms. Returns 0 when
/// either norm is zero; clamps to [-1, 1].
double cosine_from_parts(double dot_ab, double sq_norm_a, double sq_norm_b) noexcept;

/// Cosine similarity; throws DimensionMismatch for unequal lengths.
double cosine_sim(std::span<const float> a, std::span<const float> b);

}  // namespace zspa
