#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "subalign/segmentation.hpp"
#include "subalign/subtitle_io.hpp"

namespace subalign {

using EmbeddingVector = std::vector<double>;

struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major

  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
};

/// Raw text-sign affinities: entry (i, j) = <text_i, sign_j>.
DenseMatrix raw_similarities(const std::vector<EmbeddingVector>& text_embs,
                             const std::vector<EmbeddingVector>& sign_embs);

/// Windowed, row-normalized similarity matrix. Per row, only the window_size
/// temporally nearest signs (by midpoint distance to the cue, ties toward the
/// smaller sign index) survive; the softmax runs over the kept entries alone,
/// so masked entries are exactly 0 and each row sums to 1. Span sums are
/// answered in O(1) from per-row prefix sums built once.
class SimilarityMatrix {
public:
  std::size_t rows() const { return n_; }
  std::size_t cols() const { return m_; }
  int window_size() const { return window_; }

  double at(std::size_t i, std::size_t j) const;

  /// Sum of row i over columns [l, r], inclusive.
  double span_sum(std::size_t i, std::size_t l, std::size_t r) const {
    const double* p = prefix_.data() + i * (m_ + 1);
    return p[r + 1] - p[l];
  }

  /// Dense copy of one row, masked entries included as 0.
  std::vector<double> row(std::size_t i) const;

  /// Indices of the kept (strictly positive) columns of row i, ascending.
  const std::vector<std::uint32_t>& kept_columns(std::size_t i) const { return kept_cols_[i]; }

private:
  friend SimilarityMatrix build_similarity(const DenseMatrix&, const std::vector<SubtitleCue>&,
                                           const std::vector<SignSegment>&, int);
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  int window_ = 0;
  std::vector<std::vector<std::uint32_t>> kept_cols_;
  std::vector<std::vector<double>> kept_vals_;
  std::vector<double> prefix_;  // n rows of (m + 1) running sums
};

/// Cue midpoints are taken from the timings carried by `cues`, i.e. after any
/// pre-alignment offsets have been applied.
SimilarityMatrix build_similarity(const DenseMatrix& raw, const std::vector<SubtitleCue>& cues,
                                  const std::vector<SignSegment>& segments, int window_size);

/// Bounds-checked span sum over columns [l, r] of row cue_index.
double span_similarity(const SimilarityMatrix& matrix, std::size_t cue_index, std::size_t l,
                       std::size_t r);

/// File format: "dim <d>" header, then one "<ordinal> <v1> ... <vd>" record
/// per vector.
std::vector<EmbeddingVector> load_embeddings(std::string_view raw);
std::string write_embeddings(const std::vector<EmbeddingVector>& embeddings);

}  // namespace subalign
