#include "subalign/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "subalign/error.hpp"
#include "subalign/util.hpp"

namespace subalign {

DenseMatrix raw_similarities(const std::vector<EmbeddingVector>& text_embs,
                             const std::vector<EmbeddingVector>& sign_embs) {
  if (text_embs.empty() || sign_embs.empty()) {
    throw ValidationError("raw_similarities: need at least one text and one sign embedding");
  }
  const std::size_t dim = text_embs.front().size();
  auto check_dim = [&](const EmbeddingVector& v, const char* side, std::size_t idx) {
    if (v.size() != dim) {
      throw ValidationError("raw_similarities: dimension mismatch, " + std::string(side) + " " +
                            std::to_string(idx) + " has dimension " + std::to_string(v.size()) +
                            " but expected " + std::to_string(dim));
    }
  };
  for (std::size_t i = 0; i < text_embs.size(); ++i) {
    check_dim(text_embs[i], "text embedding", i);
  }
  for (std::size_t j = 0; j < sign_embs.size(); ++j) {
    check_dim(sign_embs[j], "sign embedding", j);
  }

  DenseMatrix out;
  out.rows = text_embs.size();
  out.cols = sign_embs.size();
  out.values.resize(out.rows * out.cols);
  for (std::size_t i = 0; i < out.rows; ++i) {
    const double* u = text_embs[i].data();
    double* row = out.values.data() + i * out.cols;
    for (std::size_t j = 0; j < out.cols; ++j) {
      const double* v = sign_embs[j].data();
      double acc = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        acc += u[k] * v[k];
      }
      row[j] = acc;
    }
  }
  return out;
}

double SimilarityMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= m_) {
    throw ValidationError("similarity entry (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") out of range for a " + std::to_string(n_) + "x" +
                          std::to_string(m_) + " matrix");
  }
  const auto& cols = kept_cols_[i];
  auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<std::uint32_t>(j));
  if (it == cols.end() || *it != j) {
    return 0.0;
  }
  return kept_vals_[i][static_cast<std::size_t>(it - cols.begin())];
}

std::vector<double> SimilarityMatrix::row(std::size_t i) const {
  if (i >= n_) {
    throw ValidationError("similarity row " + std::to_string(i) + " out of range for " +
                          std::to_string(n_) + " rows");
  }
  std::vector<double> out(m_, 0.0);
  const auto& cols = kept_cols_[i];
  const auto& vals = kept_vals_[i];
  for (std::size_t k = 0; k < cols.size(); ++k) {
    out[cols[k]] = vals[k];
  }
  return out;
}

SimilarityMatrix build_similarity(const DenseMatrix& raw, const std::vector<SubtitleCue>& cues,
                                  const std::vector<SignSegment>& segments, int window_size) {
  if (window_size <= 0) {
    throw ValidationError("build_similarity: window_size must be positive");
  }
  if (raw.rows != cues.size() || raw.cols != segments.size()) {
    throw ValidationError("build_similarity: raw matrix is " + std::to_string(raw.rows) + "x" +
                          std::to_string(raw.cols) + " but there are " +
                          std::to_string(cues.size()) + " cues and " +
                          std::to_string(segments.size()) + " segments");
  }

  const std::size_t n = raw.rows;
  const std::size_t m = raw.cols;
  SimilarityMatrix out;
  out.n_ = n;
  out.m_ = m;
  out.window_ = window_size;
  out.kept_cols_.resize(n);
  out.kept_vals_.resize(n);
  out.prefix_.assign(n * (m + 1), 0.0);

  std::vector<double> sign_mid(m);
  for (std::size_t j = 0; j < m; ++j) {
    sign_mid[j] = 0.5 * (segments[j].start + segments[j].end);
  }

  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(window_size), m);
  std::vector<std::pair<double, std::uint32_t>> order(m);
  for (std::size_t i = 0; i < n; ++i) {
    const double cue_mid = 0.5 * (cues[i].start + cues[i].end);
    for (std::size_t j = 0; j < m; ++j) {
      order[j] = {std::abs(sign_mid[j] - cue_mid), static_cast<std::uint32_t>(j)};
    }
    if (keep < m) {
      std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep - 1),
                       order.end());
    }

    auto& cols = out.kept_cols_[i];
    cols.resize(keep);
    for (std::size_t k = 0; k < keep; ++k) {
      cols[k] = order[k].second;
    }
    std::sort(cols.begin(), cols.end());

    // Softmax over the kept raw entries only.
    double mx = -std::numeric_limits<double>::infinity();
    for (std::uint32_t c : cols) {
      mx = std::max(mx, raw.at(i, c));
    }
    auto& vals = out.kept_vals_[i];
    vals.resize(keep);
    double denom = 0.0;
    for (std::size_t k = 0; k < keep; ++k) {
      vals[k] = std::exp(raw.at(i, cols[k]) - mx);
      denom += vals[k];
    }
    for (double& v : vals) {
      v /= denom;
    }

    double* p = out.prefix_.data() + i * (m + 1);
    p[0] = 0.0;
    std::size_t k = 0;
    for (std::size_t j = 0; j < m; ++j) {
      double entry = 0.0;
      if (k < keep && cols[k] == j) {
        entry = vals[k];
        ++k;
      }
      p[j + 1] = p[j] + entry;
    }
  }
  return out;
}

double span_similarity(const SimilarityMatrix& matrix, std::size_t cue_index, std::size_t l,
                       std::size_t r) {
  if (cue_index >= matrix.rows() || l > r || r >= matrix.cols()) {
    throw ValidationError("span_similarity: indices out of range (row " +
                          std::to_string(cue_index) + ", span " + std::to_string(l) + ".." +
                          std::to_string(r) + " in " + std::to_string(matrix.rows()) + "x" +
                          std::to_string(matrix.cols()) + ")");
  }
  return matrix.span_sum(cue_index, l, r);
}

std::vector<EmbeddingVector> load_embeddings(std::string_view raw) {
  std::vector<EmbeddingVector> out;
  long long dim = -1;
  std::size_t record = 0;
  for (std::string_view line : split_lines(raw)) {
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') {
      continue;
    }
    std::vector<std::string_view> fields = split_ws(body);
    if (dim < 0) {
      if (fields.size() != 2 || fields[0] != "dim") {
        throw ParseError("embedding file must start with a 'dim <d>' header");
      }
      auto d = try_parse_int(fields[1]);
      if (!d || *d <= 0) {
        throw ParseError("embedding file has invalid dimension '" + std::string(fields[1]) + "'");
      }
      dim = *d;
      continue;
    }
    ++record;
    if (fields.size() != static_cast<std::size_t>(dim) + 1) {
      throw ParseError("record " + std::to_string(record) + ": expected id plus " +
                       std::to_string(dim) + " components");
    }
    auto id = try_parse_int(fields[0]);
    if (!id || *id != static_cast<long long>(record - 1)) {
      throw ParseError("record " + std::to_string(record) + ": id must equal the ordinal " +
                       std::to_string(record - 1));
    }
    EmbeddingVector vec(static_cast<std::size_t>(dim));
    for (std::size_t k = 0; k < vec.size(); ++k) {
      auto v = try_parse_double(fields[k + 1]);
      if (!v || !std::isfinite(*v)) {
        throw ParseError("record " + std::to_string(record) + ": non-finite component '" +
                         std::string(fields[k + 1]) + "'");
      }
      vec[k] = *v;
    }
    out.push_back(std::move(vec));
  }
  if (dim < 0) {
    throw ParseError("embedding file must start with a 'dim <d>' header");
  }
  return out;
}

std::string write_embeddings(const std::vector<EmbeddingVector>& embeddings) {
  std::string out;
  const std::size_t dim = embeddings.empty() ? 0 : embeddings.front().size();
  out += "dim " + std::to_string(dim) + "\n";
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    out += std::to_string(i);
    for (double v : embeddings[i]) {
      out += ' ';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace subalign
