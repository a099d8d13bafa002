#pragma once

// Test-side reference implementations, kept independent of the library's
// optimized paths on purpose.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "subalign/aligner.hpp"
#include "subalign/random.hpp"
#include "subalign/similarity.hpp"

namespace oracle {

struct Partition {
  std::vector<std::pair<std::size_t, std::size_t>> spans;  // inclusive per cue
  double cost = 0.0;
  std::size_t ending = 0;  // signs consumed
};

// Prefers the smaller ending, then smaller span starts from the last cue
// backwards; mirrors the aligner's smallest-index tie rule.
inline bool wins_tie(const Partition& a, const Partition& b) {
  if (a.ending != b.ending) {
    return a.ending < b.ending;
  }
  for (std::size_t i = a.spans.size(); i-- > 0;) {
    if (a.spans[i].first != b.spans[i].first) {
      return a.spans[i].first < b.spans[i].first;
    }
  }
  return false;
}

// Exhaustive minimum over every assignment of cues to consecutive sign
// groups tiling a prefix of the signs (trailing signs may stay free).
inline std::optional<Partition> brute_force_align(
    const std::vector<subalign::SubtitleCue>& cues,
    const std::vector<subalign::SignSegment>& segments, const subalign::AlignConfig& cfg,
    const subalign::SimilarityMatrix* matrix = nullptr) {
  const std::size_t n = cues.size();
  const std::size_t m = segments.size();
  std::optional<Partition> best;
  std::vector<std::pair<std::size_t, std::size_t>> spans(n);

  std::function<void(std::size_t, std::size_t, double)> recurse =
      [&](std::size_t i, std::size_t consumed, double acc) {
        if (i == n) {
          Partition p{spans, acc, consumed};
          if (!best || p.cost < best->cost ||
              (p.cost == best->cost && wins_tie(p, *best))) {
            best = std::move(p);
          }
          return;
        }
        const std::size_t remaining = n - i - 1;
        for (std::size_t e = consumed + 1; e + remaining <= m; ++e) {
          spans[i] = {consumed, e - 1};
          const double c =
              subalign::span_cost(cues[i], segments, consumed, e - 1, cfg, matrix, i);
          recurse(i + 1, e, acc + c);
        }
      };
  recurse(0, 0, 0.0);
  return best;
}

// Textbook reference recurrence: full (n+1)x(m+1) table, no pruning, costs
// recomputed from scratch with direct loops. Returns the optimum only.
inline double reference_dp_cost(const std::vector<subalign::SubtitleCue>& cues,
                                const std::vector<subalign::SignSegment>& segs,
                                const subalign::AlignConfig& cfg,
                                const subalign::SimilarityMatrix* matrix = nullptr) {
  const std::size_t n = cues.size();
  const std::size_t m = segs.size();
  const double inf = std::numeric_limits<double>::infinity();

  auto phi = [&](std::size_t i, std::size_t l, std::size_t r) {
    const auto& t = cues[i];
    double gap = 0.0;
    for (std::size_t j = l; j < r; ++j) {
      gap += std::max(0.0, segs[j + 1].start - segs[j].end);
    }
    double sim = 0.0;
    if (matrix) {
      for (std::size_t j = l; j <= r; ++j) {
        sim += matrix->at(i, j);
      }
    }
    return std::abs(t.start - segs[l].start) + std::abs(t.end - segs[r].end) +
           cfg.w_dur * std::abs((t.end - t.start) - (segs[r].end - segs[l].start)) +
           cfg.w_gap * gap - cfg.w_sim * sim;
  };

  std::vector<std::vector<double>> dp(n + 1, std::vector<double>(m + 1, inf));
  dp[0][0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = i; j <= m; ++j) {
      for (std::size_t k = i - 1; k < j; ++k) {
        if (dp[i - 1][k] < inf) {
          dp[i][j] = std::min(dp[i][j], dp[i - 1][k] + phi(i - 1, k, j - 1));
        }
      }
    }
  }
  double best = inf;
  for (std::size_t j = 0; j <= m; ++j) {
    best = std::min(best, dp[n][j]);
  }
  return best;
}

// Scalar-loop dot products, written independently of raw_similarities.
inline std::vector<std::vector<double>> naive_dot_products(
    const std::vector<subalign::EmbeddingVector>& a,
    const std::vector<subalign::EmbeddingVector>& b) {
  std::vector<std::vector<double>> out(a.size(), std::vector<double>(b.size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a[i].size(); ++k) {
        s += a[i][k] * b[j][k];
      }
      out[i][j] = s;
    }
  }
  return out;
}

struct RandomInstance {
  std::vector<subalign::SubtitleCue> cues;
  std::vector<subalign::SignSegment> segments;
  subalign::AlignConfig config;
  std::optional<subalign::SimilarityMatrix> matrix;
};

// Small random episode for optimality checks: n <= 5 cues, m <= 12 signs,
// pruning disabled, matrix present on every other seed.
inline RandomInstance random_instance(std::uint64_t seed, bool with_matrix) {
  subalign::RandomSource rng(seed);
  RandomInstance inst;

  const std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 5));
  const std::size_t m = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(n), 12));

  double t = rng.uniform(0.0, 2.0);
  for (std::size_t j = 0; j < m; ++j) {
    subalign::SignSegment seg;
    seg.index = j;
    seg.start = t;
    seg.end = t + rng.uniform(0.2, 1.5);
    t = seg.end + rng.uniform(0.0, 2.0);
    inst.segments.push_back(seg);
  }
  const double horizon = t;

  std::vector<double> starts(n);
  for (double& s : starts) {
    s = rng.uniform(0.0, horizon);
  }
  std::sort(starts.begin(), starts.end());
  for (std::size_t i = 0; i < n; ++i) {
    subalign::SubtitleCue cue;
    cue.index = i;
    cue.start = starts[i];
    cue.end = starts[i] + rng.uniform(0.3, 4.0);
    cue.text = "cue " + std::to_string(i);
    inst.cues.push_back(std::move(cue));
  }

  inst.config.w_dur = rng.uniform(0.0, 5.0);
  inst.config.w_gap = rng.uniform(0.0, 5.0);
  inst.config.w_sim = with_matrix ? rng.uniform(0.0, 20.0) : 0.0;
  inst.config.window_size = static_cast<int>(rng.uniform_int(1, static_cast<std::int64_t>(m) + 3));
  inst.config.max_shift = 1e9;  // pruning disabled

  if (with_matrix) {
    const std::size_t dim = 8;
    auto draw_vecs = [&](std::size_t count) {
      std::vector<subalign::EmbeddingVector> vecs(count, subalign::EmbeddingVector(dim));
      for (auto& v : vecs) {
        for (double& x : v) {
          x = rng.uniform(-1.0, 1.0);
        }
      }
      return vecs;
    };
    const auto text = draw_vecs(n);
    const auto sign = draw_vecs(m);
    inst.matrix = subalign::build_similarity(subalign::raw_similarities(text, sign), inst.cues,
                                             inst.segments, inst.config.window_size);
  }
  return inst;
}

}  // namespace oracle
