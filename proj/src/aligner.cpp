#include "subalign/aligner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subalign/error.hpp"

namespace subalign {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shared cost evaluator; the gap prefix array makes every evaluation O(1).
struct CostContext {
  const std::vector<SignSegment>& segs;
  const AlignConfig& cfg;
  const SimilarityMatrix* matrix;
  std::vector<double> gap_prefix;  // gap_prefix[j] = total gap before sign j

  CostContext(const std::vector<SignSegment>& segs_, const AlignConfig& cfg_,
              const SimilarityMatrix* matrix_)
      : segs(segs_), cfg(cfg_), matrix(matrix_) {
    gap_prefix.resize(segs.size(), 0.0);
    for (std::size_t j = 1; j < segs.size(); ++j) {
      gap_prefix[j] = gap_prefix[j - 1] + std::max(0.0, segs[j].start - segs[j - 1].end);
    }
  }

  CostTerms terms(const SubtitleCue& t, std::size_t sim_row, std::size_t l,
                  std::size_t r) const {
    CostTerms ct;
    ct.onset = std::abs(t.start - segs[l].start);
    ct.offset = std::abs(t.end - segs[r].end);
    ct.duration = std::abs(t.duration() - (segs[r].end - segs[l].start));
    ct.gap = gap_prefix[r] - gap_prefix[l];
    ct.similarity = matrix ? matrix->span_sum(sim_row, l, r) : 0.0;
    return ct;
  }

  double cost(const SubtitleCue& t, std::size_t sim_row, std::size_t l, std::size_t r) const {
    return terms(t, sim_row, l, r).total(cfg);
  }
};

void check_span(std::size_t l, std::size_t r, std::size_t m) {
  if (l > r || r >= m) {
    throw ValidationError("span_cost: invalid span " + std::to_string(l) + ".." +
                          std::to_string(r) + " over " + std::to_string(m) + " segments");
  }
}

// Index range [lo, hi] of `values` within `radius` of `center`; empty when
// lo > hi. `values` must be nondecreasing.
std::pair<std::ptrdiff_t, std::ptrdiff_t> index_window(const std::vector<double>& values,
                                                       double center, double radius) {
  auto lo_it = std::lower_bound(values.begin(), values.end(), center - radius);
  auto hi_it = std::upper_bound(values.begin(), values.end(), center + radius);
  return {lo_it - values.begin(), (hi_it - values.begin()) - 1};
}

struct DpRun {
  bool feasible = false;
  double total = kInf;
  std::size_t j_star = 0;
  std::vector<std::int32_t> pred;  // (n+1) x (m+1), chosen k per cell
};

// dp[i][j]: best cost of aligning the first i cues to the first j signs, cue i
// taking signs [k, j-1] for some k in [i-1, j-1]. Rows are rolled; the
// predecessor table is kept whole for backtracking.
DpRun run_dp(const CostContext& ctx, const std::vector<SubtitleCue>& cues,
             const std::vector<double>& starts, const std::vector<double>& ends,
             double max_shift) {
  const std::size_t n = cues.size();
  const std::size_t m = ctx.segs.size();
  DpRun run;
  run.pred.assign((n + 1) * (m + 1), -1);

  std::vector<double> prev(m + 1, kInf);
  std::vector<double> cur(m + 1, kInf);
  prev[0] = 0.0;

  for (std::size_t i = 1; i <= n; ++i) {
    const SubtitleCue& cue = cues[i - 1];
    std::fill(cur.begin(), cur.end(), kInf);
    auto [klo, khi] = index_window(starts, cue.start, max_shift);
    auto [rlo, rhi] = index_window(ends, cue.end, max_shift);
    klo = std::max<std::ptrdiff_t>(klo, static_cast<std::ptrdiff_t>(i) - 1);
    rlo = std::max<std::ptrdiff_t>(rlo, static_cast<std::ptrdiff_t>(i) - 1);
    for (std::ptrdiff_t r = rlo; r <= rhi; ++r) {
      double best = kInf;
      std::int32_t arg = -1;
      const std::ptrdiff_t kend = std::min(khi, r);
      for (std::ptrdiff_t k = klo; k <= kend; ++k) {
        const double base = prev[static_cast<std::size_t>(k)];
        if (!(base < kInf)) {
          continue;
        }
        const double c =
            base + ctx.cost(cue, i - 1, static_cast<std::size_t>(k), static_cast<std::size_t>(r));
        if (c < best) {
          best = c;
          arg = static_cast<std::int32_t>(k);
        }
      }
      if (arg >= 0) {
        cur[static_cast<std::size_t>(r) + 1] = best;
        run.pred[i * (m + 1) + static_cast<std::size_t>(r) + 1] = arg;
      }
    }
    std::swap(prev, cur);
  }

  for (std::size_t j = 0; j <= m; ++j) {
    if (prev[j] < run.total) {
      run.total = prev[j];
      run.j_star = j;
      run.feasible = true;
    }
  }
  return run;
}

std::vector<std::pair<std::size_t, std::size_t>> split_on_gap(
    const std::vector<SignSegment>& segs, std::size_t l, std::size_t r, double max_gap) {
  std::vector<std::pair<std::size_t, std::size_t>> subgroups;
  std::size_t cur_l = l;
  for (std::size_t t = l; t < r; ++t) {
    if (segs[t + 1].start - segs[t].end > max_gap) {
      subgroups.emplace_back(cur_l, t);
      cur_l = t + 1;
    }
  }
  subgroups.emplace_back(cur_l, r);
  return subgroups;
}

std::pair<std::size_t, std::size_t> pick_best(const CostContext& ctx, const SubtitleCue& cue,
                                              std::size_t sim_row, std::size_t l, std::size_t r) {
  auto subgroups = split_on_gap(ctx.segs, l, r, ctx.cfg.max_gap);
  std::pair<std::size_t, std::size_t> best = subgroups.front();
  double best_cost = ctx.cost(cue, sim_row, best.first, best.second);
  for (std::size_t s = 1; s < subgroups.size(); ++s) {
    double c = ctx.cost(cue, sim_row, subgroups[s].first, subgroups[s].second);
    if (c < best_cost) {
      best_cost = c;
      best = subgroups[s];
    }
  }
  return best;
}

}  // namespace

void AlignConfig::validate() const {
  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!finite_nonneg(w_dur) || !finite_nonneg(w_gap) || !finite_nonneg(w_sim)) {
    throw ValidationError("config: weights must be finite and nonnegative");
  }
  if (window_size < 1) {
    throw ValidationError("config: window_size must be >= 1");
  }
  if (!(max_gap > 0.0)) {
    throw ValidationError("config: max_gap must be positive");
  }
  if (!(max_shift > 0.0)) {
    throw ValidationError("config: max_shift must be positive");
  }
  if (b_threshold < 0.0 || b_threshold > 100.0 || o_threshold < 0.0 || o_threshold > 100.0) {
    throw ValidationError("config: thresholds must lie in [0, 100]");
  }
  if (!std::isfinite(pre_offsets.start) || !std::isfinite(pre_offsets.end) ||
      !std::isfinite(post_offsets.start) || !std::isfinite(post_offsets.end)) {
    throw ValidationError("config: offsets must be finite");
  }
}

CostTerms span_cost_terms(const SubtitleCue& cue, const std::vector<SignSegment>& segments,
                          std::size_t l, std::size_t r, const AlignConfig& config,
                          const SimilarityMatrix* matrix, std::size_t cue_index) {
  check_span(l, r, segments.size());
  if (matrix && cue_index >= matrix->rows()) {
    throw ValidationError("span_cost: cue_index " + std::to_string(cue_index) +
                          " out of range for a " + std::to_string(matrix->rows()) + "-row matrix");
  }
  CostContext ctx(segments, config, matrix);
  return ctx.terms(cue, cue_index, l, r);
}

double span_cost(const SubtitleCue& cue, const std::vector<SignSegment>& segments, std::size_t l,
                 std::size_t r, const AlignConfig& config, const SimilarityMatrix* matrix,
                 std::size_t cue_index) {
  return span_cost_terms(cue, segments, l, r, config, matrix, cue_index).total(config);
}

std::pair<std::size_t, std::size_t> refine_span(std::pair<std::size_t, std::size_t> group,
                                                const SubtitleCue& cue,
                                                const std::vector<SignSegment>& segments,
                                                const AlignConfig& config,
                                                const SimilarityMatrix* matrix,
                                                std::size_t cue_index) {
  check_span(group.first, group.second, segments.size());
  CostContext ctx(segments, config, matrix);
  return pick_best(ctx, cue, cue_index, group.first, group.second);
}

AlignmentResult align(const std::vector<SubtitleCue>& cues,
                      const std::vector<SignSegment>& segments, const AlignConfig& config,
                      const SimilarityMatrix* matrix) {
  config.validate();
  const std::size_t n = cues.size();
  const std::size_t m = segments.size();
  if (n == 0) {
    throw ValidationError("align: no cues");
  }
  if (m < n) {
    throw InfeasibleError("align: " + std::to_string(n) +
                          " cues need at least as many signs, got " + std::to_string(m));
  }
  if (matrix && (matrix->rows() != n || matrix->cols() != m)) {
    throw ValidationError("align: similarity matrix is " + std::to_string(matrix->rows()) + "x" +
                          std::to_string(matrix->cols()) + " but there are " + std::to_string(n) +
                          " cues and " + std::to_string(m) + " signs");
  }

  CostContext ctx(segments, config, matrix);
  std::vector<double> starts(m), ends(m);
  for (std::size_t j = 0; j < m; ++j) {
    starts[j] = segments[j].start;
    ends[j] = segments[j].end;
  }

  DpRun run = run_dp(ctx, cues, starts, ends, config.max_shift);
  if (!run.feasible) {
    run = run_dp(ctx, cues, starts, ends, config.max_shift * 2.0);
  }
  if (!run.feasible) {
    throw InfeasibleError("align: no assignment within max_shift=" +
                          std::to_string(config.max_shift) +
                          "s of the prior timings (doubling it once did not help); "
                          "retry with a larger max_shift");
  }

  AlignmentResult result;
  result.total_cost = run.total;
  result.best_ending = run.j_star;
  result.spans.resize(n);

  std::size_t j = run.j_star;
  for (std::size_t i = n; i >= 1; --i) {
    std::int32_t k = run.pred[i * (m + 1) + j];
    CueAlignment& ca = result.spans[i - 1];
    ca.cue_index = i - 1;
    ca.span_l = static_cast<std::size_t>(k);
    ca.span_r = j - 1;
    j = static_cast<std::size_t>(k);
  }

  result.aligned_cues.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    CueAlignment& ca = result.spans[i];
    ca.span_cost = ctx.cost(cues[i], i, ca.span_l, ca.span_r);
    auto refined = pick_best(ctx, cues[i], i, ca.span_l, ca.span_r);
    ca.refined_l = refined.first;
    ca.refined_r = refined.second;
    ca.refined_terms = ctx.terms(cues[i], i, ca.refined_l, ca.refined_r);
    ca.refined_cost = ca.refined_terms.total(config);
    ca.new_start = segments[ca.refined_l].start + config.post_offsets.start;
    ca.new_end = segments[ca.refined_r].end + config.post_offsets.end;

    SubtitleCue out;
    out.index = i;
    out.start = segments[ca.refined_l].start;
    out.end = segments[ca.refined_r].end;
    out.text = cues[i].text;
    result.aligned_cues.push_back(std::move(out));
  }
  result.aligned_cues = apply_offsets(std::move(result.aligned_cues), config.post_offsets, 0.0);
  return result;
}

AlignmentResult align_episode(const EpisodeInputs& inputs, const AlignConfig& config) {
  config.validate();
  std::vector<SubtitleCue> cues = apply_offsets(inputs.cues, config.pre_offsets, 0.0);

  std::vector<SignSegment> segments;
  if (inputs.probs.has_value()) {
    segments = decode_bio(*inputs.probs, config.b_threshold, config.o_threshold);
  } else if (inputs.segments.has_value()) {
    segments = validate_segments(*inputs.segments);
  } else {
    throw ValidationError("align_episode: need frame probabilities or sign segments");
  }

  const bool has_text = inputs.text_embeddings.has_value();
  const bool has_sign = inputs.sign_embeddings.has_value();
  if (has_text != has_sign) {
    throw ValidationError("align_episode: text and sign embeddings must be provided together");
  }

  if (has_text) {
    if (inputs.text_embeddings->size() != cues.size()) {
      throw ValidationError("align_episode: " + std::to_string(inputs.text_embeddings->size()) +
                            " text embeddings for " + std::to_string(cues.size()) + " cues");
    }
    if (inputs.sign_embeddings->size() != segments.size()) {
      throw ValidationError("align_episode: " + std::to_string(inputs.sign_embeddings->size()) +
                            " sign embeddings for " + std::to_string(segments.size()) + " signs");
    }
    DenseMatrix raw = raw_similarities(*inputs.text_embeddings, *inputs.sign_embeddings);
    SimilarityMatrix matrix = build_similarity(raw, cues, segments, config.window_size);
    return align(cues, segments, config, &matrix);
  }
  return align(cues, segments, config, nullptr);
}

}  // namespace subalign
