#pragma once

#include <optional>
#include <vector>

#include "subalign/segmentation.hpp"
#include "subalign/similarity.hpp"
#include "subalign/subtitle_io.hpp"

namespace subalign {

struct AlignConfig {
  double w_dur = 1.0;   // duration-difference weight
  double w_gap = 5.0;   // internal inter-sign gap weight
  double w_sim = 10.0;  // span similarity reward weight
  int window_size = 50;
  double max_gap = 10.0;  // seconds; refinement splits groups at larger gaps
  OffsetPair pre_offsets;   // applied to cues before the optimization
  OffsetPair post_offsets;  // applied to the rewritten timestamps
  double b_threshold = 30.0;
  double o_threshold = 50.0;
  double max_shift = 60.0;  // seconds; candidate-span pruning radius

  void validate() const;  // throws ValidationError

  friend bool operator==(const AlignConfig&, const AlignConfig&) = default;
};

struct CostTerms {
  double onset = 0.0;       // |start(t) - start(s_l)|
  double offset = 0.0;      // |end(t) - end(s_r)|
  double duration = 0.0;    // unweighted duration difference
  double gap = 0.0;         // unweighted internal gap total
  double similarity = 0.0;  // unweighted span similarity

  double total(const AlignConfig& cfg) const {
    return onset + offset + cfg.w_dur * duration + cfg.w_gap * gap - cfg.w_sim * similarity;
  }

  friend bool operator==(const CostTerms&, const CostTerms&) = default;
};

struct CueAlignment {
  std::size_t cue_index = 0;
  std::size_t span_l = 0;  // sign group chosen by the optimization, inclusive
  std::size_t span_r = 0;
  std::size_t refined_l = 0;  // subgroup kept after gap splitting
  std::size_t refined_r = 0;
  double new_start = 0.0;  // start(s_refined_l) + post start offset
  double new_end = 0.0;    // end(s_refined_r) + post end offset
  double span_cost = 0.0;  // cost of the unrefined group; these sum to total_cost
  double refined_cost = 0.0;
  CostTerms refined_terms;

  friend bool operator==(const CueAlignment&, const CueAlignment&) = default;
};

struct AlignmentResult {
  std::vector<CueAlignment> spans;
  double total_cost = 0.0;      // optimum before refinement
  std::size_t best_ending = 0;  // number of signs consumed; trailing signs stay unassigned
  std::vector<SubtitleCue> aligned_cues;

  friend bool operator==(const AlignmentResult&, const AlignmentResult&) = default;
};

/// Cost of assigning signs [l, r] to a cue:
///   |start(t)-start(s_l)| + |end(t)-end(s_r)| + w_dur*|dur(t)-dur(span)|
///   + w_gap*G(l,r) - w_sim*span_sum(cue_index, l, r)
/// The similarity term is 0 when matrix is null.
double span_cost(const SubtitleCue& cue, const std::vector<SignSegment>& segments, std::size_t l,
                 std::size_t r, const AlignConfig& config,
                 const SimilarityMatrix* matrix = nullptr, std::size_t cue_index = 0);

CostTerms span_cost_terms(const SubtitleCue& cue, const std::vector<SignSegment>& segments,
                          std::size_t l, std::size_t r, const AlignConfig& config,
                          const SimilarityMatrix* matrix = nullptr, std::size_t cue_index = 0);

/// Splits the group wherever the inter-sign gap exceeds max_gap and returns
/// the subgroup of minimum cost (ties to the earliest).
std::pair<std::size_t, std::size_t> refine_span(std::pair<std::size_t, std::size_t> group,
                                                const SubtitleCue& cue,
                                                const std::vector<SignSegment>& segments,
                                                const AlignConfig& config,
                                                const SimilarityMatrix* matrix = nullptr,
                                                std::size_t cue_index = 0);

/// Episode-level assignment of each cue to a contiguous sign span, minimizing
/// the summed span costs over all ordered contiguous partitions of a sign
/// prefix. Cues must already carry their pre-offset-adjusted timings.
/// Candidate spans whose onset or offset distance exceeds config.max_shift are
/// pruned; if that leaves no solution the radius is doubled once before an
/// InfeasibleError is raised. Ties resolve to the smallest index everywhere,
/// so identical inputs give identical results.
AlignmentResult align(const std::vector<SubtitleCue>& cues,
                      const std::vector<SignSegment>& segments, const AlignConfig& config,
                      const SimilarityMatrix* matrix = nullptr);

/// One episode's raw inputs. Exactly one of probs/segments drives the sign
/// sequence (probs win when both are present, so decode thresholds apply);
/// both embedding sides must be present to enable the similarity term.
struct EpisodeInputs {
  std::vector<SubtitleCue> cues;
  std::optional<FrameProbs> probs;
  std::optional<std::vector<SignSegment>> segments;
  std::optional<std::vector<EmbeddingVector>> text_embeddings;
  std::optional<std::vector<EmbeddingVector>> sign_embeddings;
};

/// Full pipeline: pre offsets -> decode/load segments -> optional similarity
/// matrix -> align (with refinement and timestamp rewrite).
AlignmentResult align_episode(const EpisodeInputs& inputs, const AlignConfig& config);

}  // namespace subalign
