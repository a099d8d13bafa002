#pragma once

#include <map>
#include <optional>
#include <vector>

#include "subalign/subtitle_io.hpp"

namespace subalign {

/// Intersection over union of two closed intervals. When both have zero
/// length the value is 1 for identical points and 0 otherwise.
double interval_iou(double a_start, double a_end, double b_start, double b_end);

/// Fraction of index-paired cues whose IoU with gold reaches the threshold.
/// With one prediction per gold cue this equals precision, recall, and F1.
double f1_at(const std::vector<SubtitleCue>& pred, const std::vector<SubtitleCue>& gold,
             double threshold);

/// Labels every frame with the covering cue index (first covering cue wins)
/// under pred and gold, and returns the fraction of matching labels among
/// frames covered by either side. No covered frames at all counts as 1.
double frame_accuracy(const std::vector<SubtitleCue>& pred,
                      const std::vector<SubtitleCue>& gold, double fps);

enum class OffsetStatistic { Median, Mean };

/// Per-boundary statistic of (gold - orig) over index-paired cues.
OffsetPair estimate_offsets(const std::vector<SubtitleCue>& orig,
                            const std::vector<SubtitleCue>& gold, OffsetStatistic statistic);

struct EvalReport {
  std::map<double, double> f1_at_thresholds;
  std::optional<double> frame_acc;
  std::vector<double> per_cue_iou;
  std::size_t n_evaluated = 0;
};

EvalReport evaluate(const std::vector<SubtitleCue>& pred, const std::vector<SubtitleCue>& gold,
                    const std::vector<double>& thresholds,
                    std::optional<double> fps = std::nullopt);

}  // namespace subalign
