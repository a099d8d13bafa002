#include "subalign/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "subalign/error.hpp"

namespace subalign {

namespace {

void check_paired(const std::vector<SubtitleCue>& pred, const std::vector<SubtitleCue>& gold) {
  if (pred.size() != gold.size()) {
    throw ValidationError("evaluation: cue count mismatch, " + std::to_string(pred.size()) +
                          " predicted vs " + std::to_string(gold.size()) + " gold");
  }
}

double statistic_of(std::vector<double>& deltas, OffsetStatistic statistic) {
  if (statistic == OffsetStatistic::Mean) {
    double sum = 0.0;
    for (double d : deltas) {
      sum += d;
    }
    return sum / static_cast<double>(deltas.size());
  }
  std::sort(deltas.begin(), deltas.end());
  const std::size_t n = deltas.size();
  if (n % 2 == 1) {
    return deltas[n / 2];
  }
  return 0.5 * (deltas[n / 2 - 1] + deltas[n / 2]);
}

}  // namespace

double interval_iou(double a_start, double a_end, double b_start, double b_end) {
  if (a_end < a_start || b_end < b_start) {
    throw ValidationError("interval_iou: interval end before start");
  }
  const double inter = std::min(a_end, b_end) - std::max(a_start, b_start);
  const double uni = std::max(a_end, b_end) - std::min(a_start, b_start);
  if (uni <= 0.0) {
    // Both intervals are points: identical points overlap fully.
    return (a_start == b_start) ? 1.0 : 0.0;
  }
  return std::max(0.0, inter) / uni;
}

double f1_at(const std::vector<SubtitleCue>& pred, const std::vector<SubtitleCue>& gold,
             double threshold) {
  check_paired(pred, gold);
  if (pred.empty()) {
    return 1.0;
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (interval_iou(pred[i].start, pred[i].end, gold[i].start, gold[i].end) >= threshold) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double frame_accuracy(const std::vector<SubtitleCue>& pred,
                      const std::vector<SubtitleCue>& gold, double fps) {
  check_paired(pred, gold);
  if (!(fps > 0.0)) {
    throw ValidationError("frame_accuracy: fps must be positive");
  }
  double max_end = 0.0;
  for (const auto& c : pred) {
    max_end = std::max(max_end, c.end);
  }
  for (const auto& c : gold) {
    max_end = std::max(max_end, c.end);
  }
  const long long n_frames = static_cast<long long>(std::ceil(max_end * fps));
  if (n_frames <= 0) {
    return 1.0;
  }

  constexpr long long kNone = -1;
  auto label = [&](const std::vector<SubtitleCue>& cues) {
    std::vector<long long> out(static_cast<std::size_t>(n_frames), kNone);
    // Assign in reverse so the lowest covering cue index wins.
    for (std::size_t c = cues.size(); c-- > 0;) {
      const double start = cues[c].start;
      const double end = cues[c].end;
      long long f = static_cast<long long>(std::floor(start * fps - 0.5)) - 1;
      f = std::max<long long>(f, 0);
      for (; f < n_frames; ++f) {
        const double mid = (static_cast<double>(f) + 0.5) / fps;
        if (mid >= end) {
          break;
        }
        if (mid >= start) {
          out[static_cast<std::size_t>(f)] = static_cast<long long>(c);
        }
      }
    }
    return out;
  };

  const std::vector<long long> p = label(pred);
  const std::vector<long long> g = label(gold);
  long long covered = 0;
  long long matched = 0;
  for (std::size_t f = 0; f < p.size(); ++f) {
    if (p[f] == kNone && g[f] == kNone) {
      continue;
    }
    ++covered;
    if (p[f] == g[f]) {
      ++matched;
    }
  }
  if (covered == 0) {
    return 1.0;
  }
  return static_cast<double>(matched) / static_cast<double>(covered);
}

OffsetPair estimate_offsets(const std::vector<SubtitleCue>& orig,
                            const std::vector<SubtitleCue>& gold, OffsetStatistic statistic) {
  check_paired(orig, gold);
  if (orig.empty()) {
    throw ValidationError("estimate_offsets: empty cue sequences");
  }
  std::vector<double> start_deltas(orig.size());
  std::vector<double> end_deltas(orig.size());
  for (std::size_t i = 0; i < orig.size(); ++i) {
    start_deltas[i] = gold[i].start - orig[i].start;
    end_deltas[i] = gold[i].end - orig[i].end;
  }
  OffsetPair out;
  out.start = statistic_of(start_deltas, statistic);
  out.end = statistic_of(end_deltas, statistic);
  return out;
}

EvalReport evaluate(const std::vector<SubtitleCue>& pred, const std::vector<SubtitleCue>& gold,
                    const std::vector<double>& thresholds, std::optional<double> fps) {
  check_paired(pred, gold);
  EvalReport report;
  report.n_evaluated = pred.size();
  report.per_cue_iou.reserve(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    report.per_cue_iou.push_back(
        interval_iou(pred[i].start, pred[i].end, gold[i].start, gold[i].end));
  }
  for (double t : thresholds) {
    if (!(t > 0.0) || t > 1.0) {
      throw ValidationError("evaluate: IoU thresholds must lie in (0, 1]");
    }
    std::size_t hits = 0;
    for (double iou : report.per_cue_iou) {
      if (iou >= t) {
        ++hits;
      }
    }
    report.f1_at_thresholds[t] =
        pred.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(pred.size());
  }
  if (fps.has_value()) {
    report.frame_acc = frame_accuracy(pred, gold, *fps);
  }
  return report;
}

}  // namespace subalign
