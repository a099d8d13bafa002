#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace subalign {

enum class SubtitleFormat { Srt, WebVtt };

/// One timed unit of text. Times are seconds; the parser derives them from
/// integer milliseconds and the writer quantizes back, so write/parse round
/// trips are exact at millisecond precision.
struct SubtitleCue {
  std::size_t index = 0;  // ordinal position, 0-based
  double start = 0.0;
  double end = 0.0;
  std::string text;

  double duration() const { return end - start; }

  friend bool operator==(const SubtitleCue&, const SubtitleCue&) = default;
};

/// Signed shifts (seconds) applied to cue starts and ends.
struct OffsetPair {
  double start = 0.0;
  double end = 0.0;

  friend bool operator==(const OffsetPair&, const OffsetPair&) = default;
};

/// Returns cues sorted by start (ties keep file order), indices 0..n-1.
/// Throws ParseError on malformed blocks, ValidationError when end < start.
std::vector<SubtitleCue> parse_subtitles(std::string_view raw, SubtitleFormat format);

/// Canonical output; SRT numbering is regenerated as 1..n.
/// Throws ValidationError on negative timestamps or end < start.
std::string write_subtitles(const std::vector<SubtitleCue>& cues, SubtitleFormat format);

/// Shifts every cue by the offsets, clamping so start >= clamp_floor and
/// end >= start, then re-sorts on start and renumbers.
std::vector<SubtitleCue> apply_offsets(std::vector<SubtitleCue> cues,
                                       const OffsetPair& offsets,
                                       double clamp_floor = 0.0);

}  // namespace subalign
