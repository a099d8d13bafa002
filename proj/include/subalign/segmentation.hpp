#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace subalign {

/// One detected sign: a half-open slice of the video timeline, in seconds.
struct SignSegment {
  std::size_t index = 0;
  double start = 0.0;
  double end = 0.0;
  std::string label;  // optional gloss

  double duration() const { return end - start; }

  friend bool operator==(const SignSegment&, const SignSegment&) = default;
};

/// Frame-level BIO tag probabilities, one (p_B, p_I, p_O) triple per frame.
struct FrameProbs {
  double fps = 0.0;
  std::vector<std::array<double, 3>> rows;
};

/// Threshold decoder over frame probabilities. Scanning left to right:
/// outside a segment, a segment opens at the first frame with
/// p_B*100 >= b_threshold; inside, it closes just before the first frame
/// with p_O*100 >= o_threshold (an open segment closes at the last frame).
/// A segment that opens and closes on the same frame keeps one frame of
/// duration. A high-B frame inside an open segment does not restart it.
std::vector<SignSegment> decode_bio(const FrameProbs& probs, double b_threshold,
                                    double o_threshold);

/// Parses "start end [label]" records; returns sorted, validated segments.
std::vector<SignSegment> load_segments(std::string_view raw);
std::string write_segments(const std::vector<SignSegment>& segments);

/// Sorts by start, renumbers, and rejects end < start and overlaps.
std::vector<SignSegment> validate_segments(std::vector<SignSegment> segments);

/// File format: "fps <value>" header line, then one "b i o" row per frame.
FrameProbs load_frame_probs(std::string_view raw);
std::string write_frame_probs(const FrameProbs& probs);

}  // namespace subalign
