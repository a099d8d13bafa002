#include "subalign/segmentation.hpp"

#include <algorithm>
#include <cmath>

#include "subalign/error.hpp"
#include "subalign/util.hpp"

namespace subalign {

namespace {

constexpr double kProbSumTolerance = 1e-6;

double parse_number(std::string_view token, std::size_t record, const char* what) {
  auto v = try_parse_double(token);
  if (!v) {
    throw ParseError("record " + std::to_string(record) + ": non-numeric " + what + " '" +
                     std::string(token) + "'");
  }
  return *v;
}

}  // namespace

std::vector<SignSegment> decode_bio(const FrameProbs& probs, double b_threshold,
                                    double o_threshold) {
  if (probs.rows.empty()) {
    throw ValidationError("decode_bio: empty frame sequence");
  }
  if (!(probs.fps > 0.0)) {
    throw ValidationError("decode_bio: fps must be positive");
  }
  if (b_threshold < 0.0 || b_threshold > 100.0 || o_threshold < 0.0 || o_threshold > 100.0) {
    throw ValidationError("decode_bio: thresholds must lie in [0, 100]");
  }
  for (std::size_t f = 0; f < probs.rows.size(); ++f) {
    const auto& row = probs.rows[f];
    if (row[0] < 0.0 || row[1] < 0.0 || row[2] < 0.0 ||
        std::abs(row[0] + row[1] + row[2] - 1.0) > kProbSumTolerance) {
      throw ValidationError("decode_bio: frame " + std::to_string(f) +
                            " is not a probability triple");
    }
  }

  std::vector<SignSegment> out;
  const double fps = probs.fps;
  auto emit = [&](long long open_frame, long long last_frame) {
    // Same-frame open/close yields a minimum one-frame segment.
    long long end_frame = std::max(last_frame + 1, open_frame + 1);
    SignSegment seg;
    seg.index = out.size();
    seg.start = static_cast<double>(open_frame) / fps;
    seg.end = static_cast<double>(end_frame) / fps;
    out.push_back(std::move(seg));
  };

  bool inside = false;
  long long open_frame = 0;
  const long long n_frames = static_cast<long long>(probs.rows.size());
  for (long long f = 0; f < n_frames; ++f) {
    const double b = probs.rows[static_cast<std::size_t>(f)][0] * 100.0;
    const double o = probs.rows[static_cast<std::size_t>(f)][2] * 100.0;
    if (inside && o >= o_threshold) {
      emit(open_frame, f - 1);
      inside = false;
    }
    if (!inside && b >= b_threshold) {
      inside = true;
      open_frame = f;
      if (o >= o_threshold) {
        emit(open_frame, f - 1);
        inside = false;
      }
    }
  }
  if (inside) {
    emit(open_frame, n_frames - 1);
  }
  return out;
}

std::vector<SignSegment> validate_segments(std::vector<SignSegment> segments) {
  for (const SignSegment& seg : segments) {
    if (seg.end < seg.start) {
      throw ValidationError("segment record " + std::to_string(seg.index + 1) +
                            ": end before start");
    }
  }
  std::stable_sort(segments.begin(), segments.end(),
                   [](const SignSegment& a, const SignSegment& b) { return a.start < b.start; });
  for (std::size_t i = 1; i < segments.size(); ++i) {
    if (segments[i].start < segments[i - 1].end) {
      throw ValidationError("segment records " + std::to_string(segments[i - 1].index + 1) +
                            " and " + std::to_string(segments[i].index + 1) + " overlap");
    }
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    segments[i].index = i;
  }
  return segments;
}

std::vector<SignSegment> load_segments(std::string_view raw) {
  std::vector<SignSegment> segments;
  std::size_t record = 0;
  for (std::string_view line : split_lines(raw)) {
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') {
      continue;
    }
    ++record;
    std::vector<std::string_view> fields = split_ws(body);
    if (fields.size() < 2) {
      throw ParseError("record " + std::to_string(record) + ": expected 'start end [label]'");
    }
    SignSegment seg;
    seg.index = record - 1;  // original record number, rewritten after sorting
    seg.start = parse_number(fields[0], record, "start");
    seg.end = parse_number(fields[1], record, "end");
    if (fields.size() > 2) {
      const char* label_begin = fields[2].data();
      const char* body_end = body.data() + body.size();
      seg.label = std::string(trim(std::string_view(
          label_begin, static_cast<std::size_t>(body_end - label_begin))));
    }
    segments.push_back(std::move(seg));
  }
  return validate_segments(std::move(segments));
}

std::string write_segments(const std::vector<SignSegment>& segments) {
  std::string out;
  for (const SignSegment& seg : segments) {
    out += format_double(seg.start);
    out += ' ';
    out += format_double(seg.end);
    if (!seg.label.empty()) {
      out += ' ';
      out += seg.label;
    }
    out += '\n';
  }
  return out;
}

FrameProbs load_frame_probs(std::string_view raw) {
  FrameProbs probs;
  bool have_fps = false;
  std::size_t record = 0;
  for (std::string_view line : split_lines(raw)) {
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') {
      continue;
    }
    if (!have_fps) {
      std::vector<std::string_view> fields = split_ws(body);
      if (fields.size() != 2 || fields[0] != "fps") {
        throw ParseError("frame probability file must start with an 'fps <value>' header");
      }
      probs.fps = parse_number(fields[1], 0, "fps");
      if (!(probs.fps > 0.0)) {
        throw ValidationError("fps must be positive");
      }
      have_fps = true;
      continue;
    }
    ++record;
    std::vector<std::string_view> fields = split_ws(body);
    if (fields.size() != 3) {
      throw ParseError("record " + std::to_string(record) + ": expected three probabilities");
    }
    std::array<double, 3> row{};
    for (int k = 0; k < 3; ++k) {
      row[static_cast<std::size_t>(k)] = parse_number(fields[static_cast<std::size_t>(k)],
                                                      record, "probability");
    }
    double sum = row[0] + row[1] + row[2];
    if (row[0] < 0.0 || row[1] < 0.0 || row[2] < 0.0 || std::abs(sum - 1.0) > kProbSumTolerance) {
      throw ValidationError("record " + std::to_string(record) +
                            ": probabilities must be nonnegative and sum to 1");
    }
    probs.rows.push_back(row);
  }
  if (!have_fps) {
    throw ParseError("frame probability file must start with an 'fps <value>' header");
  }
  return probs;
}

std::string write_frame_probs(const FrameProbs& probs) {
  std::string out = "fps " + format_double(probs.fps) + "\n";
  for (const auto& row : probs.rows) {
    out += format_double(row[0]);
    out += ' ';
    out += format_double(row[1]);
    out += ' ';
    out += format_double(row[2]);
    out += '\n';
  }
  return out;
}

}  // namespace subalign
