#include "subalign/subtitle_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "subalign/error.hpp"
#include "subalign/util.hpp"

namespace subalign {

namespace {

bool parse_field(std::string_view s, long long& out) {
  auto v = try_parse_int(s);
  if (!v || *v < 0) {
    return false;
  }
  out = *v;
  return true;
}

// "HH:MM:SS,mmm" or "HH:MM:SS.mmm"; returns total milliseconds.
long long parse_timestamp(std::string_view token, std::size_t block) {
  auto fail = [&]() -> long long {
    throw ParseError("block " + std::to_string(block) + ": malformed timestamp '" +
                     std::string(token) + "'");
  };
  std::size_t c1 = token.find(':');
  std::size_t c2 = (c1 == std::string_view::npos) ? std::string_view::npos
                                                  : token.find(':', c1 + 1);
  if (c2 == std::string_view::npos) {
    return fail();
  }
  std::size_t dot = token.find_first_of(",.", c2 + 1);
  if (dot == std::string_view::npos) {
    return fail();
  }
  long long h = 0, m = 0, s = 0, ms = 0;
  std::string_view ms_part = token.substr(dot + 1);
  if (!parse_field(token.substr(0, c1), h) ||
      !parse_field(token.substr(c1 + 1, c2 - c1 - 1), m) ||
      !parse_field(token.substr(c2 + 1, dot - c2 - 1), s) ||
      ms_part.size() != 3 || !parse_field(ms_part, ms)) {
    return fail();
  }
  if (m >= 60 || s >= 60) {
    return fail();
  }
  return ((h * 60 + m) * 60 + s) * 1000 + ms;
}

struct TimeLine {
  long long start_ms = 0;
  long long end_ms = 0;
};

TimeLine parse_time_line(std::string_view line, std::size_t block) {
  std::size_t arrow = line.find("-->");
  if (arrow == std::string_view::npos) {
    throw ParseError("block " + std::to_string(block) + ": expected timestamp line");
  }
  std::string_view lhs = trim(line.substr(0, arrow));
  std::string_view rhs = trim(line.substr(arrow + 3));
  // WebVTT allows cue settings after the end time; take the first token.
  std::size_t ws = rhs.find_first_of(" \t");
  if (ws != std::string_view::npos) {
    rhs = rhs.substr(0, ws);
  }
  return {parse_timestamp(lhs, block), parse_timestamp(rhs, block)};
}

void format_timestamp(std::string& out, long long ms, char sep) {
  char buf[32];
  long long h = ms / 3600000;
  long long m = (ms / 60000) % 60;
  long long s = (ms / 1000) % 60;
  long long frac = ms % 1000;
  std::snprintf(buf, sizeof(buf), "%02lld:%02lld:%02lld%c%03lld", h, m, s, sep, frac);
  out += buf;
}

long long to_millis(double seconds) { return std::llround(seconds * 1000.0); }

void sort_and_index(std::vector<SubtitleCue>& cues) {
  std::stable_sort(cues.begin(), cues.end(),
                   [](const SubtitleCue& a, const SubtitleCue& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < cues.size(); ++i) {
    cues[i].index = i;
  }
}

}  // namespace

std::vector<SubtitleCue> parse_subtitles(std::string_view raw, SubtitleFormat format) {
  // Strip a UTF-8 BOM if present.
  if (raw.size() >= 3 && raw.substr(0, 3) == "\xEF\xBB\xBF") {
    raw.remove_prefix(3);
  }
  std::vector<std::string_view> lines = split_lines(raw);
  std::size_t i = 0;

  if (format == SubtitleFormat::WebVtt) {
    while (i < lines.size() && trim(lines[i]).empty()) {
      ++i;
    }
    if (i >= lines.size() || lines[i].substr(0, 6) != "WEBVTT") {
      throw ParseError("missing WEBVTT header");
    }
    ++i;
  }

  std::vector<SubtitleCue> cues;
  std::size_t block = 0;
  while (i < lines.size()) {
    if (trim(lines[i]).empty()) {
      ++i;
      continue;
    }
    ++block;
    // Optional identifier / SRT counter line before the timestamps.
    if (lines[i].find("-->") == std::string_view::npos) {
      ++i;
      if (i >= lines.size()) {
        throw ParseError("block " + std::to_string(block) + ": expected timestamp line");
      }
    }
    TimeLine tl = parse_time_line(lines[i], block);
    ++i;
    std::string text;
    bool first = true;
    while (i < lines.size() && !trim(lines[i]).empty()) {
      if (!first) {
        text += '\n';
      }
      text.append(lines[i].data(), lines[i].size());
      first = false;
      ++i;
    }
    if (tl.end_ms < tl.start_ms) {
      throw ValidationError("cue " + std::to_string(block) + ": end before start");
    }
    SubtitleCue cue;
    cue.start = static_cast<double>(tl.start_ms) / 1000.0;
    cue.end = static_cast<double>(tl.end_ms) / 1000.0;
    cue.text = std::move(text);
    cues.push_back(std::move(cue));
  }
  sort_and_index(cues);
  return cues;
}

std::string write_subtitles(const std::vector<SubtitleCue>& cues, SubtitleFormat format) {
  std::string out;
  const char sep = (format == SubtitleFormat::Srt) ? ',' : '.';
  if (format == SubtitleFormat::WebVtt) {
    out += "WEBVTT\n";
    if (!cues.empty()) {
      out += '\n';
    }
  }
  for (std::size_t i = 0; i < cues.size(); ++i) {
    const SubtitleCue& cue = cues[i];
    if (cue.start < 0.0 || cue.end < 0.0) {
      throw ValidationError("cue " + std::to_string(i) + ": negative timestamp");
    }
    if (cue.end < cue.start) {
      throw ValidationError("cue " + std::to_string(i) + ": end before start");
    }
    if (format == SubtitleFormat::Srt) {
      out += std::to_string(i + 1);
      out += '\n';
    }
    format_timestamp(out, to_millis(cue.start), sep);
    out += " --> ";
    format_timestamp(out, to_millis(cue.end), sep);
    out += '\n';
    if (!cue.text.empty()) {
      out += cue.text;
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

std::vector<SubtitleCue> apply_offsets(std::vector<SubtitleCue> cues,
                                       const OffsetPair& offsets,
                                       double clamp_floor) {
  for (SubtitleCue& cue : cues) {
    cue.start = std::max(cue.start + offsets.start, clamp_floor);
    cue.end = std::max(cue.end + offsets.end, cue.start);
  }
  sort_and_index(cues);
  return cues;
}

}  // namespace subalign
