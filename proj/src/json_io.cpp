#include "subalign/json_io.hpp"

#include <filesystem>

#include "subalign/error.hpp"
#include "subalign/util.hpp"

namespace subalign {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw ParseError("invalid JSON in " + what);
  }
  return j;
}

double get_num(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) {
    return fallback;
  }
  if (!j.at(key).is_number()) {
    throw ParseError(std::string("field '") + key + "' must be a number");
  }
  return j.at(key).get<double>();
}

OffsetPair get_offsets(const json& j, const char* key, OffsetPair fallback) {
  if (!j.contains(key)) {
    return fallback;
  }
  const json& o = j.at(key);
  if (!o.is_object()) {
    throw ParseError(std::string("field '") + key + "' must be an object with start/end");
  }
  OffsetPair out;
  out.start = get_num(o, "start", fallback.start);
  out.end = get_num(o, "end", fallback.end);
  return out;
}

}  // namespace

AlignConfig align_config_from_json(const json& j, const AlignConfig& base) {
  if (!j.is_object()) {
    throw ParseError("config document must be a JSON object");
  }
  AlignConfig cfg = base;
  cfg.w_dur = get_num(j, "w_dur", base.w_dur);
  cfg.w_gap = get_num(j, "w_gap", base.w_gap);
  cfg.w_sim = get_num(j, "w_sim", base.w_sim);
  cfg.window_size = static_cast<int>(get_num(j, "window_size", base.window_size));
  cfg.max_gap = get_num(j, "max_gap", base.max_gap);
  cfg.pre_offsets = get_offsets(j, "pre_offsets", base.pre_offsets);
  cfg.post_offsets = get_offsets(j, "post_offsets", base.post_offsets);
  cfg.b_threshold = get_num(j, "b_threshold", base.b_threshold);
  cfg.o_threshold = get_num(j, "o_threshold", base.o_threshold);
  cfg.max_shift = get_num(j, "max_shift", base.max_shift);
  cfg.validate();
  return cfg;
}

json align_config_to_json(const AlignConfig& cfg) {
  return json{
      {"w_dur", cfg.w_dur},
      {"w_gap", cfg.w_gap},
      {"w_sim", cfg.w_sim},
      {"window_size", cfg.window_size},
      {"max_gap", cfg.max_gap},
      {"pre_offsets", {{"start", cfg.pre_offsets.start}, {"end", cfg.pre_offsets.end}}},
      {"post_offsets", {{"start", cfg.post_offsets.start}, {"end", cfg.post_offsets.end}}},
      {"b_threshold", cfg.b_threshold},
      {"o_threshold", cfg.o_threshold},
      {"max_shift", cfg.max_shift},
  };
}

AlignConfig load_align_config(const std::string& path, const AlignConfig& base) {
  return align_config_from_json(parse_json(read_text_file(path), path), base);
}

SynthSpec synth_spec_from_json(const json& j, const SynthSpec& base) {
  if (!j.is_object()) {
    throw ParseError("synth spec document must be a JSON object");
  }
  SynthSpec spec = base;
  spec.seed = static_cast<std::uint64_t>(get_num(j, "seed", static_cast<double>(base.seed)));
  spec.n_sentences = static_cast<int>(get_num(j, "n_sentences", base.n_sentences));
  auto range = [&](const char* key, ValueRange fallback) {
    if (!j.contains(key)) {
      return fallback;
    }
    const json& r = j.at(key);
    if (!r.is_object()) {
      throw ParseError(std::string("field '") + key + "' must be an object with low/high");
    }
    return ValueRange{get_num(r, "low", fallback.low), get_num(r, "high", fallback.high)};
  };
  if (j.contains("signs_per_sentence")) {
    const json& r = j.at("signs_per_sentence");
    spec.signs_per_sentence = {
        static_cast<int>(get_num(r, "low", base.signs_per_sentence.low)),
        static_cast<int>(get_num(r, "high", base.signs_per_sentence.high))};
  }
  spec.sign_duration = range("sign_duration", base.sign_duration);
  spec.intra_gap = range("intra_gap", base.intra_gap);
  spec.inter_gap = range("inter_gap", base.inter_gap);
  spec.prior_shift = get_num(j, "prior_shift", base.prior_shift);
  spec.jitter = get_num(j, "jitter", base.jitter);
  spec.embed_dim = static_cast<int>(get_num(j, "embed_dim", base.embed_dim));
  spec.embed_noise = get_num(j, "embed_noise", base.embed_noise);
  spec.fps = get_num(j, "fps", base.fps);
  spec.label_smoothing = get_num(j, "label_smoothing", base.label_smoothing);
  spec.validate();
  return spec;
}

json synth_spec_to_json(const SynthSpec& spec) {
  return json{
      {"seed", spec.seed},
      {"n_sentences", spec.n_sentences},
      {"signs_per_sentence", {{"low", spec.signs_per_sentence.low}, {"high", spec.signs_per_sentence.high}}},
      {"sign_duration", {{"low", spec.sign_duration.low}, {"high", spec.sign_duration.high}}},
      {"intra_gap", {{"low", spec.intra_gap.low}, {"high", spec.intra_gap.high}}},
      {"inter_gap", {{"low", spec.inter_gap.low}, {"high", spec.inter_gap.high}}},
      {"prior_shift", spec.prior_shift},
      {"jitter", spec.jitter},
      {"embed_dim", spec.embed_dim},
      {"embed_noise", spec.embed_noise},
      {"fps", spec.fps},
      {"label_smoothing", spec.label_smoothing},
  };
}

ParamSpace param_space_from_json(const json& j) {
  const json* params = &j;
  if (j.is_object() && j.contains("params")) {
    params = &j.at("params");
  }
  if (!params->is_object()) {
    throw ParseError("search space document must be a JSON object of parameter specs");
  }
  ParamSpace space;
  for (const auto& [key, value] : params->items()) {
    ParamRange range;
    if (!value.is_object()) {
      throw ParseError("search space: parameter '" + key + "' must be an object");
    }
    std::string type = value.value("type", "real");
    if (type == "real") {
      range.kind = ParamKind::Real;
      range.low = get_num(value, "low", 0.0);
      range.high = get_num(value, "high", range.low);
    } else if (type == "int") {
      range.kind = ParamKind::Int;
      range.low = get_num(value, "low", 0.0);
      range.high = get_num(value, "high", range.low);
    } else if (type == "grid") {
      range.kind = ParamKind::Grid;
      if (!value.contains("values") || !value.at("values").is_array()) {
        throw ParseError("search space: grid parameter '" + key + "' needs a 'values' array");
      }
      for (const auto& v : value.at("values")) {
        if (!v.is_number()) {
          throw ParseError("search space: grid parameter '" + key + "' has a non-numeric value");
        }
        range.grid.push_back(v.get<double>());
      }
    } else {
      throw ParseError("search space: parameter '" + key + "' has unknown type '" + type + "'");
    }
    space.params[key] = std::move(range);
  }
  space.validate();
  return space;
}

json param_space_to_json(const ParamSpace& space) {
  json params = json::object();
  for (const auto& [key, range] : space.params) {
    json r;
    switch (range.kind) {
      case ParamKind::Real:
        r = {{"type", "real"}, {"low", range.low}, {"high", range.high}};
        break;
      case ParamKind::Int:
        r = {{"type", "int"}, {"low", range.low}, {"high", range.high}};
        break;
      case ParamKind::Grid:
        r = {{"type", "grid"}, {"values", range.grid}};
        break;
    }
    params[key] = std::move(r);
  }
  return json{{"params", params}};
}

RunManifest manifest_from_json(const json& j) {
  if (!j.is_object()) {
    throw ParseError("manifest must be a JSON object");
  }
  RunManifest m;
  m.episode_id = j.value("episode_id", "");
  m.subtitles = j.value("subtitles", "");
  m.gold = j.value("gold", "");
  m.probs = j.value("probs", "");
  m.segments = j.value("segments", "");
  m.text_embeddings = j.value("text_embeddings", "");
  m.sign_embeddings = j.value("sign_embeddings", "");
  m.format = j.value("format", "srt");
  return m;
}

json manifest_to_json(const RunManifest& m) {
  json j = json::object();
  j["episode_id"] = m.episode_id;
  j["format"] = m.format;
  auto put = [&](const char* key, const std::string& value) {
    if (!value.empty()) {
      j[key] = value;
    }
  };
  put("subtitles", m.subtitles);
  put("gold", m.gold);
  put("probs", m.probs);
  put("segments", m.segments);
  put("text_embeddings", m.text_embeddings);
  put("sign_embeddings", m.sign_embeddings);
  return j;
}

RunManifest load_manifest(const std::string& path) {
  RunManifest m = manifest_from_json(parse_json(read_text_file(path), path));
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative()) {
      p = (base / p).string();
    }
  };
  resolve(m.subtitles);
  resolve(m.gold);
  resolve(m.probs);
  resolve(m.segments);
  resolve(m.text_embeddings);
  resolve(m.sign_embeddings);
  return m;
}

SubtitleFormat parse_subtitle_format(const std::string& name) {
  if (name == "srt") {
    return SubtitleFormat::Srt;
  }
  if (name == "vtt" || name == "webvtt") {
    return SubtitleFormat::WebVtt;
  }
  throw ValidationError("unknown subtitle format '" + name + "' (expected srt or vtt)");
}

std::vector<SubtitleCue> load_subtitle_file(const std::string& path, const std::string& format) {
  std::string fmt = format;
  if (fmt == "auto" || fmt.empty()) {
    const std::string ext = std::filesystem::path(path).extension().string();
    fmt = (ext == ".vtt" || ext == ".webvtt") ? "vtt" : "srt";
  }
  return parse_subtitles(read_text_file(path), parse_subtitle_format(fmt));
}

EpisodeInputs load_episode_inputs(const RunManifest& m, bool with_embeddings) {
  if (m.subtitles.empty()) {
    throw ValidationError("manifest: missing 'subtitles' entry");
  }
  EpisodeInputs inputs;
  inputs.cues = load_subtitle_file(m.subtitles, m.format);
  if (!m.probs.empty()) {
    inputs.probs = load_frame_probs(read_text_file(m.probs));
  } else if (!m.segments.empty()) {
    inputs.segments = load_segments(read_text_file(m.segments));
  } else {
    throw ValidationError("episode inputs need a frame-probability or segment file");
  }
  if (with_embeddings) {
    if (m.text_embeddings.empty() || m.sign_embeddings.empty()) {
      throw ValidationError(
          "manifest: the sea variant needs 'text_embeddings' and 'sign_embeddings' entries");
    }
    inputs.text_embeddings = load_embeddings(read_text_file(m.text_embeddings));
    inputs.sign_embeddings = load_embeddings(read_text_file(m.sign_embeddings));
  }
  return inputs;
}

json eval_report_to_json(const EvalReport& report, bool include_per_cue) {
  json f1 = json::object();
  for (const auto& [threshold, score] : report.f1_at_thresholds) {
    f1[format_double(threshold)] = score;
  }
  json j{{"n_cues", report.n_evaluated}, {"f1", f1}};
  if (report.frame_acc.has_value()) {
    j["frame_accuracy"] = *report.frame_acc;
  }
  if (include_per_cue) {
    j["per_cue_iou"] = report.per_cue_iou;
  }
  return j;
}

std::string trial_log_line(const SearchTrial& trial) {
  json j{{"trial_id", trial.trial_id},
         {"score", trial.score},
         {"config", align_config_to_json(trial.config)}};
  return j.dump();
}

SearchTrial trial_from_log_line(const std::string& line) {
  json j = parse_json(line, "trial log line");
  SearchTrial t;
  if (!j.contains("trial_id") || !j.contains("score") || !j.contains("config")) {
    throw ParseError("trial log line missing trial_id/score/config");
  }
  t.trial_id = j.at("trial_id").get<std::uint64_t>();
  t.score = j.at("score").get<double>();
  t.config = align_config_from_json(j.at("config"));
  return t;
}

std::string diagnostics_line(const CueAlignment& s) {
  json j{{"cue", s.cue_index},
         {"span", {s.span_l, s.span_r}},
         {"refined", {s.refined_l, s.refined_r}},
         {"new_start", s.new_start},
         {"new_end", s.new_end},
         {"span_cost", s.span_cost},
         {"terms",
          {{"onset", s.refined_terms.onset},
           {"offset", s.refined_terms.offset},
           {"duration", s.refined_terms.duration},
           {"gap", s.refined_terms.gap},
           {"similarity", s.refined_terms.similarity},
           {"cost", s.refined_cost}}}};
  return j.dump();
}

}  // namespace subalign
