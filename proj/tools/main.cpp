#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "subalign/aligner.hpp"
#include "subalign/error.hpp"
#include "subalign/evaluation.hpp"
#include "subalign/json_io.hpp"
#include "subalign/search.hpp"
#include "subalign/segmentation.hpp"
#include "subalign/synth.hpp"
#include "subalign/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace subalign;

namespace {

json parse_json_file(const std::string& path) {
  json j = json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded()) {
    throw ParseError("invalid JSON in " + path);
  }
  return j;
}

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation:
      return "validation";
    case ErrorKind::Infeasible:
      return "infeasible";
    case ErrorKind::Io:
      return "io";
  }
  return "error";
}

struct ConfigFlags {
  std::string config_path;
  std::optional<double> w_dur, w_gap, w_sim, max_gap, b_threshold, o_threshold, max_shift;
  std::optional<int> window_size;
  std::string pre_offsets, post_offsets;  // "start,end"
};

OffsetPair parse_offset_flag(const std::string& text, const char* flag) {
  const std::size_t comma = text.find(',');
  if (comma == std::string::npos) {
    throw ValidationError(std::string(flag) + " expects 'start,end'");
  }
  auto s = try_parse_double(trim(std::string_view(text).substr(0, comma)));
  auto e = try_parse_double(trim(std::string_view(text).substr(comma + 1)));
  if (!s || !e) {
    throw ValidationError(std::string(flag) + " expects 'start,end' as numbers");
  }
  return {*s, *e};
}

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Alignment config document (JSON)");
  cmd->add_option("--w-dur", flags.w_dur, "Duration-difference weight");
  cmd->add_option("--w-gap", flags.w_gap, "Inter-sign gap weight");
  cmd->add_option("--w-sim", flags.w_sim, "Span similarity weight");
  cmd->add_option("--window-size", flags.window_size, "Signs kept per cue row");
  cmd->add_option("--max-gap", flags.max_gap, "Gap split threshold, seconds");
  cmd->add_option("--b-threshold", flags.b_threshold, "Segment open threshold, 0-100");
  cmd->add_option("--o-threshold", flags.o_threshold, "Segment close threshold, 0-100");
  cmd->add_option("--max-shift", flags.max_shift, "Span candidate pruning radius, seconds");
  cmd->add_option("--pre-offsets", flags.pre_offsets, "Offsets before alignment: 'start,end'");
  cmd->add_option("--post-offsets", flags.post_offsets, "Offsets after alignment: 'start,end'");
}

AlignConfig resolve_config(const ConfigFlags& flags) {
  AlignConfig cfg;
  if (!flags.config_path.empty()) {
    cfg = load_align_config(flags.config_path, cfg);
  }
  if (flags.w_dur) cfg.w_dur = *flags.w_dur;
  if (flags.w_gap) cfg.w_gap = *flags.w_gap;
  if (flags.w_sim) cfg.w_sim = *flags.w_sim;
  if (flags.window_size) cfg.window_size = *flags.window_size;
  if (flags.max_gap) cfg.max_gap = *flags.max_gap;
  if (flags.b_threshold) cfg.b_threshold = *flags.b_threshold;
  if (flags.o_threshold) cfg.o_threshold = *flags.o_threshold;
  if (flags.max_shift) cfg.max_shift = *flags.max_shift;
  if (!flags.pre_offsets.empty()) {
    cfg.pre_offsets = parse_offset_flag(flags.pre_offsets, "--pre-offsets");
  }
  if (!flags.post_offsets.empty()) {
    cfg.post_offsets = parse_offset_flag(flags.post_offsets, "--post-offsets");
  }
  cfg.validate();
  return cfg;
}

std::string resolve_format(const std::string& flag, const std::string& out_path) {
  if (flag != "auto") {
    return flag;
  }
  const std::string ext = fs::path(out_path).extension().string();
  return (ext == ".vtt" || ext == ".webvtt") ? "vtt" : "srt";
}

std::vector<double> parse_thresholds(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    std::string_view tok = trim(std::string_view(text).substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (!tok.empty()) {
      auto v = try_parse_double(tok);
      if (!v) {
        throw ValidationError("--thresholds expects comma-separated numbers");
      }
      out.push_back(*v);
    }
    if (comma == std::string::npos) {
      break;
    }
    pos = comma + 1;
  }
  if (out.empty()) {
    throw ValidationError("--thresholds expects at least one value");
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int cmd_decode(const std::string& probs_path, const std::string& out_path,
               const ConfigFlags& flags) {
  AlignConfig cfg = resolve_config(flags);
  FrameProbs probs = load_frame_probs(read_text_file(probs_path));
  std::vector<SignSegment> segments = decode_bio(probs, cfg.b_threshold, cfg.o_threshold);
  write_text_file(out_path, write_segments(segments));
  std::cout << "decoded " << segments.size() << " segments from " << probs.rows.size()
            << " frames\n";
  return 0;
}

int cmd_align(const std::string& manifest_path, const std::string& subs_path,
              const std::string& probs_path, const std::string& segments_path,
              const std::string& text_emb_path, const std::string& sign_emb_path,
              const std::string& variant, const std::string& out_path,
              const std::string& diagnostics_path, const std::string& format_flag,
              const ConfigFlags& flags) {
  AlignConfig cfg = resolve_config(flags);
  if (variant != "sea" && variant != "segment-align") {
    throw ValidationError("--variant must be 'sea' or 'segment-align'");
  }
  const bool with_embeddings = (variant == "sea");

  RunManifest manifest;
  if (!manifest_path.empty()) {
    manifest = load_manifest(manifest_path);
  } else {
    if (subs_path.empty()) {
      throw ValidationError("align needs --manifest or --subs");
    }
    manifest.subtitles = subs_path;
    manifest.probs = probs_path;
    manifest.segments = segments_path;
    manifest.text_embeddings = text_emb_path;
    manifest.sign_embeddings = sign_emb_path;
    manifest.format = "auto";
  }

  EpisodeInputs inputs = load_episode_inputs(manifest, with_embeddings);
  AlignmentResult result = align_episode(inputs, cfg);

  const std::string fmt = resolve_format(format_flag, out_path);
  const std::string out = write_subtitles(result.aligned_cues, parse_subtitle_format(fmt));
  std::string diag;
  if (!diagnostics_path.empty()) {
    json summary{{"type", "summary"},
                 {"n_cues", result.aligned_cues.size()},
                 {"best_ending", result.best_ending},
                 {"total_cost", result.total_cost},
                 {"variant", variant}};
    diag = summary.dump();
    diag += '\n';
    for (const CueAlignment& span : result.spans) {
      diag += diagnostics_line(span);
      diag += '\n';
    }
  }

  write_text_file(out_path, out);
  if (!diagnostics_path.empty()) {
    write_text_file(diagnostics_path, diag);
  }
  std::cout << "aligned " << result.aligned_cues.size() << " cues, consumed "
            << result.best_ending << " signs, total cost " << format_double(result.total_cost)
            << "\n";
  return 0;
}

int cmd_eval(const std::string& pred_path, const std::string& gold_path,
             const std::string& thresholds_text, std::optional<double> fps,
             const std::string& estimate_flag, const std::string& apply_flag,
             const std::string& format_flag, const std::string& out_path) {
  std::vector<SubtitleCue> pred = load_subtitle_file(pred_path, format_flag);
  std::vector<SubtitleCue> gold = load_subtitle_file(gold_path, format_flag);
  if (!apply_flag.empty()) {
    pred = apply_offsets(std::move(pred), parse_offset_flag(apply_flag, "--apply-offsets"));
  }
  const std::vector<double> thresholds = parse_thresholds(thresholds_text);
  EvalReport report = evaluate(pred, gold, thresholds, fps);

  json episode = eval_report_to_json(report);
  episode["id"] = fs::path(pred_path).stem().string();
  if (!estimate_flag.empty()) {
    OffsetStatistic stat;
    if (estimate_flag == "median") {
      stat = OffsetStatistic::Median;
    } else if (estimate_flag == "mean") {
      stat = OffsetStatistic::Mean;
    } else {
      throw ValidationError("--estimate-offsets must be 'median' or 'mean'");
    }
    OffsetPair off = estimate_offsets(pred, gold, stat);
    episode["estimated_offsets"] = {{"start", off.start}, {"end", off.end}};
  }
  json aggregate = eval_report_to_json(report, /*include_per_cue=*/false);
  json doc{{"episodes", json::array({episode})}, {"aggregate", aggregate}};

  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
    std::cout << "wrote report to " << out_path << "\n";
  }
  return 0;
}

int cmd_search(const std::string& dataset_dir, const std::string& space_path,
               std::uint64_t iterations, std::uint64_t seed, int workers,
               const std::string& out_path, const std::string& log_path,
               const ConfigFlags& flags) {
  AlignConfig base = resolve_config(flags);
  ParamSpace space = param_space_from_json(parse_json_file(space_path));

  std::vector<std::string> manifest_paths;
  for (const auto& entry : fs::directory_iterator(dataset_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      manifest_paths.push_back(entry.path().string());
    }
  }
  std::sort(manifest_paths.begin(), manifest_paths.end());
  if (manifest_paths.empty()) {
    throw ValidationError("search: no episode manifests (*.json) in " + dataset_dir);
  }

  std::vector<SearchEpisode> episodes;
  for (const std::string& path : manifest_paths) {
    RunManifest manifest = load_manifest(path);
    if (manifest.gold.empty()) {
      throw ValidationError("search: manifest " + path + " has no 'gold' entry");
    }
    SearchEpisode ep;
    ep.id = manifest.episode_id.empty() ? fs::path(path).stem().string() : manifest.episode_id;
    if (manifest.text_embeddings.empty() != manifest.sign_embeddings.empty()) {
      throw ValidationError("search: manifest " + path +
                            " lists only one of text/sign embeddings");
    }
    const bool with_embeddings = !manifest.text_embeddings.empty();
    ep.inputs = load_episode_inputs(manifest, with_embeddings);
    ep.gold = load_subtitle_file(manifest.gold, manifest.format);
    episodes.push_back(std::move(ep));
  }

  std::vector<SearchTrial> resume;
  if (!log_path.empty() && fs::exists(log_path)) {
    for (std::string_view line : split_lines(read_text_file(log_path))) {
      if (!trim(line).empty()) {
        resume.push_back(trial_from_log_line(std::string(line)));
      }
    }
  }

  std::ofstream log_stream;
  TrialCallback on_trial;
  if (!log_path.empty()) {
    log_stream.open(log_path, std::ios::app);
    if (!log_stream) {
      throw IoError("cannot open trial log for appending: " + log_path);
    }
    on_trial = [&log_stream](const SearchTrial& trial) {
      log_stream << trial_log_line(trial) << '\n';
      log_stream.flush();
    };
  }

  SearchOptions options{iterations, seed, workers};
  SearchResult result = random_search(episodes, space, base, options, on_trial, std::move(resume));

  json best{{"best_trial", result.best_trial},
            {"best_score", result.best_score},
            {"config", align_config_to_json(result.best_config)}};
  if (!out_path.empty()) {
    write_text_file(out_path, best.dump(2) + "\n");
  }
  std::cout << "best trial " << result.best_trial << " scored "
            << format_double(result.best_score) << " over " << iterations << " trials\n";
  return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed, const std::string& episode_id) {
  SynthSpec spec;
  if (!spec_path.empty()) {
    spec = synth_spec_from_json(parse_json_file(spec_path), spec);
  }
  if (seed) {
    spec.seed = *seed;
  }
  spec.validate();
  SynthEpisode ep = generate_episode(spec);

  RunManifest manifest;
  manifest.episode_id = episode_id.empty() ? ("synth-" + std::to_string(spec.seed)) : episode_id;
  manifest.format = "srt";
  manifest.subtitles = "prior.srt";
  manifest.gold = "gold.srt";
  manifest.probs = "probs.txt";
  manifest.segments = "segments.txt";
  manifest.text_embeddings = "text.emb";
  manifest.sign_embeddings = "sign.emb";

  // Everything renders before anything is written.
  const std::string gold = write_subtitles(ep.gold_cues, SubtitleFormat::Srt);
  const std::string prior = write_subtitles(ep.prior_cues, SubtitleFormat::Srt);
  const std::string segments = write_segments(ep.segments);
  const std::string probs = write_frame_probs(ep.frame_probs);
  const std::string text_emb = write_embeddings(ep.text_embeddings);
  const std::string sign_emb = write_embeddings(ep.sign_embeddings);
  json manifest_json = manifest_to_json(manifest);
  manifest_json["spec"] = synth_spec_to_json(spec);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_text_file((dir / "gold.srt").string(), gold);
  write_text_file((dir / "prior.srt").string(), prior);
  write_text_file((dir / "segments.txt").string(), segments);
  write_text_file((dir / "probs.txt").string(), probs);
  write_text_file((dir / "text.emb").string(), text_emb);
  write_text_file((dir / "sign.emb").string(), sign_emb);
  write_text_file((dir / "manifest.json").string(), manifest_json.dump(2) + "\n");

  std::cout << "wrote episode " << manifest.episode_id << " (" << ep.gold_cues.size()
            << " cues, " << ep.segments.size() << " signs) to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"subalign: align subtitle cues to continuous signing"};
  app.require_subcommand(1);

  auto* decode = app.add_subcommand("decode", "Decode frame probabilities into sign segments");
  std::string decode_probs, decode_out;
  ConfigFlags decode_flags;
  decode->add_option("--probs", decode_probs, "Frame probability file")->required();
  decode->add_option("-o,--output", decode_out, "Segment file to write")->required();
  add_config_flags(decode, decode_flags);

  auto* align_cmd = app.add_subcommand("align", "Align subtitles to signing");
  std::string align_manifest, align_subs, align_probs, align_segments, align_text_emb,
      align_sign_emb, align_out, align_diag;
  std::string align_variant = "segment-align";
  std::string align_format = "auto";
  ConfigFlags align_flags;
  align_cmd->add_option("--manifest", align_manifest, "Episode manifest (JSON)");
  align_cmd->add_option("--subs", align_subs, "Subtitle file (SRT/WebVTT)");
  align_cmd->add_option("--probs", align_probs, "Frame probability file");
  align_cmd->add_option("--segments", align_segments, "Pre-decoded segment file");
  align_cmd->add_option("--text-emb", align_text_emb, "Text embedding file");
  align_cmd->add_option("--sign-emb", align_sign_emb, "Sign embedding file");
  align_cmd->add_option("--variant", align_variant,
                        "'segment-align' (timing only) or 'sea' (with similarity)");
  align_cmd->add_option("-o,--output", align_out, "Aligned subtitle file to write")->required();
  align_cmd->add_option("--diagnostics", align_diag, "Per-cue diagnostics file (JSONL)");
  align_cmd->add_option("--format", align_format, "Output format: srt, vtt, or auto");
  add_config_flags(align_cmd, align_flags);

  auto* eval_cmd = app.add_subcommand("eval", "Score aligned subtitles against gold timings");
  std::string eval_pred, eval_gold, eval_estimate, eval_apply, eval_out;
  std::string eval_thresholds = "0.5";
  std::string eval_format = "auto";
  std::optional<double> eval_fps;
  eval_cmd->add_option("--pred", eval_pred, "Predicted subtitle file")->required();
  eval_cmd->add_option("--gold", eval_gold, "Gold subtitle file")->required();
  eval_cmd->add_option("--thresholds", eval_thresholds, "Comma-separated IoU thresholds");
  eval_cmd->add_option("--fps", eval_fps, "Frame rate; enables frame accuracy");
  eval_cmd->add_option("--estimate-offsets", eval_estimate,
                       "Report median/mean start/end deltas to gold");
  eval_cmd->add_option("--apply-offsets", eval_apply,
                       "Shift predictions by 'start,end' before scoring");
  eval_cmd->add_option("--format", eval_format, "Subtitle format: srt, vtt, or auto");
  eval_cmd->add_option("-o,--output", eval_out, "Report file (default: stdout)");

  auto* search_cmd = app.add_subcommand("search", "Random search over alignment parameters");
  std::string search_dataset, search_space, search_out, search_log;
  std::uint64_t search_iterations = 100;
  std::uint64_t search_seed = 0;
  int search_workers = 1;
  ConfigFlags search_flags;
  search_cmd->add_option("--dataset", search_dataset, "Directory of episode manifests")
      ->required();
  search_cmd->add_option("--space", search_space, "Search space document (JSON)")->required();
  search_cmd->add_option("--iterations", search_iterations, "Number of trials");
  search_cmd->add_option("--seed", search_seed, "Search seed");
  search_cmd->add_option("--workers", search_workers, "Parallel trial workers");
  search_cmd->add_option("-o,--output", search_out, "Best-config document to write");
  search_cmd->add_option("--log", search_log, "Trial log (JSONL); appended to on resume");
  add_config_flags(search_cmd, search_flags);

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic episode");
  std::string synth_spec, synth_out, synth_id;
  std::optional<std::uint64_t> synth_seed;
  synth_cmd->add_option("--spec", synth_spec, "Generator spec document (JSON)");
  synth_cmd->add_option("-o,--output", synth_out, "Output directory")->required();
  synth_cmd->add_option("--seed", synth_seed, "Override the spec seed");
  synth_cmd->add_option("--episode-id", synth_id, "Manifest episode id");

  CLI11_PARSE(app, argc, argv);

  try {
    if (decode->parsed()) {
      return cmd_decode(decode_probs, decode_out, decode_flags);
    }
    if (align_cmd->parsed()) {
      return cmd_align(align_manifest, align_subs, align_probs, align_segments, align_text_emb,
                       align_sign_emb, align_variant, align_out, align_diag, align_format,
                       align_flags);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(eval_pred, eval_gold, eval_thresholds, eval_fps, eval_estimate, eval_apply,
                      eval_format, eval_out);
    }
    if (search_cmd->parsed()) {
      return cmd_search(search_dataset, search_space, search_iterations, search_seed,
                        search_workers, search_out, search_log, search_flags);
    }
    if (synth_cmd->parsed()) {
      return cmd_synth(synth_spec, synth_out, synth_seed, synth_id);
    }
  } catch (const Error& e) {
    json err{{"error", {{"kind", error_kind_name(e.kind())}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    json err{{"error", {{"kind", "error"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
