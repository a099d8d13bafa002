#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "subalign/aligner.hpp"
#include "subalign/evaluation.hpp"
#include "subalign/search.hpp"
#include "subalign/synth.hpp"

namespace subalign {

// Missing keys keep their default (or base) values, so partial config
// documents act as overrides.
AlignConfig align_config_from_json(const nlohmann::json& j, const AlignConfig& base = {});
nlohmann::json align_config_to_json(const AlignConfig& config);
AlignConfig load_align_config(const std::string& path, const AlignConfig& base = {});

SynthSpec synth_spec_from_json(const nlohmann::json& j, const SynthSpec& base = {});
nlohmann::json synth_spec_to_json(const SynthSpec& spec);

ParamSpace param_space_from_json(const nlohmann::json& j);
nlohmann::json param_space_to_json(const ParamSpace& space);

/// Paths of one episode's files; relative paths resolve against the manifest
/// file's directory. Empty strings mean "not provided".
struct RunManifest {
  std::string episode_id;
  std::string subtitles;
  std::string gold;
  std::string probs;
  std::string segments;
  std::string text_embeddings;
  std::string sign_embeddings;
  std::string format = "srt";  // subtitle format of the referenced files
};

RunManifest manifest_from_json(const nlohmann::json& j);
nlohmann::json manifest_to_json(const RunManifest& manifest);
RunManifest load_manifest(const std::string& path);  // resolves relative paths

/// Reads and validates every input the manifest references.
EpisodeInputs load_episode_inputs(const RunManifest& manifest, bool with_embeddings);
std::vector<SubtitleCue> load_subtitle_file(const std::string& path, const std::string& format);

nlohmann::json eval_report_to_json(const EvalReport& report, bool include_per_cue = true);

/// One log line per trial; deterministic for a given (seed, space, dataset),
/// so logs from different runs and worker counts are byte-identical.
/// Wall-clock time is deliberately not serialized.
std::string trial_log_line(const SearchTrial& trial);
SearchTrial trial_from_log_line(const std::string& line);

std::string diagnostics_line(const CueAlignment& span);

SubtitleFormat parse_subtitle_format(const std::string& name);

}  // namespace subalign
