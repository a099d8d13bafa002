#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "subalign/aligner.hpp"

namespace subalign {

enum class ParamKind { Real, Int, Grid };

struct ParamRange {
  ParamKind kind = ParamKind::Real;
  double low = 0.0;
  double high = 0.0;
  std::vector<double> grid;
};

/// Per-parameter sampling ranges; parameters absent from the space keep their
/// base-config value. Keys must come from the canonical parameter list.
struct ParamSpace {
  std::map<std::string, ParamRange> params;

  void validate() const;  // throws ValidationError
};

/// Canonical sampling order; also the set of legal space keys.
const std::vector<std::string>& search_parameter_names();

struct SearchEpisode {
  std::string id;
  EpisodeInputs inputs;
  std::vector<SubtitleCue> gold;
};

struct SearchTrial {
  std::uint64_t trial_id = 0;
  AlignConfig config;
  double score = 0.0;       // pooled F1@0.50 over the dataset
  double wall_time_s = 0.0; // not part of the persisted log record
};

struct SearchResult {
  AlignConfig best_config;
  std::uint64_t best_trial = 0;
  double best_score = 0.0;
  std::vector<SearchTrial> trials;
};

struct SearchOptions {
  std::uint64_t iterations = 1;
  std::uint64_t seed = 0;
  int workers = 1;
};

/// The config drawn for one trial; deterministic in (seed, trial_id).
AlignConfig sample_config(const ParamSpace& space, const AlignConfig& base, std::uint64_t seed,
                          std::uint64_t trial_id);

/// Pooled F1@0.50 of the aligned cues against gold over all episodes.
/// Infeasible configs score 0 instead of raising.
double evaluate_config(const std::vector<SearchEpisode>& episodes, const AlignConfig& config);

using TrialCallback = std::function<void(const SearchTrial&)>;

/// Uniform random search. Trials are drawn independently per trial_id, so any
/// worker count yields the same log; the callback fires in trial order as the
/// completed prefix grows. Trials in `resume` (matched by trial_id) are reused
/// without recomputation and without re-firing the callback.
SearchResult random_search(const std::vector<SearchEpisode>& episodes, const ParamSpace& space,
                           const AlignConfig& base, const SearchOptions& options,
                           const TrialCallback& on_trial = {},
                           std::vector<SearchTrial> resume = {});

}  // namespace subalign
