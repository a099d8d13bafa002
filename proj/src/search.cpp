#include "subalign/search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "subalign/error.hpp"
#include "subalign/evaluation.hpp"
#include "subalign/random.hpp"

namespace subalign {

const std::vector<std::string>& search_parameter_names() {
  static const std::vector<std::string> names = {
      "pre_start_offset", "pre_end_offset", "post_start_offset", "post_end_offset",
      "b_threshold",      "o_threshold",    "window_size",       "max_gap",
      "w_dur",            "w_gap",          "w_sim",             "max_shift",
  };
  return names;
}

void ParamSpace::validate() const {
  const auto& names = search_parameter_names();
  for (const auto& [key, range] : params) {
    if (std::find(names.begin(), names.end(), key) == names.end()) {
      throw ValidationError("search space: unknown parameter '" + key + "'");
    }
    switch (range.kind) {
      case ParamKind::Real:
      case ParamKind::Int:
        if (!(range.low <= range.high)) {
          throw ValidationError("search space: parameter '" + key + "' has low > high");
        }
        break;
      case ParamKind::Grid:
        if (range.grid.empty()) {
          throw ValidationError("search space: parameter '" + key + "' has an empty grid");
        }
        break;
    }
  }
}

namespace {

double draw(RandomSource& rng, const ParamRange& range) {
  switch (range.kind) {
    case ParamKind::Real:
      return rng.uniform(range.low, range.high);
    case ParamKind::Int:
      return static_cast<double>(rng.uniform_int(static_cast<std::int64_t>(range.low),
                                                 static_cast<std::int64_t>(range.high)));
    case ParamKind::Grid:
      return range.grid[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(range.grid.size()) - 1))];
  }
  return 0.0;
}

void assign(AlignConfig& cfg, const std::string& name, double value) {
  if (name == "pre_start_offset") {
    cfg.pre_offsets.start = value;
  } else if (name == "pre_end_offset") {
    cfg.pre_offsets.end = value;
  } else if (name == "post_start_offset") {
    cfg.post_offsets.start = value;
  } else if (name == "post_end_offset") {
    cfg.post_offsets.end = value;
  } else if (name == "b_threshold") {
    cfg.b_threshold = value;
  } else if (name == "o_threshold") {
    cfg.o_threshold = value;
  } else if (name == "window_size") {
    cfg.window_size = static_cast<int>(value);
  } else if (name == "max_gap") {
    cfg.max_gap = value;
  } else if (name == "w_dur") {
    cfg.w_dur = value;
  } else if (name == "w_gap") {
    cfg.w_gap = value;
  } else if (name == "w_sim") {
    cfg.w_sim = value;
  } else if (name == "max_shift") {
    cfg.max_shift = value;
  }
}

}  // namespace

AlignConfig sample_config(const ParamSpace& space, const AlignConfig& base, std::uint64_t seed,
                          std::uint64_t trial_id) {
  RandomSource rng(seed, trial_id);
  AlignConfig cfg = base;
  for (const std::string& name : search_parameter_names()) {
    auto it = space.params.find(name);
    if (it == space.params.end()) {
      continue;
    }
    assign(cfg, name, draw(rng, it->second));
  }
  return cfg;
}

double evaluate_config(const std::vector<SearchEpisode>& episodes, const AlignConfig& config) {
  std::size_t hits = 0;
  std::size_t total = 0;
  try {
    for (const SearchEpisode& ep : episodes) {
      AlignmentResult res = align_episode(ep.inputs, config);
      if (res.aligned_cues.size() != ep.gold.size()) {
        throw ValidationError("search: episode '" + ep.id + "' has " +
                              std::to_string(ep.gold.size()) + " gold cues but " +
                              std::to_string(res.aligned_cues.size()) + " were aligned");
      }
      for (std::size_t i = 0; i < ep.gold.size(); ++i) {
        const auto& p = res.aligned_cues[i];
        const auto& g = ep.gold[i];
        if (interval_iou(p.start, p.end, g.start, g.end) >= 0.5) {
          ++hits;
        }
      }
      total += ep.gold.size();
    }
  } catch (const InfeasibleError&) {
    return 0.0;
  }
  if (total == 0) {
    return 0.0;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

SearchResult random_search(const std::vector<SearchEpisode>& episodes, const ParamSpace& space,
                           const AlignConfig& base, const SearchOptions& options,
                           const TrialCallback& on_trial, std::vector<SearchTrial> resume) {
  space.validate();
  if (episodes.empty()) {
    throw ValidationError("random_search: empty dataset");
  }
  if (options.iterations < 1) {
    throw ValidationError("random_search: iterations must be >= 1");
  }
  const std::uint64_t iterations = options.iterations;

  std::vector<SearchTrial> trials(iterations);
  std::vector<char> done(iterations, 0);
  std::vector<char> reused(iterations, 0);
  for (SearchTrial& t : resume) {
    if (t.trial_id < iterations && !done[t.trial_id]) {
      trials[t.trial_id] = std::move(t);
      done[t.trial_id] = 1;
      reused[t.trial_id] = 1;
    }
  }

  std::vector<std::uint64_t> todo;
  for (std::uint64_t id = 0; id < iterations; ++id) {
    if (!done[id]) {
      todo.push_back(id);
    }
  }

  std::mutex flush_mutex;
  std::uint64_t flushed = 0;
  auto flush_prefix = [&]() {
    // Emit completed trials in id order so logs are identical regardless of
    // completion order.
    while (flushed < iterations && done[flushed]) {
      if (on_trial && !reused[flushed]) {
        on_trial(trials[flushed]);
      }
      ++flushed;
    }
  };
  {
    std::lock_guard<std::mutex> lock(flush_mutex);
    flush_prefix();
  }

  auto run_trial = [&](std::uint64_t id) {
    const auto t0 = std::chrono::steady_clock::now();
    SearchTrial trial;
    trial.trial_id = id;
    trial.config = sample_config(space, base, options.seed, id);
    trial.score = evaluate_config(episodes, trial.config);
    trial.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::lock_guard<std::mutex> lock(flush_mutex);
    trials[id] = std::move(trial);
    done[id] = 1;
    flush_prefix();
  };

  const int workers = std::max(1, options.workers);
  if (workers == 1 || todo.size() <= 1) {
    for (std::uint64_t id : todo) {
      run_trial(id);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int width = std::min<int>(workers, static_cast<int>(todo.size()));
    pool.reserve(static_cast<std::size_t>(width));
    for (int w = 0; w < width; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          const std::size_t idx = next.fetch_add(1);
          if (idx >= todo.size()) {
            return;
          }
          run_trial(todo[idx]);
        }
      });
    }
    for (std::thread& t : pool) {
      t.join();
    }
  }

  SearchResult result;
  result.trials = std::move(trials);
  result.best_score = -1.0;
  for (const SearchTrial& t : result.trials) {
    if (t.score > result.best_score) {
      result.best_score = t.score;
      result.best_trial = t.trial_id;
      result.best_config = t.config;
    }
  }
  return result;
}

}  // namespace subalign
