#pragma once

#include <cstdint>
#include <vector>

#include "subalign/segmentation.hpp"
#include "subalign/similarity.hpp"
#include "subalign/subtitle_io.hpp"

namespace subalign {

struct ValueRange {
  double low = 0.0;
  double high = 0.0;
};

struct CountRange {
  int low = 0;
  int high = 0;
};

/// Parameters of the synthetic-episode generator. Sentences are laid out left
/// to right on the frame grid; each sentence's gold cue spans exactly its
/// signs, and the prior cues lead the signing by prior_shift (plus bounded
/// per-cue jitter), emulating audio-timed subtitles.
struct SynthSpec {
  std::uint64_t seed = 0;
  int n_sentences = 30;
  CountRange signs_per_sentence{3, 7};
  ValueRange sign_duration{0.4, 0.8};   // seconds
  ValueRange intra_gap{0.05, 0.3};      // within a sentence
  ValueRange inter_gap{1.2, 2.0};       // prosodic pauses between sentences
  double prior_shift = 2.7;             // subtracted from gold timings
  double jitter = 0.3;                  // uniform per-cue noise bound
  int embed_dim = 32;
  double embed_noise = 0.0;             // perturbation scale on sign embeddings
  double fps = 25.0;
  double label_smoothing = 0.0;         // 0 = hard one-hot frame labels

  void validate() const;  // throws ValidationError
};

struct SynthEpisode {
  std::vector<SignSegment> segments;
  std::vector<SubtitleCue> gold_cues;
  std::vector<SubtitleCue> prior_cues;
  FrameProbs frame_probs;
  std::vector<EmbeddingVector> text_embeddings;
  std::vector<EmbeddingVector> sign_embeddings;
  std::vector<std::size_t> sentence_of_sign;
};

/// Deterministic in spec.seed; the hard-label frame probabilities decode back
/// to the generated segments exactly at thresholds (50, 50).
SynthEpisode generate_episode(const SynthSpec& spec);

}  // namespace subalign
