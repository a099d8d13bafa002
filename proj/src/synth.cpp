#include "subalign/synth.hpp"

#include <algorithm>
#include <cmath>

#include "subalign/error.hpp"
#include "subalign/random.hpp"

namespace subalign {

void SynthSpec::validate() const {
  if (n_sentences < 1) {
    throw ValidationError("synth spec: n_sentences must be >= 1");
  }
  if (signs_per_sentence.low < 1 || signs_per_sentence.high < signs_per_sentence.low) {
    throw ValidationError("synth spec: signs_per_sentence range is invalid");
  }
  auto bad_range = [](const ValueRange& r) { return r.low < 0.0 || r.high < r.low; };
  if (bad_range(sign_duration)) {
    throw ValidationError("synth spec: sign_duration must be a nonnegative range");
  }
  if (bad_range(intra_gap)) {
    throw ValidationError("synth spec: intra_gap must be a nonnegative range");
  }
  if (bad_range(inter_gap)) {
    throw ValidationError("synth spec: inter_gap must be a nonnegative range");
  }
  if (!(inter_gap.low > intra_gap.high)) {
    throw ValidationError("synth spec: inter_gap.low must exceed intra_gap.high");
  }
  if (jitter < 0.0) {
    throw ValidationError("synth spec: jitter must be nonnegative");
  }
  if (embed_dim < 1) {
    throw ValidationError("synth spec: embed_dim must be >= 1");
  }
  if (embed_noise < 0.0) {
    throw ValidationError("synth spec: embed_noise must be nonnegative");
  }
  if (!(fps > 0.0)) {
    throw ValidationError("synth spec: fps must be positive");
  }
  if (label_smoothing < 0.0 || label_smoothing >= 1.0) {
    throw ValidationError("synth spec: label_smoothing must lie in [0, 1)");
  }
}

SynthEpisode generate_episode(const SynthSpec& spec) {
  spec.validate();
  RandomSource rng(spec.seed);
  SynthEpisode ep;

  auto to_frames = [&](double seconds) {
    return static_cast<long long>(std::llround(seconds * spec.fps));
  };

  // Lead-in pad so the shifted prior cues never clamp at zero.
  long long cursor = std::max<long long>(0, to_frames(spec.prior_shift + spec.jitter));

  for (int s = 0; s < spec.n_sentences; ++s) {
    if (s > 0) {
      cursor += std::max<long long>(1, to_frames(rng.uniform(spec.inter_gap.low,
                                                             spec.inter_gap.high)));
    }
    const int k = static_cast<int>(rng.uniform_int(spec.signs_per_sentence.low,
                                                   spec.signs_per_sentence.high));
    const std::size_t first_sign = ep.segments.size();
    for (int t = 0; t < k; ++t) {
      if (t > 0) {
        cursor += std::max<long long>(1, to_frames(rng.uniform(spec.intra_gap.low,
                                                               spec.intra_gap.high)));
      }
      const long long len = std::max<long long>(1, to_frames(rng.uniform(spec.sign_duration.low,
                                                                         spec.sign_duration.high)));
      SignSegment seg;
      seg.index = ep.segments.size();
      seg.start = static_cast<double>(cursor) / spec.fps;
      seg.end = static_cast<double>(cursor + len) / spec.fps;
      seg.label = "g" + std::to_string(s) + "_" + std::to_string(t);
      ep.segments.push_back(std::move(seg));
      ep.sentence_of_sign.push_back(static_cast<std::size_t>(s));
      cursor += len;
    }
    SubtitleCue cue;
    cue.index = static_cast<std::size_t>(s);
    cue.start = ep.segments[first_sign].start;
    cue.end = ep.segments.back().end;
    cue.text = "sentence " + std::to_string(s);
    ep.gold_cues.push_back(std::move(cue));
  }

  // Prior cues: rigid lead of prior_shift plus per-cue jitter, clamped to
  // keep times nonnegative and cue order intact.
  for (std::size_t i = 0; i < ep.gold_cues.size(); ++i) {
    const double shift = -spec.prior_shift + rng.uniform(-spec.jitter, spec.jitter);
    SubtitleCue cue = ep.gold_cues[i];
    cue.start = std::max(cue.start + shift, 0.0);
    if (i > 0) {
      cue.start = std::max(cue.start, ep.prior_cues.back().start);
    }
    cue.end = std::max(cue.end + shift, cue.start);
    ep.prior_cues.push_back(std::move(cue));
  }

  // Frame probabilities: B on each segment's first frame, I inside, O outside.
  const double ls = spec.label_smoothing;
  const std::array<double, 3> b_row{1.0 - ls, ls / 2.0, ls / 2.0};
  const std::array<double, 3> i_row{ls / 2.0, 1.0 - ls, ls / 2.0};
  const std::array<double, 3> o_row{ls / 2.0, ls / 2.0, 1.0 - ls};
  const long long n_frames = cursor + std::max<long long>(1, to_frames(1.0));
  ep.frame_probs.fps = spec.fps;
  ep.frame_probs.rows.assign(static_cast<std::size_t>(n_frames), o_row);
  for (const SignSegment& seg : ep.segments) {
    const long long fb = to_frames(seg.start);
    const long long fe = to_frames(seg.end);
    ep.frame_probs.rows[static_cast<std::size_t>(fb)] = b_row;
    for (long long f = fb + 1; f < fe; ++f) {
      ep.frame_probs.rows[static_cast<std::size_t>(f)] = i_row;
    }
  }

  // One unit direction per sentence; text embeddings are the directions and
  // sign embeddings add a scaled perturbation. The perturbation is drawn even
  // at noise 0 so episodes with different noise share the same layout and
  // noise realization.
  const std::size_t dim = static_cast<std::size_t>(spec.embed_dim);
  std::vector<EmbeddingVector> directions;
  directions.reserve(ep.gold_cues.size());
  for (std::size_t s = 0; s < ep.gold_cues.size(); ++s) {
    EmbeddingVector dir(dim);
    double norm2 = 0.0;
    for (double& v : dir) {
      v = rng.normal();
      norm2 += v * v;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : dir) {
      v *= inv;
    }
    directions.push_back(std::move(dir));
  }
  ep.text_embeddings = directions;

  const double noise_scale = spec.embed_noise / std::sqrt(static_cast<double>(dim));
  ep.sign_embeddings.reserve(ep.segments.size());
  for (std::size_t j = 0; j < ep.segments.size(); ++j) {
    const EmbeddingVector& dir = directions[ep.sentence_of_sign[j]];
    EmbeddingVector v(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      v[k] = dir[k] + noise_scale * rng.normal();
    }
    ep.sign_embeddings.push_back(std::move(v));
  }

  return ep;
}

}  // namespace subalign
