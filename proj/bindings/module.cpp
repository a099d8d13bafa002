#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include "subalign/aligner.hpp"
#include "subalign/error.hpp"
#include "subalign/evaluation.hpp"
#include "subalign/json_io.hpp"
#include "subalign/search.hpp"
#include "subalign/segmentation.hpp"
#include "subalign/similarity.hpp"
#include "subalign/subtitle_io.hpp"
#include "subalign/synth.hpp"

namespace py = pybind11;
using namespace subalign;

namespace {

SubtitleFormat format_from_name(const std::string& name) { return parse_subtitle_format(name); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Subtitle-to-signing alignment toolkit";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<SubtitleCue>(m, "SubtitleCue")
      .def(py::init<>())
      .def(py::init([](std::size_t index, double start, double end, const std::string& text) {
             return SubtitleCue{index, start, end, text};
           }),
           py::arg("index"), py::arg("start"), py::arg("end"), py::arg("text") = "")
      .def_readwrite("index", &SubtitleCue::index)
      .def_readwrite("start", &SubtitleCue::start)
      .def_readwrite("end", &SubtitleCue::end)
      .def_readwrite("text", &SubtitleCue::text)
      .def("duration", &SubtitleCue::duration)
      .def(py::self == py::self)
      .def("__repr__", [](const SubtitleCue& c) {
        return "SubtitleCue(" + std::to_string(c.index) + ", " + std::to_string(c.start) + ", " +
               std::to_string(c.end) + ")";
      });

  py::class_<OffsetPair>(m, "OffsetPair")
      .def(py::init<>())
      .def(py::init([](double start, double end) { return OffsetPair{start, end}; }),
           py::arg("start"), py::arg("end"))
      .def_readwrite("start", &OffsetPair::start)
      .def_readwrite("end", &OffsetPair::end)
      .def(py::self == py::self);

  py::class_<SignSegment>(m, "SignSegment")
      .def(py::init<>())
      .def(py::init([](std::size_t index, double start, double end, const std::string& label) {
             return SignSegment{index, start, end, label};
           }),
           py::arg("index"), py::arg("start"), py::arg("end"), py::arg("label") = "")
      .def_readwrite("index", &SignSegment::index)
      .def_readwrite("start", &SignSegment::start)
      .def_readwrite("end", &SignSegment::end)
      .def_readwrite("label", &SignSegment::label)
      .def("duration", &SignSegment::duration)
      .def(py::self == py::self);

  py::class_<FrameProbs>(m, "FrameProbs")
      .def(py::init<>())
      .def_readwrite("fps", &FrameProbs::fps)
      .def_readwrite("rows", &FrameProbs::rows);

  py::class_<DenseMatrix>(m, "DenseMatrix")
      .def(py::init<>())
      .def_readonly("rows", &DenseMatrix::rows)
      .def_readonly("cols", &DenseMatrix::cols)
      .def("at", [](const DenseMatrix& mx, std::size_t i, std::size_t j) {
        if (i >= mx.rows || j >= mx.cols) {
          throw ValidationError("matrix index out of range");
        }
        return mx.at(i, j);
      });

  py::class_<SimilarityMatrix>(m, "SimilarityMatrix")
      .def_property_readonly("rows", &SimilarityMatrix::rows)
      .def_property_readonly("cols", &SimilarityMatrix::cols)
      .def_property_readonly("window_size", &SimilarityMatrix::window_size)
      .def("at", &SimilarityMatrix::at)
      .def("row", &SimilarityMatrix::row)
      .def("span_sum", [](const SimilarityMatrix& mx, std::size_t i, std::size_t l,
                          std::size_t r) { return span_similarity(mx, i, l, r); });

  py::class_<AlignConfig>(m, "AlignConfig")
      .def(py::init<>())
      .def_readwrite("w_dur", &AlignConfig::w_dur)
      .def_readwrite("w_gap", &AlignConfig::w_gap)
      .def_readwrite("w_sim", &AlignConfig::w_sim)
      .def_readwrite("window_size", &AlignConfig::window_size)
      .def_readwrite("max_gap", &AlignConfig::max_gap)
      .def_readwrite("pre_offsets", &AlignConfig::pre_offsets)
      .def_readwrite("post_offsets", &AlignConfig::post_offsets)
      .def_readwrite("b_threshold", &AlignConfig::b_threshold)
      .def_readwrite("o_threshold", &AlignConfig::o_threshold)
      .def_readwrite("max_shift", &AlignConfig::max_shift)
      .def("validate", &AlignConfig::validate)
      .def(py::self == py::self);

  py::class_<CostTerms>(m, "CostTerms")
      .def_readonly("onset", &CostTerms::onset)
      .def_readonly("offset", &CostTerms::offset)
      .def_readonly("duration", &CostTerms::duration)
      .def_readonly("gap", &CostTerms::gap)
      .def_readonly("similarity", &CostTerms::similarity)
      .def("total", &CostTerms::total);

  py::class_<CueAlignment>(m, "CueAlignment")
      .def_readonly("cue_index", &CueAlignment::cue_index)
      .def_readonly("span_l", &CueAlignment::span_l)
      .def_readonly("span_r", &CueAlignment::span_r)
      .def_readonly("refined_l", &CueAlignment::refined_l)
      .def_readonly("refined_r", &CueAlignment::refined_r)
      .def_readonly("new_start", &CueAlignment::new_start)
      .def_readonly("new_end", &CueAlignment::new_end)
      .def_readonly("span_cost", &CueAlignment::span_cost)
      .def_readonly("refined_cost", &CueAlignment::refined_cost)
      .def_readonly("refined_terms", &CueAlignment::refined_terms);

  py::class_<AlignmentResult>(m, "AlignmentResult")
      .def_readonly("spans", &AlignmentResult::spans)
      .def_readonly("total_cost", &AlignmentResult::total_cost)
      .def_readonly("best_ending", &AlignmentResult::best_ending)
      .def_readonly("aligned_cues", &AlignmentResult::aligned_cues);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("f1_at_thresholds", &EvalReport::f1_at_thresholds)
      .def_readonly("frame_acc", &EvalReport::frame_acc)
      .def_readonly("per_cue_iou", &EvalReport::per_cue_iou)
      .def_readonly("n_evaluated", &EvalReport::n_evaluated);

  py::enum_<OffsetStatistic>(m, "OffsetStatistic")
      .value("MEDIAN", OffsetStatistic::Median)
      .value("MEAN", OffsetStatistic::Mean);

  // subtitle_io
  m.def(
      "parse_subtitles",
      [](const std::string& raw, const std::string& format) {
        return parse_subtitles(raw, format_from_name(format));
      },
      py::arg("raw"), py::arg("format") = "srt");
  m.def(
      "write_subtitles",
      [](const std::vector<SubtitleCue>& cues, const std::string& format) {
        return write_subtitles(cues, format_from_name(format));
      },
      py::arg("cues"), py::arg("format") = "srt");
  m.def("apply_offsets", &apply_offsets, py::arg("cues"), py::arg("offsets"),
        py::arg("clamp_floor") = 0.0);

  // segmentation
  m.def("decode_bio", &decode_bio, py::arg("probs"), py::arg("b_threshold"),
        py::arg("o_threshold"));
  m.def("load_segments", [](const std::string& raw) { return load_segments(raw); },
        py::arg("raw"));
  m.def("write_segments", &write_segments, py::arg("segments"));
  m.def("load_frame_probs", [](const std::string& raw) { return load_frame_probs(raw); },
        py::arg("raw"));
  m.def("write_frame_probs", &write_frame_probs, py::arg("probs"));

  // similarity
  m.def("raw_similarities", &raw_similarities, py::arg("text_embeddings"),
        py::arg("sign_embeddings"));
  m.def("build_similarity", &build_similarity, py::arg("raw"), py::arg("cues"),
        py::arg("segments"), py::arg("window_size"));
  m.def("span_similarity", &span_similarity, py::arg("matrix"), py::arg("cue_index"),
        py::arg("l"), py::arg("r"));
  m.def("load_embeddings", [](const std::string& raw) { return load_embeddings(raw); },
        py::arg("raw"));
  m.def("write_embeddings", &write_embeddings, py::arg("embeddings"));

  // aligner
  m.def("span_cost", &span_cost, py::arg("cue"), py::arg("segments"), py::arg("l"), py::arg("r"),
        py::arg("config"), py::arg("matrix") = nullptr, py::arg("cue_index") = 0);
  m.def("refine_span", &refine_span, py::arg("group"), py::arg("cue"), py::arg("segments"),
        py::arg("config"), py::arg("matrix") = nullptr, py::arg("cue_index") = 0);
  m.def("align", &align, py::arg("cues"), py::arg("segments"), py::arg("config"),
        py::arg("matrix") = nullptr);
  m.def(
      "align_episode",
      [](const std::vector<SubtitleCue>& cues, const std::optional<FrameProbs>& probs,
         const std::optional<std::vector<SignSegment>>& segments,
         const std::optional<std::vector<EmbeddingVector>>& text_embeddings,
         const std::optional<std::vector<EmbeddingVector>>& sign_embeddings,
         const AlignConfig& config) {
        EpisodeInputs inputs;
        inputs.cues = cues;
        inputs.probs = probs;
        inputs.segments = segments;
        inputs.text_embeddings = text_embeddings;
        inputs.sign_embeddings = sign_embeddings;
        return align_episode(inputs, config);
      },
      py::arg("cues"), py::arg("probs") = std::nullopt, py::arg("segments") = std::nullopt,
      py::arg("text_embeddings") = std::nullopt, py::arg("sign_embeddings") = std::nullopt,
      py::arg("config") = AlignConfig{});

  // evaluation
  m.def("interval_iou", &interval_iou, py::arg("a_start"), py::arg("a_end"), py::arg("b_start"),
        py::arg("b_end"));
  m.def("f1_at", &f1_at, py::arg("pred"), py::arg("gold"), py::arg("threshold") = 0.5);
  m.def("frame_accuracy", &frame_accuracy, py::arg("pred"), py::arg("gold"), py::arg("fps"));
  m.def("estimate_offsets", &estimate_offsets, py::arg("orig"), py::arg("gold"),
        py::arg("statistic"));
  m.def("evaluate", &evaluate, py::arg("pred"), py::arg("gold"), py::arg("thresholds"),
        py::arg("fps") = std::nullopt);

  // synth
  py::class_<ValueRange>(m, "ValueRange")
      .def(py::init([](double low, double high) { return ValueRange{low, high}; }),
           py::arg("low"), py::arg("high"))
      .def_readwrite("low", &ValueRange::low)
      .def_readwrite("high", &ValueRange::high);
  py::class_<CountRange>(m, "CountRange")
      .def(py::init([](int low, int high) { return CountRange{low, high}; }), py::arg("low"),
           py::arg("high"))
      .def_readwrite("low", &CountRange::low)
      .def_readwrite("high", &CountRange::high);

  py::class_<SynthSpec>(m, "SynthSpec")
      .def(py::init<>())
      .def_readwrite("seed", &SynthSpec::seed)
      .def_readwrite("n_sentences", &SynthSpec::n_sentences)
      .def_readwrite("signs_per_sentence", &SynthSpec::signs_per_sentence)
      .def_readwrite("sign_duration", &SynthSpec::sign_duration)
      .def_readwrite("intra_gap", &SynthSpec::intra_gap)
      .def_readwrite("inter_gap", &SynthSpec::inter_gap)
      .def_readwrite("prior_shift", &SynthSpec::prior_shift)
      .def_readwrite("jitter", &SynthSpec::jitter)
      .def_readwrite("embed_dim", &SynthSpec::embed_dim)
      .def_readwrite("embed_noise", &SynthSpec::embed_noise)
      .def_readwrite("fps", &SynthSpec::fps)
      .def_readwrite("label_smoothing", &SynthSpec::label_smoothing);

  py::class_<SynthEpisode>(m, "SynthEpisode")
      .def_readonly("segments", &SynthEpisode::segments)
      .def_readonly("gold_cues", &SynthEpisode::gold_cues)
      .def_readonly("prior_cues", &SynthEpisode::prior_cues)
      .def_readonly("frame_probs", &SynthEpisode::frame_probs)
      .def_readonly("text_embeddings", &SynthEpisode::text_embeddings)
      .def_readonly("sign_embeddings", &SynthEpisode::sign_embeddings)
      .def_readonly("sentence_of_sign", &SynthEpisode::sentence_of_sign);

  m.def("generate_episode", &generate_episode, py::arg("spec"));

  // search
  py::enum_<ParamKind>(m, "ParamKind")
      .value("REAL", ParamKind::Real)
      .value("INT", ParamKind::Int)
      .value("GRID", ParamKind::Grid);

  py::class_<ParamRange>(m, "ParamRange")
      .def(py::init([](ParamKind kind, double low, double high, std::vector<double> grid) {
             return ParamRange{kind, low, high, std::move(grid)};
           }),
           py::arg("kind"), py::arg("low") = 0.0, py::arg("high") = 0.0,
           py::arg("grid") = std::vector<double>{})
      .def_readwrite("kind", &ParamRange::kind)
      .def_readwrite("low", &ParamRange::low)
      .def_readwrite("high", &ParamRange::high)
      .def_readwrite("grid", &ParamRange::grid);

  py::class_<ParamSpace>(m, "ParamSpace")
      .def(py::init<>())
      .def_readwrite("params", &ParamSpace::params)
      .def("validate", &ParamSpace::validate);

  py::class_<SearchEpisode>(m, "SearchEpisode")
      .def(py::init([](const std::string& id, const std::vector<SubtitleCue>& cues,
                       const std::optional<FrameProbs>& probs,
                       const std::optional<std::vector<SignSegment>>& segments,
                       const std::optional<std::vector<EmbeddingVector>>& text_embeddings,
                       const std::optional<std::vector<EmbeddingVector>>& sign_embeddings,
                       const std::vector<SubtitleCue>& gold) {
             SearchEpisode ep;
             ep.id = id;
             ep.inputs.cues = cues;
             ep.inputs.probs = probs;
             ep.inputs.segments = segments;
             ep.inputs.text_embeddings = text_embeddings;
             ep.inputs.sign_embeddings = sign_embeddings;
             ep.gold = gold;
             return ep;
           }),
           py::arg("id"), py::arg("cues"), py::arg("probs") = std::nullopt,
           py::arg("segments") = std::nullopt, py::arg("text_embeddings") = std::nullopt,
           py::arg("sign_embeddings") = std::nullopt,
           py::arg("gold") = std::vector<SubtitleCue>{});

  py::class_<SearchTrial>(m, "SearchTrial")
      .def_readonly("trial_id", &SearchTrial::trial_id)
      .def_readonly("config", &SearchTrial::config)
      .def_readonly("score", &SearchTrial::score)
      .def_readonly("wall_time_s", &SearchTrial::wall_time_s);

  py::class_<SearchResult>(m, "SearchResult")
      .def_readonly("best_config", &SearchResult::best_config)
      .def_readonly("best_trial", &SearchResult::best_trial)
      .def_readonly("best_score", &SearchResult::best_score)
      .def_readonly("trials", &SearchResult::trials);

  m.def("sample_config", &sample_config, py::arg("space"), py::arg("base"), py::arg("seed"),
        py::arg("trial_id"));

  // config documents
  m.def(
      "config_from_json",
      [](const std::string& text, const AlignConfig& base) {
        nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
        if (j.is_discarded()) {
          throw ParseError("invalid JSON config document");
        }
        return align_config_from_json(j, base);
      },
      py::arg("text"), py::arg("base") = AlignConfig{});
  m.def("config_to_json",
        [](const AlignConfig& cfg) { return align_config_to_json(cfg).dump(2); });
  m.def("load_align_config", &load_align_config, py::arg("path"),
        py::arg("base") = AlignConfig{});
  m.def(
      "param_space_from_json",
      [](const std::string& text) {
        nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
        if (j.is_discarded()) {
          throw ParseError("invalid JSON search space document");
        }
        return param_space_from_json(j);
      },
      py::arg("text"));
  m.def(
      "random_search",
      [](const std::vector<SearchEpisode>& episodes, const ParamSpace& space,
         const AlignConfig& base, std::uint64_t iterations, std::uint64_t seed, int workers) {
        return random_search(episodes, space, base, SearchOptions{iterations, seed, workers});
      },
      py::arg("episodes"), py::arg("space"), py::arg("base") = AlignConfig{},
      py::arg("iterations") = 1, py::arg("seed") = 0, py::arg("workers") = 1,
      py::call_guard<py::gil_scoped_release>());
}
