#include <doctest.h>

#include <json.hpp>

#include "subalign/error.hpp"
#include "subalign/json_io.hpp"
#include "subalign/util.hpp"

using namespace subalign;
using nlohmann::json;

#ifndef SUBALIGN_CONFIG_DIR
#define SUBALIGN_CONFIG_DIR "configs"
#endif

TEST_CASE("align config documents round trip") {
  AlignConfig cfg;
  cfg.w_dur = 0.5;
  cfg.w_sim = 3.0;
  cfg.window_size = 24;
  cfg.pre_offsets = {1.4, 1.6};
  cfg.post_offsets = {0.0, 1.0};
  AlignConfig back = align_config_from_json(align_config_to_json(cfg));
  CHECK(back == cfg);
}

TEST_CASE("partial config documents act as overrides") {
  AlignConfig base;
  AlignConfig cfg = align_config_from_json(json{{"w_sim", 2.5}}, base);
  CHECK(cfg.w_sim == 2.5);
  CHECK(cfg.w_gap == base.w_gap);
  CHECK_THROWS_AS(align_config_from_json(json{{"w_dur", -1.0}}), ValidationError);
  CHECK_THROWS_AS(align_config_from_json(json{{"w_dur", "five"}}), ParseError);
  CHECK_THROWS_AS(align_config_from_json(json::array()), ParseError);
}

TEST_CASE("the bundled presets parse and validate") {
  const std::string dir = SUBALIGN_CONFIG_DIR;
  AlignConfig bobsl = load_align_config(dir + "/bobsl.json");
  CHECK(bobsl.pre_offsets == OffsetPair{2.6, 2.1});
  CHECK(bobsl.post_offsets == OffsetPair{0.0, 1.0});
  CHECK(bobsl.b_threshold == 30.0);
  CHECK(bobsl.o_threshold == 50.0);
  CHECK(bobsl.window_size == 50);
  CHECK(bobsl.max_gap == 10.0);
  CHECK(bobsl.w_dur == 1.0);
  CHECK(bobsl.w_gap == 5.0);
  CHECK(bobsl.w_sim == 10.0);

  AlignConfig how2sign = load_align_config(dir + "/how2sign.json");
  CHECK(how2sign.w_dur == 5.0);
  CHECK(how2sign.w_gap == 0.8);
  CHECK(how2sign.max_gap == 8.0);

  AlignConfig wmt = load_align_config(dir + "/wmt-slt.json");
  CHECK(wmt.pre_offsets == OffsetPair{1.4, 1.6});
  CHECK(wmt.w_sim == 5.0);
  CHECK(wmt.o_threshold == 30.0);

  AlignConfig swiss = load_align_config(dir + "/swisssli.json");
  CHECK(swiss.pre_offsets == OffsetPair{0.49, 0.56});
  CHECK(swiss.w_sim == 1.0);
  CHECK(swiss.max_gap == 6.0);
}

TEST_CASE("the default search space parses and brackets the presets") {
  ParamSpace space = param_space_from_json(
      json::parse(read_text_file(std::string(SUBALIGN_CONFIG_DIR) + "/search_space.json")));
  space.validate();
  CHECK(space.params.count("w_sim") == 1);
  CHECK(space.params.at("w_sim").high >= 50.0);
  CHECK(space.params.at("b_threshold").kind == ParamKind::Grid);
  CHECK(space.params.at("window_size").kind == ParamKind::Int);
}

TEST_CASE("search space documents reject junk") {
  CHECK_THROWS_AS(param_space_from_json(json{{"params", {{"w_dur", {{"type", "banana"}}}}}}),
                  ParseError);
  CHECK_THROWS_AS(
      param_space_from_json(json{{"params", {{"mystery", {{"type", "real"}}}}}}),
      ValidationError);
  CHECK_THROWS_AS(param_space_from_json(json{
                      {"params", {{"max_gap", {{"type", "grid"}, {"values", json::array()}}}}}}),
                  ValidationError);
}

TEST_CASE("manifests round trip and omit empty entries") {
  RunManifest m;
  m.episode_id = "ep7";
  m.subtitles = "prior.srt";
  m.probs = "probs.txt";
  json j = manifest_to_json(m);
  CHECK(!j.contains("segments"));
  RunManifest back = manifest_from_json(j);
  CHECK(back.episode_id == "ep7");
  CHECK(back.subtitles == "prior.srt");
  CHECK(back.segments.empty());
}

TEST_CASE("diagnostics lines are valid json") {
  CueAlignment span;
  span.cue_index = 3;
  span.span_l = 5;
  span.span_r = 9;
  span.refined_l = 5;
  span.refined_r = 7;
  span.new_start = 12.5;
  span.new_end = 15.0;
  span.span_cost = 2.25;
  json j = json::parse(diagnostics_line(span));
  CHECK(j["cue"] == 3);
  CHECK(j["span"] == json::array({5, 9}));
  CHECK(j["refined"] == json::array({5, 7}));
  CHECK(j["terms"].contains("similarity"));
}
