#include <string>

#include "doctest.h"
#include "mmest/scenario_io.hpp"

using namespace mmest;

TEST_CASE("paper default scenario pins the reconstruction") {
  const LoadedScenario loaded = paper_default_scenario();
  const Scenario& sc = loaded.scenario;
  CHECK(sc.set.size() == 2);
  CHECK(sc.set.models[0].name == "CV");
  CHECK(sc.set.models[1].name == "CA");
  CHECK(sc.set.transition(0, 0) == 0.75);
  CHECK(sc.set.transition(0, 1) == 0.25);
  CHECK(sc.set.fused_dim == 3);
  CHECK(sc.n_steps == 200);
  CHECK(sc.mu0(0) == 0.5);
  CHECK(sc.mu0(1) == 0.5);
  CHECK_FALSE(sc.schedule.markov);
  CHECK(sc.schedule.fixed[0] == 0);
  CHECK(sc.schedule.fixed[49] == 0);
  CHECK(sc.schedule.fixed[50] == 1);
  CHECK(sc.schedule.fixed[99] == 1);
  CHECK(sc.schedule.fixed[100] == 0);
  CHECK(sc.schedule.fixed[150] == 1);
  CHECK(sc.schedule.fixed[199] == 1);
  CHECK(sc.set.models[0].R(0, 0) == 1.0);
  CHECK(sc.initial_truth == Vector::Zero(3));
  CHECK(loaded.runs == 1000);
  CHECK(loaded.seed == 1);
  REQUIRE(loaded.estimators.size() == 4);
  CHECK(to_string(loaded.estimators[0]) == "imm");
  CHECK(to_string(loaded.estimators[1]) == "amm");
  CHECK(to_string(loaded.estimators[2]) == "kf:0");
  CHECK(to_string(loaded.estimators[3]) == "kf:1");
}

TEST_CASE("an empty document selects the builtin scenario") {
  const LoadedScenario loaded = parse_scenario("{}");
  CHECK(loaded.scenario.n_steps == 200);
  CHECK(loaded.scenario.set.size() == 2);
  CHECK(loaded.runs == 1000);
}

TEST_CASE("a bad transition row is a field-addressed validation error") {
  const std::string doc = R"({
    "transition": [[0.75, 0.30], [0.25, 0.75]]
  })";
  try {
    parse_scenario(doc);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("transition") != std::string::npos);
    CHECK(msg.find("row 0") != std::string::npos);
    CHECK(msg.find("1.05") != std::string::npos);
  }
}

TEST_CASE("single-model custom file gets identity transition and one kf") {
  const LoadedScenario loaded =
      parse_scenario(R"({"models": [{"kind": "ca"}], "runs": 5})");
  CHECK(loaded.scenario.set.size() == 1);
  CHECK(loaded.scenario.set.transition(0, 0) == 1.0);
  CHECK(loaded.scenario.mu0(0) == 1.0);
  CHECK(loaded.scenario.schedule.markov);
  CHECK(loaded.runs == 5);
  REQUIRE(loaded.estimators.size() == 3);  // imm, amm, kf:0
}

TEST_CASE("two custom models require a transition matrix") {
  const std::string doc =
      R"({"models": [{"kind": "cv"}, {"kind": "ca"}]})";
  CHECK_THROWS_AS(parse_scenario(doc), ValidationError);
}

TEST_CASE("fully custom model matrices are parsed and validated") {
  const std::string doc = R"({
    "models": [{
      "kind": "custom", "name": "ou",
      "A": [[0.9]], "B": [[1.0]], "H": [[1.0]],
      "Q": [[0.5]], "R": [[0.3]],
      "process_noise_variance": 0.5
    }],
    "n_steps": 10
  })";
  const LoadedScenario loaded = parse_scenario(doc);
  CHECK(loaded.scenario.set.models[0].name == "ou");
  CHECK(loaded.scenario.set.models[0].A(0, 0) == 0.9);
  CHECK(loaded.scenario.set.models[0].process_noise_variance == 0.5);
  CHECK(loaded.scenario.set.fused_dim == 1);
}

TEST_CASE("custom model with a missing matrix names the field") {
  const std::string doc = R"({
    "models": [{"kind": "custom", "B": [[1.0]], "H": [[1.0]],
                "Q": [[0.5]], "R": [[0.3]]}]
  })";
  try {
    parse_scenario(doc);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("models[0].A") != std::string::npos);
  }
}

TEST_CASE("malformed JSON is a parse error") {
  CHECK_THROWS_AS(parse_scenario("{ not json"), ParseError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/path.json"), ParseError);
}

TEST_CASE("unknown fields are rejected") {
  CHECK_THROWS_AS(parse_scenario(R"({"nsteps": 100})"), ValidationError);
  CHECK_THROWS_AS(parse_scenario(R"({"models": [{"kind": "cv", "t": 2}]})"),
                  ValidationError);
}

TEST_CASE("explicit markov schedule") {
  const LoadedScenario loaded =
      parse_scenario(R"({"mode_schedule": "markov"})");
  CHECK(loaded.scenario.schedule.markov);
}

TEST_CASE("builtin schedule truncates when n_steps shrinks") {
  const LoadedScenario loaded = parse_scenario(R"({"n_steps": 100})");
  CHECK(loaded.scenario.schedule.fixed.size() == 100);
  CHECK(loaded.scenario.schedule.fixed[49] == 0);
  CHECK(loaded.scenario.schedule.fixed[99] == 1);
}

TEST_CASE("user-specified schedules are validated strictly") {
  CHECK_THROWS_AS(
      parse_scenario(R"({"mode_schedule": [[5, 0]], "n_steps": 10})"),
      ValidationError);
  CHECK_THROWS_AS(
      parse_scenario(
          R"({"mode_schedule": [[0, 0], [300, 1]], "n_steps": 200})"),
      ValidationError);
  CHECK_THROWS_AS(
      parse_scenario(R"({"mode_schedule": [[0, 5]], "n_steps": 10})"),
      ValidationError);
}

TEST_CASE("estimator list and ranges are validated") {
  const LoadedScenario loaded =
      parse_scenario(R"({"estimators": ["imm", "kf:1"]})");
  REQUIRE(loaded.estimators.size() == 2);
  CHECK(loaded.estimators[1].model_index == 1);
  CHECK_THROWS_AS(parse_scenario(R"({"estimators": ["kf:7"]})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_scenario(R"({"estimators": []})"), ValidationError);
}

TEST_CASE("initial estimate parsing") {
  const std::string doc = R"({
    "initial_truth": [1.0, 0.5, 0.0],
    "initial_estimate": {"mean": [1.0, 0.5, 0.0],
                         "cov": [[2,0,0],[0,2,0],[0,0,2]]}
  })";
  const LoadedScenario loaded = parse_scenario(doc);
  CHECK(loaded.scenario.initial_truth(0) == 1.0);
  CHECK(loaded.scenario.initial_estimate.cov(1, 1) == 2.0);

  CHECK_THROWS_AS(
      parse_scenario(
          R"({"initial_estimate": {"cov": [[1, 0.5, 0],[0, 1, 0],[0, 0, 1]]}})"),
      ValidationError);  // not symmetric
}

TEST_CASE("mu0 must be a probability vector of the right size") {
  CHECK_THROWS_AS(parse_scenario(R"({"mu0": [0.6, 0.6]})"), ValidationError);
  CHECK_THROWS_AS(parse_scenario(R"({"mu0": [1.0]})"), ValidationError);
}

TEST_CASE("describe_scenario echoes the resolved configuration") {
  const std::string text = describe_scenario(paper_default_scenario());
  CHECK(text.find("\"runs\": 1000") != std::string::npos);
  CHECK(text.find("\"n_steps\": 200") != std::string::npos);
  CHECK(text.find("CV") != std::string::npos);
}
