#include "mmest/scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace mmest {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ValidationError(field + ": " + what);
}

double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  return j.get<int>();
}

Vector as_vector(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Index>(i)) =
        as_number(j[i], field + "[" + std::to_string(i) + "]");
  }
  return v;
}

Matrix as_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(field, "expected an array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) fail(field, "expected non-empty rows");
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string row_field = field + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols) {
      fail(row_field, "rows must all have " + std::to_string(cols) +
                          " entries");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) =
          as_number(j[r][c], row_field + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& item : j.items()) {
    if (known.find(item.key()) == known.end()) {
      fail(where.empty() ? item.key() : where + "." + item.key(),
           "unknown field");
    }
  }
}

StateSpaceModel parse_model(const json& j, std::size_t index) {
  const std::string field = "models[" + std::to_string(index) + "]";
  if (!j.is_object()) fail(field, "expected an object");
  const std::string kind = j.value("kind", std::string());
  if (kind == "cv" || kind == "ca") {
    reject_unknown_keys(j, {"kind", "T", "sigma_w2", "sigma_e2"}, field);
    const double T = j.contains("T") ? as_number(j["T"], field + ".T") : 1.0;
    const double sw2 = j.contains("sigma_w2")
                           ? as_number(j["sigma_w2"], field + ".sigma_w2")
                           : 1.0;
    const double se2 = j.contains("sigma_e2")
                           ? as_number(j["sigma_e2"], field + ".sigma_e2")
                           : 1.0;
    try {
      return kind == "cv" ? cv_model(T, sw2, se2) : ca_model(T, sw2, se2);
    } catch (const Error& e) {
      fail(field, e.what());
    }
  }
  if (kind == "custom") {
    reject_unknown_keys(
        j, {"kind", "name", "A", "B", "H", "Q", "R", "process_noise_variance"},
        field);
    for (const char* key : {"A", "B", "H", "Q", "R"}) {
      if (!j.contains(key)) fail(field + "." + key, "required for custom models");
    }
    try {
      return make_model(as_matrix(j["A"], field + ".A"),
                        as_matrix(j["B"], field + ".B"),
                        as_matrix(j["H"], field + ".H"),
                        as_matrix(j["Q"], field + ".Q"),
                        as_matrix(j["R"], field + ".R"),
                        j.value("name", "custom" + std::to_string(index)),
                        j.contains("process_noise_variance")
                            ? as_number(j["process_noise_variance"],
                                        field + ".process_noise_variance")
                            : 1.0);
    } catch (const ValidationError&) {
      throw;
    } catch (const Error& e) {
      fail(field, e.what());
    }
  }
  fail(field + ".kind", "expected cv, ca or custom");
}

std::vector<int> expand_schedule(const json& j, int n_steps, std::size_t r,
                                 bool drop_out_of_range) {
  if (!j.is_array() || j.empty()) {
    fail("mode_schedule", "expected \"markov\" or a list of [start, model]");
  }
  std::vector<std::pair<int, int>> segments;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string field = "mode_schedule[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2) {
      fail(field, "expected a [start_step, model_index] pair");
    }
    segments.emplace_back(as_int(j[i][0], field + "[0]"),
                          as_int(j[i][1], field + "[1]"));
  }
  if (segments.front().first != 0) {
    fail("mode_schedule", "first segment must start at step 0");
  }
  std::vector<int> expanded(static_cast<std::size_t>(n_steps));
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto [start, model] = segments[i];
    if (model < 0 || model >= static_cast<int>(r)) {
      fail("mode_schedule[" + std::to_string(i) + "]",
           "model index out of range");
    }
    if (start < 0 || start >= n_steps) {
      if (drop_out_of_range && start >= n_steps) continue;
      fail("mode_schedule[" + std::to_string(i) + "]",
           "start step outside [0, n_steps)");
    }
    if (i > 0 && start <= segments[i - 1].first) {
      fail("mode_schedule", "segment starts must be strictly increasing");
    }
    const int end = i + 1 < segments.size() ? segments[i + 1].first : n_steps;
    for (int k = start; k < end && k < n_steps; ++k) {
      expanded[static_cast<std::size_t>(k)] = model;
    }
  }
  return expanded;
}

json paper_default_json() {
  return json{
      {"models",
       {{{"kind", "cv"}, {"T", 1.0}, {"sigma_w2", 1.0}, {"sigma_e2", 1.0}},
        {{"kind", "ca"}, {"T", 1.0}, {"sigma_w2", 1.0}, {"sigma_e2", 1.0}}}},
      {"transition", {{0.75, 0.25}, {0.25, 0.75}}},
      {"mode_schedule", {{0, 0}, {50, 1}, {100, 0}, {150, 1}}},
      {"n_steps", 200},
  };
}

LoadedScenario from_json(const json& doc) {
  if (!doc.is_object()) {
    throw ValidationError("scenario: expected a JSON object");
  }
  reject_unknown_keys(
      doc,
      {"models", "transition", "mu0", "n_steps", "mode_schedule",
       "initial_truth", "initial_estimate", "augmentation_variance", "runs",
       "seed", "estimators"},
      "");

  const bool builtin_models = !doc.contains("models");
  const json defaults = paper_default_json();
  const json& models_json =
      builtin_models ? defaults.at("models") : doc.at("models");
  if (!models_json.is_array() || models_json.empty()) {
    fail("models", "expected a non-empty array");
  }
  std::vector<StateSpaceModel> models;
  for (std::size_t i = 0; i < models_json.size(); ++i) {
    models.push_back(parse_model(models_json[i], i));
  }
  const std::size_t r = models.size();

  Matrix transition;
  if (doc.contains("transition")) {
    transition = as_matrix(doc["transition"], "transition");
  } else if (builtin_models) {
    transition = as_matrix(defaults.at("transition"), "transition");
  } else if (r == 1) {
    transition = Matrix::Ones(1, 1);
  } else {
    fail("transition", "required when models are specified");
  }
  if (transition.rows() != static_cast<Index>(r) ||
      transition.cols() != static_cast<Index>(r)) {
    fail("transition", "must be r x r for r = " + std::to_string(r));
  }
  for (Index row = 0; row < transition.rows(); ++row) {
    const double sum = transition.row(row).sum();
    if (std::abs(sum - 1.0) > tol::probability_sum) {
      std::ostringstream msg;
      msg << "row " << row << " sums to " << sum;
      fail("transition", msg.str());
    }
  }

  const double augmentation =
      doc.contains("augmentation_variance")
          ? as_number(doc["augmentation_variance"], "augmentation_variance")
          : 0.0;
  if (augmentation < 0.0) fail("augmentation_variance", "must be >= 0");
  ModelSet set;
  try {
    set = make_model_set(std::move(models), std::move(transition),
                         augmentation);
  } catch (const Error& e) {
    throw ValidationError(std::string("models: ") + e.what());
  }

  const int n_steps = doc.contains("n_steps")
                          ? as_int(doc["n_steps"], "n_steps")
                          : defaults.at("n_steps").get<int>();
  if (n_steps < 1) fail("n_steps", "must be >= 1");

  Vector mu0;
  if (doc.contains("mu0")) {
    mu0 = as_vector(doc["mu0"], "mu0");
  } else {
    mu0 = Vector::Constant(static_cast<Index>(r),
                           1.0 / static_cast<double>(r));
  }
  try {
    check_probability_vector(mu0, "mu0");
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }
  if (mu0.size() != static_cast<Index>(r)) {
    fail("mu0", "size does not match model count");
  }

  ModeSchedule schedule;
  const json* schedule_json = nullptr;
  bool builtin_schedule = false;
  if (doc.contains("mode_schedule")) {
    schedule_json = &doc["mode_schedule"];
  } else if (builtin_models) {
    schedule_json = &defaults.at("mode_schedule");
    builtin_schedule = true;
  }
  if (schedule_json == nullptr ||
      (schedule_json->is_string() &&
       schedule_json->get<std::string>() == "markov")) {
    schedule.markov = true;
  } else {
    schedule.markov = false;
    schedule.fixed = expand_schedule(*schedule_json, n_steps, r,
                                     builtin_schedule);
  }

  Vector initial_truth =
      doc.contains("initial_truth")
          ? as_vector(doc["initial_truth"], "initial_truth")
          : Vector(Vector::Zero(set.fused_dim));
  if (initial_truth.size() != set.fused_dim) {
    fail("initial_truth", "dim does not match fused space");
  }

  Vector init_mean = Vector::Zero(set.fused_dim);
  Matrix init_cov = Matrix::Identity(set.fused_dim, set.fused_dim);
  if (doc.contains("initial_estimate")) {
    const json& ie = doc["initial_estimate"];
    if (!ie.is_object()) fail("initial_estimate", "expected an object");
    reject_unknown_keys(ie, {"mean", "cov"}, "initial_estimate");
    if (ie.contains("mean")) {
      init_mean = as_vector(ie["mean"], "initial_estimate.mean");
    }
    if (ie.contains("cov")) {
      init_cov = as_matrix(ie["cov"], "initial_estimate.cov");
    }
  }

  LoadedScenario loaded{
      Scenario{std::move(set), n_steps, std::move(mu0),
               std::move(initial_truth),
               [&]() -> GaussianState {
                 try {
                   return GaussianState(init_mean, init_cov, 0,
                                        StateTag::filtered);
                 } catch (const Error& e) {
                   throw ValidationError(std::string("initial_estimate: ") +
                                         e.what());
                 }
               }(),
               std::move(schedule)},
      doc.contains("runs") ? as_int(doc["runs"], "runs") : 1000,
      0,
      {}};
  if (loaded.runs < 1) fail("runs", "must be >= 1");

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer() && !doc["seed"].is_number_unsigned()) {
      fail("seed", "expected an integer");
    }
    loaded.seed = doc["seed"].get<std::uint64_t>();
  } else {
    loaded.seed = 1;
  }

  if (doc.contains("estimators")) {
    if (!doc["estimators"].is_array() || doc["estimators"].empty()) {
      fail("estimators", "expected a non-empty array of names");
    }
    for (const auto& item : doc["estimators"]) {
      if (!item.is_string()) fail("estimators", "entries must be strings");
      loaded.estimators.push_back(parse_estimator(item.get<std::string>()));
    }
  } else {
    loaded.estimators.push_back(EstimatorSpec{EstimatorSpec::Kind::imm, 0});
    loaded.estimators.push_back(EstimatorSpec{EstimatorSpec::Kind::amm, 0});
    for (std::size_t i = 0; i < r; ++i) {
      loaded.estimators.push_back(EstimatorSpec{EstimatorSpec::Kind::kf, i});
    }
  }
  check_estimator_list(loaded.estimators, r);

  try {
    validate_scenario(loaded.scenario);
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }
  return loaded;
}

}  // namespace

LoadedScenario paper_default_scenario() {
  return from_json(json::object());
}

LoadedScenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  return from_json(doc);
}

LoadedScenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open scenario file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string describe_scenario(const LoadedScenario& loaded) {
  const auto& sc = loaded.scenario;
  json doc;
  json models = json::array();
  for (const auto& m : sc.set.models) {
    models.push_back({{"name", m.name},
                      {"state_dim", m.state_dim()},
                      {"measurement_dim", m.measurement_dim()},
                      {"process_noise_variance", m.process_noise_variance}});
  }
  doc["models"] = std::move(models);
  json transition = json::array();
  for (Index j = 0; j < sc.set.transition.rows(); ++j) {
    json row = json::array();
    for (Index i = 0; i < sc.set.transition.cols(); ++i) {
      row.push_back(sc.set.transition(j, i));
    }
    transition.push_back(std::move(row));
  }
  doc["transition"] = std::move(transition);
  doc["mu0"] = std::vector<double>(sc.mu0.data(), sc.mu0.data() + sc.mu0.size());
  doc["n_steps"] = sc.n_steps;
  doc["fused_dim"] = sc.set.fused_dim;
  doc["augmentation_variance"] = sc.set.augmentation_variance;
  if (sc.schedule.markov) {
    doc["mode_schedule"] = "markov";
  } else {
    json segments = json::array();
    for (std::size_t k = 0; k < sc.schedule.fixed.size(); ++k) {
      if (k == 0 || sc.schedule.fixed[k] != sc.schedule.fixed[k - 1]) {
        segments.push_back({k, sc.schedule.fixed[k]});
      }
    }
    doc["mode_schedule"] = std::move(segments);
  }
  doc["runs"] = loaded.runs;
  doc["seed"] = loaded.seed;
  std::vector<std::string> estimators;
  estimators.reserve(loaded.estimators.size());
  for (const auto& spec : loaded.estimators) {
    estimators.push_back(to_string(spec));
  }
  doc["estimators"] = std::move(estimators);
  return doc.dump(2);
}

}  // namespace mmest
