#include "dqr/model.hpp"

#include <fstream>

#include <json.hpp>

#include "dqr/train.hpp"

namespace dqr {

using nlohmann::json;

namespace {

json phi_to_json(const std::optional<PhiIndex>& phi) {
  if (!phi) return nullptr;
  return json{{"b", phi->b}, {"c", phi->c}};
}

PhiIndex phi_from_json(const json& j) {
  return PhiIndex{j.at("b").get<double>(), j.at("c").get<double>()};
}

json spec_to_json(const ScoreSpec& spec) {
  return json{{"form", score_form_name(spec.form())},
              {"tau", spec.tau()},
              {"g_scale", spec.g_scale()},
              {"phi", phi_to_json(spec.phi())},
              {"phi_minus", phi_to_json(spec.phi_minus())},
              {"phi_plus", phi_to_json(spec.phi_plus())}};
}

ScoreSpec spec_from_json(const json& j) {
  const std::string form = j.at("form").get<std::string>();
  const double tau = j.at("tau").get<double>();
  const double g_scale = j.at("g_scale").get<double>();
  if (form == "additive") {
    return ScoreSpec::additive(phi_from_json(j.at("phi_minus")),
                               phi_from_json(j.at("phi_plus")), g_scale, tau);
  }
  if (form == "revelation_plus") {
    return ScoreSpec::revelation_plus(phi_from_json(j.at("phi")),
                                      phi_from_json(j.at("phi_plus")), g_scale, tau);
  }
  if (form == "revelation_minus") {
    return ScoreSpec::revelation_minus(phi_from_json(j.at("phi")),
                                       phi_from_json(j.at("phi_minus")), g_scale, tau);
  }
  throw std::runtime_error("unknown score form '" + form + "'");
}

std::string column_kind_name(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Constant: return "constant";
    case ColumnKind::Continuous: return "continuous";
    case ColumnKind::Binary: return "binary";
    case ColumnKind::OneHot: return "onehot";
  }
  return "?";
}

ColumnKind column_kind_from_name(const std::string& name) {
  if (name == "constant") return ColumnKind::Constant;
  if (name == "continuous") return ColumnKind::Continuous;
  if (name == "binary") return ColumnKind::Binary;
  if (name == "onehot") return ColumnKind::OneHot;
  throw std::runtime_error("unknown column kind '" + name + "'");
}

}  // namespace

std::string head_kind_name(HeadKind head) {
  switch (head) {
    case HeadKind::MultiQuantileAdditive: return "multi_quantile_additive";
    case HeadKind::MultiQuantileMultiplicative: return "multi_quantile_multiplicative";
    case HeadKind::CompositeAdditive: return "composite_additive";
  }
  return "?";
}

HeadKind head_kind_from_name(const std::string& name) {
  if (name == "multi_quantile_additive") return HeadKind::MultiQuantileAdditive;
  if (name == "multi_quantile_multiplicative")
    return HeadKind::MultiQuantileMultiplicative;
  if (name == "composite_additive") return HeadKind::CompositeAdditive;
  throw std::runtime_error("unknown head kind '" + name + "'");
}

std::string score_form_name(ScoreForm form) {
  switch (form) {
    case ScoreForm::Additive: return "additive";
    case ScoreForm::RevelationPlus: return "revelation_plus";
    case ScoreForm::RevelationMinus: return "revelation_minus";
  }
  return "?";
}

Eigen::MatrixXd FittedModel::predict_on(const Dataset& aligned) const {
  return average_predictions(starts, aligned.features, config);
}

void FittedModel::save(const std::string& path) const {
  json j;
  j["format"] = "dqr-model";
  j["version"] = 1;
  j["network"] = {{"input_dim", config.input_dim},
                  {"hidden_dims", config.hidden_dims},
                  {"activation", "tanh"},
                  {"head", head_kind_name(config.head)},
                  {"levels", config.levels},
                  {"link", "log"},
                  {"seed", config.seed}};
  switch (objective.kind) {
    case Objective::Kind::MultiQuantile:
      j["objective"] = {{"kind", "multi_quantile"},
                        {"levels", objective.levels},
                        {"eta", objective.eta}};
      break;
    case Objective::Kind::Composite:
      j["objective"] = {{"kind", "composite"}, {"spec", spec_to_json(*objective.spec)}};
      break;
    case Objective::Kind::BregmanMean:
      j["objective"] = {{"kind", "bregman_mean"},
                        {"b", objective.bregman_b},
                        {"c", objective.bregman_c}};
      break;
  }
  j["response"] = response_name;
  j["columns"] = json::array();
  for (const auto& col : columns) {
    j["columns"].push_back({{"kind", column_kind_name(col.kind)},
                            {"name", col.name},
                            {"min", col.min},
                            {"max", col.max},
                            {"group", col.group},
                            {"level", col.level}});
  }
  j["starts"] = json::array();
  for (const auto& params : starts) {
    j["starts"].push_back(std::vector<double>(
        params.flat().data(), params.flat().data() + params.flat().size()));
  }

  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  out << j.dump(1) << '\n';
}

FittedModel FittedModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open model file: " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": not a valid model file (" + e.what() + ")");
  }
  if (j.value("format", "") != "dqr-model") {
    throw std::runtime_error(path + ": not a dqr model file");
  }

  FittedModel model;
  const json& net = j.at("network");
  model.config.input_dim = net.at("input_dim").get<int>();
  model.config.hidden_dims = net.at("hidden_dims").get<std::vector<int>>();
  model.config.head = head_kind_from_name(net.at("head").get<std::string>());
  model.config.levels = net.at("levels").get<std::vector<double>>();
  model.config.seed = net.at("seed").get<std::uint64_t>();
  model.config.validate();

  const json& obj = j.at("objective");
  const std::string kind = obj.at("kind").get<std::string>();
  if (kind == "multi_quantile") {
    model.objective = Objective::multi_quantile(
        obj.at("levels").get<std::vector<double>>(),
        obj.at("eta").get<std::vector<double>>());
  } else if (kind == "composite") {
    model.objective = Objective::composite(spec_from_json(obj.at("spec")));
  } else if (kind == "bregman_mean") {
    model.objective = Objective::bregman_mean(obj.at("b").get<double>(),
                                              obj.at("c").get<double>());
  } else {
    throw std::runtime_error("unknown objective kind '" + kind + "'");
  }
  model.objective.validate_against(model.config);

  model.response_name = j.value("response", "y");
  for (const auto& col : j.at("columns")) {
    model.columns.push_back({column_kind_from_name(col.at("kind").get<std::string>()),
                             col.at("name").get<std::string>(),
                             col.at("min").get<double>(), col.at("max").get<double>(),
                             col.at("group").get<std::string>(),
                             col.at("level").get<std::string>()});
  }
  if (model.columns.size() != static_cast<std::size_t>(model.config.input_dim) + 1) {
    throw std::runtime_error(path + ": column metadata does not match input_dim");
  }

  for (const auto& start : j.at("starts")) {
    const auto values = start.get<std::vector<double>>();
    Eigen::VectorXd theta =
        Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
    model.starts.push_back(NetworkParams::from_flat(model.config, std::move(theta)));
  }
  if (model.starts.empty()) {
    throw std::runtime_error(path + ": model has no parameter sets");
  }
  return model;
}

}  // namespace dqr
