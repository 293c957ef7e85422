#include "dqr/commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dqr/data_io.hpp"
#include "dqr/kv.hpp"
#include "dqr/model.hpp"
#include "dqr/phi_select.hpp"
#include "dqr/train.hpp"

namespace dqr::cli {

namespace {

// ---------------------------------------------------------------------------
// Report files: flat key = value lines plus named CSV tables, written with
// round-trip numerals so reruns with the same seed are byte identical.

class Report {
 public:
  explicit Report(const std::string& command) {
    body_ << "# dqr " << command << " report\n";
    kv("command", command);
  }

  void kv(const std::string& key, const std::string& value) {
    body_ << key << " = " << value << '\n';
  }
  void kv(const std::string& key, double value) { kv(key, format_double(value)); }
  void kv(const std::string& key, long value) { kv(key, std::to_string(value)); }

  void table(const std::string& name, const std::string& header,
             const std::vector<std::string>& rows) {
    body_ << "\n[" << name << "]\n" << header << '\n';
    for (const auto& row : rows) body_ << row << '\n';
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) {
      throw std::runtime_error("cannot open for writing: " + path);
    }
    out << body_.str();
  }

 private:
  std::ostringstream body_;
};

std::string list_to_string(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

// Keys shared by the commands that train networks.
const std::set<std::string> kTrainKeys = {
    "data",       "schema",     "test_fraction", "hidden_dims",  "batch_size",
    "learning_rate", "max_epochs", "patience",   "n_starts",     "val_fraction",
    "optimizer",  "threads",    "seed",          "out",          "model_out",
    "trace_out",  "predictions_out", "freeze_hidden", "moment_decays"};

TrainConfig train_config_from(const RunConfig& cfg) {
  TrainConfig tc;
  tc.batch_size = static_cast<int>(cfg.integer_or("batch_size", 512));
  tc.max_epochs = static_cast<int>(cfg.integer_or("max_epochs", 500));
  tc.patience = static_cast<int>(cfg.integer_or("patience", 15));
  tc.learning_rate = cfg.number_or("learning_rate", 1e-3);
  tc.n_starts = static_cast<int>(cfg.integer_or("n_starts", 5));
  tc.val_fraction = cfg.number_or("val_fraction", 0.2);
  tc.seed = static_cast<std::uint64_t>(cfg.integer_or("seed", 1));
  tc.threads = static_cast<int>(cfg.integer_or("threads", 0));
  tc.freeze_hidden = cfg.flag_or("freeze_hidden", false);
  if (cfg.has("moment_decays")) {
    const auto decays = cfg.number_list("moment_decays");
    if (decays.size() != 2) {
      throw domain_error("moment_decays must list two values");
    }
    tc.moment_decays = {decays[0], decays[1]};
  }
  const std::string opt = cfg.str_or("optimizer", "adam");
  if (opt == "nadam") {
    tc.nesterov = true;
  } else if (opt != "adam") {
    throw domain_error("optimizer must be adam or nadam");
  }
  tc.validate();
  return tc;
}

NetworkConfig network_config_from(const RunConfig& cfg, HeadKind head,
                                  std::vector<double> levels, int input_dim) {
  NetworkConfig nc;
  nc.input_dim = input_dim;
  nc.hidden_dims = cfg.int_list_or("hidden_dims", {20, 15, 10});
  nc.head = head;
  nc.levels = std::move(levels);
  nc.seed = static_cast<std::uint64_t>(cfg.integer_or("seed", 1));
  nc.validate();
  return nc;
}

void echo_train_keys(Report& report, const RunConfig& cfg, const TrainConfig& tc,
                     const NetworkConfig& nc) {
  report.kv("data", cfg.str("data"));
  report.kv("seed", static_cast<long>(tc.seed));
  report.kv("test_fraction", cfg.number_or("test_fraction", 0.1));
  std::string dims;
  for (std::size_t i = 0; i < nc.hidden_dims.size(); ++i) {
    if (i) dims += ',';
    dims += std::to_string(nc.hidden_dims[i]);
  }
  report.kv("hidden_dims", dims);
  report.kv("batch_size", static_cast<long>(tc.batch_size));
  report.kv("learning_rate", tc.learning_rate);
  report.kv("max_epochs", static_cast<long>(tc.max_epochs));
  report.kv("patience", static_cast<long>(tc.patience));
  report.kv("n_starts", static_cast<long>(tc.n_starts));
  report.kv("val_fraction", tc.val_fraction);
  report.kv("optimizer", tc.nesterov ? "nadam" : "adam");
}

void write_traces(const FitReport& fit_report, const std::string& prefix) {
  for (std::size_t s = 0; s < fit_report.starts.size(); ++s) {
    std::ofstream out(prefix + "_s" + std::to_string(s) + ".csv");
    if (!out) {
      throw std::runtime_error("cannot open trace file for writing: " + prefix);
    }
    out << "epoch,train_loss,val_loss\n";
    for (const auto& e : fit_report.starts[s].trace) {
      out << e.epoch << ',' << format_double(e.train_loss) << ','
          << format_double(e.val_loss) << '\n';
    }
  }
}

void evaluation_block(Report& report, const CalibrationReport& cal) {
  report.kv("n_test", static_cast<long>(cal.n));
  report.kv("coverage", cal.coverage);
  report.kv("v_minus", cal.v_minus);
  report.kv("v_plus", cal.v_plus);
}

std::string selection_row(const std::string& name, const PhiRegression& reg) {
  return name + ',' + format_double(reg.intercept) + ',' + format_double(reg.slope) +
         ',' + format_double(reg.b) + ',' + format_double(reg.c);
}

void selection_table(Report& report, const PhiSelection& sel) {
  report.table("phi_selection", "claims,intercept,slope,b,c",
               {selection_row("all", sel.all_claims),
                selection_row("large", sel.large_claims),
                selection_row("small", sel.small_claims)});
}

void spec_block(Report& report, const ScoreSpec& spec) {
  report.kv("form", score_form_name(spec.form()));
  report.kv("tau", spec.tau());
  report.kv("g_scale", spec.g_scale());
  if (spec.phi()) {
    report.kv("b", spec.phi()->b);
    report.kv("c", spec.phi()->c);
  }
  if (spec.phi_minus()) {
    report.kv("b_minus", spec.phi_minus()->b);
    report.kv("c_minus", spec.phi_minus()->c);
  }
  if (spec.phi_plus()) {
    report.kv("b_plus", spec.phi_plus()->b);
    report.kv("c_plus", spec.phi_plus()->c);
  }
}

ScoreSpec spec_from_config(const RunConfig& cfg, double tau) {
  const std::string form = cfg.str("form");
  const double g_scale = cfg.number_or("g_scale", 1.0);
  if (form == "additive") {
    return ScoreSpec::additive({cfg.number("b_minus"), cfg.number_or("c_minus", 2.0)},
                               {cfg.number("b_plus"), cfg.number_or("c_plus", 2.0)},
                               g_scale, tau);
  }
  if (form == "revelation_plus") {
    return ScoreSpec::revelation_plus({cfg.number("b"), cfg.number_or("c", 2.0)},
                                      {cfg.number("b_plus"), cfg.number_or("c_plus", 2.0)},
                                      g_scale, tau);
  }
  if (form == "revelation_minus") {
    return ScoreSpec::revelation_minus({cfg.number("b"), cfg.number_or("c", 2.0)},
                                       {cfg.number("b_minus"), cfg.number_or("c_minus", 2.0)},
                                       g_scale, tau);
  }
  throw domain_error("form must be additive, revelation_plus, revelation_minus or select");
}

// Pre-fit mean and quantile models for the data-driven spec selection, then
// run the selection itself.
std::pair<ScoreSpec, PhiSelection> run_selection(const Dataset& learn, double tau,
                                                 const RunConfig& cfg,
                                                 const TrainConfig& tc) {
  NetworkConfig mean_cfg = network_config_from(cfg, HeadKind::MultiQuantileAdditive,
                                               {0.5}, learn.n_features());
  FitReport mean_fit = fit(learn, std::nullopt, mean_cfg, tc,
                           Objective::bregman_mean(0.0));
  std::vector<NetworkParams> mean_starts;
  for (const auto& s : mean_fit.starts) {
    if (!s.failed) mean_starts.push_back(s.best_params);
  }
  const Eigen::MatrixXd mu = average_predictions(mean_starts, learn.features, mean_cfg);

  NetworkConfig q_cfg = network_config_from(cfg, HeadKind::MultiQuantileAdditive,
                                            {tau}, learn.n_features());
  FitReport q_fit = fit(learn, std::nullopt, q_cfg, tc,
                        Objective::multi_quantile({tau}, {1.0}));
  std::vector<NetworkParams> q_starts;
  for (const auto& s : q_fit.starts) {
    if (!s.failed) q_starts.push_back(s.best_params);
  }
  const Eigen::MatrixXd qhat = average_predictions(q_starts, learn.features, q_cfg);

  return select_composite_spec(
      learn, tau, std::vector<double>(mu.col(0).data(), mu.col(0).data() + mu.rows()),
      std::vector<double>(qhat.col(0).data(), qhat.col(0).data() + qhat.rows()),
      network_config_from(cfg, HeadKind::MultiQuantileAdditive, {0.5},
                          learn.n_features()),
      tc, cfg.number_or("g_scale", 1.0));
}

}  // namespace

RunConfig::RunConfig(std::map<std::string, std::string> kv,
                     std::set<std::string> allowed, std::set<std::string> required)
    : kv_(std::move(kv)) {
  for (const auto& [key, value] : kv_) {
    (void)value;
    if (!allowed.count(key)) {
      throw domain_error("unknown config key '" + key + "'");
    }
  }
  for (const auto& key : required) {
    if (!kv_.count(key)) {
      throw domain_error("missing required config key '" + key + "'");
    }
  }
}

std::string RunConfig::str(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) {
    throw domain_error("missing required config key '" + key + "'");
  }
  return it->second;
}

std::string RunConfig::str_or(const std::string& key, const std::string& fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double RunConfig::number(const std::string& key) const {
  const std::string s = str(key);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw domain_error("config key '" + key + "': cannot parse number '" + s + "'");
  }
  return v;
}

double RunConfig::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long RunConfig::integer(const std::string& key) const {
  const double v = number(key);
  const long n = static_cast<long>(std::llround(v));
  if (v != static_cast<double>(n)) {
    throw domain_error("config key '" + key + "' must be an integer");
  }
  return n;
}

long RunConfig::integer_or(const std::string& key, long fallback) const {
  return has(key) ? integer(key) : fallback;
}

bool RunConfig::flag_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string s = str(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw domain_error("config key '" + key + "' must be true or false");
}

std::vector<double> RunConfig::number_list(const std::string& key) const {
  const std::string s = str(key);
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string token = trim(item);
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (token.empty() || end != token.c_str() + token.size() || !std::isfinite(v)) {
      throw domain_error("config key '" + key + "': cannot parse list entry '" +
                         token + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) {
    throw domain_error("config key '" + key + "' must be a nonempty list");
  }
  return out;
}

std::vector<int> RunConfig::int_list_or(const std::string& key,
                                        const std::vector<int>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<int> out;
  for (double v : number_list(key)) {
    const int n = static_cast<int>(std::llround(v));
    if (v != static_cast<double>(n)) {
      throw domain_error("config key '" + key + "' must list integers");
    }
    out.push_back(n);
  }
  return out;
}

void cmd_simulate(const RunConfig& cfg) {
  const std::string generator = cfg.str("generator");
  const auto n = static_cast<std::size_t>(cfg.integer("n"));
  const double tau = cfg.number("tau");
  const auto seed = static_cast<std::uint64_t>(cfg.integer_or("seed", 1));
  const std::string out_data = cfg.str("out_data");
  const std::string out_truth = cfg.str("out_truth");
  const std::string out_schema = cfg.str_or("out_schema", out_data + ".schema");

  Dataset data;
  if (generator == "gamma") {
    const auto coeff = cfg.number_list("coeff_mu");
    data = simulate_gamma(n, seed,
                          Eigen::Map<const Eigen::VectorXd>(coeff.data(), coeff.size()),
                          cfg.number("gamma_shape"), tau);
  } else if (generator == "lognormal") {
    const auto cm = cfg.number_list("coeff_m");
    const auto cs = cfg.number_list("coeff_s");
    data = simulate_lognormal(n, seed,
                              Eigen::Map<const Eigen::VectorXd>(cm.data(), cm.size()),
                              Eigen::Map<const Eigen::VectorXd>(cs.data(), cs.size()),
                              tau);
  } else {
    throw domain_error("generator must be gamma or lognormal");
  }

  write_csv(data, out_data);
  write_triplet_csv(*data.truth, out_truth);
  std::ofstream schema(out_schema);
  if (!schema) {
    throw std::runtime_error("cannot open for writing: " + out_schema);
  }
  schema << "response = " << data.response_name << '\n';
  for (std::size_t j = 1; j < data.columns.size(); ++j) {
    schema << "feature." << data.columns[j].name << " = continuous\n";
  }
}

void cmd_fit_quantiles(const RunConfig& cfg) {
  const auto levels = cfg.number_list("levels");
  const std::string head_name = cfg.str_or("head", "additive");
  HeadKind head;
  if (head_name == "additive") {
    head = HeadKind::MultiQuantileAdditive;
  } else if (head_name == "multiplicative") {
    head = HeadKind::MultiQuantileMultiplicative;
  } else {
    throw domain_error("head must be additive or multiplicative");
  }
  const TrainConfig tc = train_config_from(cfg);
  const std::string out = cfg.str("out");

  const Dataset all = load_csv(cfg.str("data"), cfg.str("schema"));
  const auto [learn, test] =
      split_stratified(all, cfg.number_or("test_fraction", 0.1), tc.seed);

  const NetworkConfig nc = network_config_from(cfg, head, levels, learn.n_features());
  std::vector<double> eta;  // empty = AUTO
  if (cfg.has("eta") && cfg.str("eta") != "auto") eta = cfg.number_list("eta");
  const FitReport fit_report =
      fit(learn, test, nc, tc, Objective::multi_quantile(levels, eta));

  Report report("fit-quantiles");
  report.kv("head", head_name);
  report.kv("levels", list_to_string(levels));
  echo_train_keys(report, cfg, tc, nc);
  report.kv("eta", list_to_string(fit_report.eta));
  report.kv("n_learn", static_cast<long>(learn.size()));
  report.kv("n_test", static_cast<long>(test.size()));

  // Out-of-sample pinball losses and coverage ratios per level.
  std::vector<std::string> loss_rows, coverage_rows;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    double loss = 0.0, covered = 0.0;
    for (Eigen::Index i = 0; i < test.size(); ++i) {
      loss += pinball_loss(test.responses(i), fit_report.eval_predictions(i, j),
                           levels[j]);
      covered += (test.responses(i) <= fit_report.eval_predictions(i, j)) ? 1.0 : 0.0;
    }
    loss_rows.push_back(format_double(levels[j]) + ',' +
                        format_double(loss / test.size()));
    coverage_rows.push_back(format_double(levels[j]) + ',' +
                            format_double(covered / test.size()));
  }
  report.table("pinball_losses", "level,pinball", loss_rows);
  report.table("coverage", "level,coverage", coverage_rows);
  report.save(out);

  if (cfg.has("model_out")) {
    FittedModel model;
    model.config = nc;
    model.objective = Objective::multi_quantile(levels, fit_report.eta);
    model.columns = learn.columns;
    model.response_name = learn.response_name;
    for (const auto& s : fit_report.starts) {
      if (!s.failed) model.starts.push_back(s.best_params);
    }
    model.save(cfg.str("model_out"));
  }
  if (cfg.has("trace_out")) write_traces(fit_report, cfg.str("trace_out"));
  if (cfg.has("predictions_out")) {
    std::ofstream pred(cfg.str("predictions_out"));
    if (!pred) {
      throw std::runtime_error("cannot open for writing: " +
                               cfg.str("predictions_out"));
    }
    for (std::size_t j = 0; j < levels.size(); ++j) {
      pred << (j ? "," : "") << "q_" << format_double(levels[j]);
    }
    pred << '\n';
    for (Eigen::Index i = 0; i < test.size(); ++i) {
      for (std::size_t j = 0; j < levels.size(); ++j) {
        pred << (j ? "," : "") << format_double(fit_report.eval_predictions(i, j));
      }
      pred << '\n';
    }
  }
}

void cmd_fit_composite(const RunConfig& cfg) {
  const double tau = cfg.number("tau");
  const TrainConfig tc = train_config_from(cfg);
  const std::string out = cfg.str("out");

  const Dataset all = load_csv(cfg.str("data"), cfg.str("schema"));
  const auto [learn, test] =
      split_stratified(all, cfg.number_or("test_fraction", 0.1), tc.seed);

  std::optional<PhiSelection> selection;
  ScoreSpec spec = [&]() {
    if (cfg.str("form") == "select") {
      auto [selected, sel] = run_selection(learn, tau, cfg, tc);
      selection = sel;
      return selected;
    }
    return spec_from_config(cfg, tau);
  }();

  const NetworkConfig nc = network_config_from(cfg, HeadKind::CompositeAdditive,
                                               {tau}, learn.n_features());
  const FitReport fit_report = fit(learn, test, nc, tc, Objective::composite(spec));

  Report report("fit-composite");
  spec_block(report, spec);
  echo_train_keys(report, cfg, tc, nc);
  report.kv("n_learn", static_cast<long>(learn.size()));
  report.kv("composite_score_test", fit_report.eval_objective);

  // Mean recombination tau E- + (1-tau) E+ over the test set.
  double recombined = 0.0;
  for (Eigen::Index i = 0; i < test.size(); ++i) {
    recombined += tau * fit_report.eval_predictions(i, 0) +
                  (1.0 - tau) * fit_report.eval_predictions(i, 2);
  }
  report.kv("mean_recombined_premium", recombined / test.size());
  report.kv("mean_response_test", test.responses.mean());
  evaluation_block(report, *fit_report.calibration);
  if (selection) selection_table(report, *selection);
  report.save(out);

  if (cfg.has("model_out")) {
    FittedModel model;
    model.config = nc;
    model.objective = Objective::composite(spec);
    model.columns = learn.columns;
    model.response_name = learn.response_name;
    for (const auto& s : fit_report.starts) {
      if (!s.failed) model.starts.push_back(s.best_params);
    }
    model.save(cfg.str("model_out"));
  }
  if (cfg.has("trace_out")) write_traces(fit_report, cfg.str("trace_out"));
  if (cfg.has("predictions_out")) {
    write_triplet_csv(fit_report.eval_predictions, cfg.str("predictions_out"));
  }
}

void cmd_select_phi(const RunConfig& cfg) {
  const double tau = cfg.number("tau");
  const TrainConfig tc = train_config_from(cfg);
  const std::string out = cfg.str("out");

  const Dataset all = load_csv(cfg.str("data"), cfg.str("schema"));
  const auto [learn, test] =
      split_stratified(all, cfg.number_or("test_fraction", 0.1), tc.seed);
  (void)test;

  auto [spec, selection] = run_selection(learn, tau, cfg, tc);

  Report report("select-phi");
  report.kv("tau", tau);
  echo_train_keys(report, cfg, tc,
                  network_config_from(cfg, HeadKind::MultiQuantileAdditive, {0.5},
                                      learn.n_features()));
  report.kv("chosen_form", score_form_name(selection.chosen_form));
  spec_block(report, spec);
  selection_table(report, selection);
  report.save(out);
}

void cmd_evaluate(const RunConfig& cfg) {
  const std::string out = cfg.str("out");
  const Dataset data = load_csv(cfg.str("data"), cfg.str("schema"));

  Report report("evaluate");
  std::vector<CompositeTriplet> predictions;
  double tau;

  if (cfg.has("model")) {
    const FittedModel model = FittedModel::load(cfg.str("model"));
    if (model.config.head != HeadKind::CompositeAdditive) {
      throw domain_error(
          "evaluate supports composite models; quantile fits report their own "
          "coverage tables");
    }
    tau = model.objective.spec->tau();
    const Dataset aligned = align_to_columns(data, model.columns);
    const Eigen::MatrixXd preds = model.predict_on(aligned);
    predictions.reserve(preds.rows());
    for (Eigen::Index i = 0; i < preds.rows(); ++i) {
      predictions.emplace_back(preds(i, 0), preds(i, 1), preds(i, 2));
    }
    report.kv("model", cfg.str("model"));
  } else if (cfg.has("predictions")) {
    tau = cfg.number("tau");
    const Eigen::MatrixXd preds = load_triplet_csv(cfg.str("predictions"));
    if (preds.rows() != data.size()) {
      throw domain_error("predictions file has " + std::to_string(preds.rows()) +
                         " rows, dataset has " + std::to_string(data.size()));
    }
    predictions.reserve(preds.rows());
    for (Eigen::Index i = 0; i < preds.rows(); ++i) {
      try {
        predictions.emplace_back(preds(i, 0), preds(i, 1), preds(i, 2));
      } catch (const domain_error& e) {
        throw domain_error("predictions row " + std::to_string(i + 1) + ": " +
                           e.what());
      }
    }
    report.kv("predictions", cfg.str("predictions"));
  } else {
    throw domain_error("evaluate needs either 'model' or 'predictions'");
  }

  std::vector<double> obs(data.responses.data(),
                          data.responses.data() + data.size());
  const CalibrationReport cal = calibration_report(predictions, obs, tau);
  report.kv("data", cfg.str("data"));
  report.kv("tau", tau);
  evaluation_block(report, cal);
  report.save(out);
}

int run_command(const std::string& name, const CommandOptions& opts,
                std::ostream& err) {
  try {
    auto kv = parse_kv_file(opts.config_path);
    if (opts.seed) kv["seed"] = std::to_string(*opts.seed);
    if (opts.out) kv["out"] = *opts.out;

    if (name == "simulate") {
      std::set<std::string> allowed = {"generator", "n",        "tau",
                                       "seed",      "coeff_mu", "gamma_shape",
                                       "coeff_m",   "coeff_s",  "out_data",
                                       "out_truth", "out_schema"};
      cmd_simulate(RunConfig(std::move(kv), std::move(allowed),
                             {"generator", "n", "tau", "out_data", "out_truth"}));
    } else if (name == "fit-quantiles") {
      std::set<std::string> allowed = kTrainKeys;
      allowed.insert({"levels", "head", "eta"});
      cmd_fit_quantiles(RunConfig(std::move(kv), std::move(allowed),
                                  {"data", "schema", "levels", "out"}));
    } else if (name == "fit-composite") {
      std::set<std::string> allowed = kTrainKeys;
      allowed.insert({"tau", "form", "g_scale", "b", "c", "b_minus", "c_minus",
                      "b_plus", "c_plus"});
      cmd_fit_composite(RunConfig(std::move(kv), std::move(allowed),
                                  {"data", "schema", "tau", "form", "out"}));
    } else if (name == "select-phi") {
      std::set<std::string> allowed = kTrainKeys;
      allowed.insert({"tau", "g_scale"});
      cmd_select_phi(RunConfig(std::move(kv), std::move(allowed),
                               {"data", "schema", "tau", "out"}));
    } else if (name == "evaluate") {
      cmd_evaluate(RunConfig(std::move(kv),
                             {"model", "predictions", "data", "schema", "tau",
                              "seed", "out"},
                             {"data", "schema", "out"}));
    } else {
      err << "error: unknown command '" << name << "'\n";
      return 1;
    }
    return 0;
  } catch (const domain_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace dqr::cli
