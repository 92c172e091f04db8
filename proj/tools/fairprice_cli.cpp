// fairprice: audit datasets for group-fairness metrics, repair them toward
// barycenter marginals, fit fair models, and run the excess-risk simulation.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "fairprice/confusion.hpp"
#include "fairprice/dataset.hpp"
#include "fairprice/eo_classifier.hpp"
#include "fairprice/gaussian_eo.hpp"
#include "fairprice/joint_pmf.hpp"
#include "fairprice/metrics.hpp"
#include "fairprice/transport.hpp"

using nlohmann::json;
namespace fp = fairprice;

namespace {

constexpr int kSchemaVersion = 1;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t seed) {
  if (opt->count() > 0) return seed;
  std::random_device rd;
  std::uint64_t s = (std::uint64_t(rd()) << 32) ^ rd();
  std::cerr << "seed: " << s << "\n";
  return s;
}

int env_threads() {
  const char* v = std::getenv("FAIRPRICE_THREADS");
  if (!v) return 0;
  int n = std::atoi(v);
  return n > 0 ? n : 0;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

// ---------------------------------------------------------------- audit

struct FailOn {
  std::optional<double> di;       // fail when DI <= threshold
  std::optional<double> eo;       // fail when max |EO gap| > threshold
  std::optional<double> sp;       // fail when |SP gap| > threshold
};

FailOn parse_fail_on(const std::vector<std::string>& specs) {
  FailOn f;
  for (const auto& raw : specs) {
    for (const auto& item : split_list(raw)) {
      auto pos = item.find(':');
      if (pos == std::string::npos)
        throw CLI::ValidationError("--fail-on", "expected metric:threshold");
      const std::string key = item.substr(0, pos);
      const double thr = std::stod(item.substr(pos + 1));
      if (key == "di") f.di = thr;
      else if (key == "eo") f.eo = thr;
      else if (key == "sp") f.sp = thr;
      else throw CLI::ValidationError("--fail-on", "unknown metric " + key);
    }
  }
  return f;
}

int cmd_audit(const std::string& data, const std::string& sensitive,
              const std::string& target, const std::string& pred,
              const std::string& score, int bins,
              const std::vector<std::string>& fail_on_spec,
              const std::string& out_path) {
  fp::DatasetSchema schema;
  schema.feature_columns = {pred};
  if (!score.empty()) schema.feature_columns.push_back(score);
  schema.sensitive_column = sensitive;
  schema.target_column = target;
  const fp::Dataset ds = fp::load_dataset(data, schema);

  const std::size_t n = ds.rows();
  std::vector<int> truth(n), predv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = ds.target(i), yh = ds.features(i, 0);
    if ((y != 0.0 && y != 1.0) || (yh != 0.0 && yh != 1.0))
      throw std::runtime_error("audit: target and pred columns must be 0/1");
    truth[i] = int(y);
    predv[i] = int(yh);
  }
  const fp::GroupConfusion conf =
      fp::confusion_by_group(truth, predv, ds.sensitive);

  json rep;
  rep["schema_version"] = kSchemaVersion;
  auto put = [&rep](const char* key, auto&& compute) {
    try {
      rep[key] = compute();
    } catch (const std::exception&) {
      rep[key] = "undefined";
    }
  };

  const bool binary = conf.binary();
  if (binary) {
    put("statistical_parity_gap", [&] { return fp::statistical_parity_gap(conf); });
    put("disparate_impact", [&] { return fp::disparate_impact(conf); });
    put("di_above_0.8", [&] { return fp::has_di_at_level(conf, 0.8); });
    put("equalized_odds_tpr_gap", [&] { return fp::equalized_odds_gaps(conf).first; });
    put("equalized_odds_fpr_gap", [&] { return fp::equalized_odds_gaps(conf).second; });
    put("equal_opportunity_gap", [&] { return fp::equalized_odds_gaps(conf).first; });
    put("disparate_mistreatment_gap", [&] { return fp::disparate_mistreatment_gap(conf); });
    put("predictive_parity_gap", [&] { return fp::predictive_parity_gap(conf); });
    put("di_predictability_level", [&] { return fp::di_predictability_level(conf); });
    put("ber_pred_vs_sensitive", [&] { return fp::ber(predv, ds.sensitive); });
  } else {
    put("multiclass_disparate_impact",
        [&] { return fp::multiclass_disparate_impact(conf); });
  }

  if (!score.empty() && binary) {
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) scores[i] = ds.features(i, 1);
    put("balance_for_positive_class",
        [&] { return fp::balance_for_class(scores, truth, ds.sensitive, 1); });
    put("balance_for_negative_class",
        [&] { return fp::balance_for_class(scores, truth, ds.sensitive, 0); });
    put("calibration_max_discrepancy", [&] {
      return fp::calibration_report(scores, truth, ds.sensitive, bins)
          .max_discrepancy;
    });
    put("well_calibration_residual", [&] {
      return fp::calibration_report(scores, truth, ds.sensitive, bins)
          .well_calibration_residual;
    });
  }

  const std::string text = rep.dump(2) + "\n";
  if (out_path.empty()) std::cout << text;
  else write_file(out_path, text);

  const FailOn fail = parse_fail_on(fail_on_spec);
  bool violated = false;
  if (fail.di && binary) {
    try {
      if (!fp::has_di_at_level(conf, *fail.di)) violated = true;
    } catch (const std::exception&) {}
  }
  if (fail.eo && binary) {
    try {
      auto [t, f] = fp::equalized_odds_gaps(conf);
      if (std::max(std::abs(t), std::abs(f)) > *fail.eo) violated = true;
    } catch (const std::exception&) {}
  }
  if (fail.sp && binary) {
    try {
      if (std::abs(fp::statistical_parity_gap(conf)) > *fail.sp) violated = true;
    } catch (const std::exception&) {}
  }
  return violated ? 2 : 0;
}

// ---------------------------------------------------------------- repair

json plan_to_json(const fp::RepairPlan& plan) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["lambda"] = plan.lambda;
  j["seed"] = plan.seed;
  j["features"] = plan.feature_names;
  json maps = json::object();
  for (std::size_t f = 0; f < plan.maps.size(); ++f) {
    json per_group = json::object();
    for (const auto& [g, cmap] : plan.maps[f]) {
      per_group[std::to_string(g)] = {{"source", cmap.source},
                                      {"target", cmap.target}};
    }
    maps[plan.feature_names[f]] = per_group;
  }
  j["maps"] = maps;
  return j;
}

fp::RepairPlan plan_from_json(const json& j) {
  fp::RepairPlan plan;
  plan.lambda = j.at("lambda").get<double>();
  plan.seed = j.at("seed").get<std::uint64_t>();
  plan.feature_names = j.at("features").get<std::vector<std::string>>();
  plan.maps.resize(plan.feature_names.size());
  for (std::size_t f = 0; f < plan.feature_names.size(); ++f) {
    const json& per_group = j.at("maps").at(plan.feature_names[f]);
    for (auto it = per_group.begin(); it != per_group.end(); ++it) {
      fp::RepairPlan::CoordinateMap cmap;
      cmap.source = it.value().at("source").get<std::vector<double>>();
      cmap.target = it.value().at("target").get<std::vector<double>>();
      plan.maps[f][std::stoi(it.key())] = std::move(cmap);
    }
  }
  return plan;
}

int cmd_repair(const std::string& data, const std::vector<std::string>& features,
               const std::string& sensitive, const std::string& target,
               double lambda, std::uint64_t seed, const std::string& out,
               const std::string& plan_path, const std::string& replay_path) {
  fp::DatasetSchema schema;
  schema.feature_columns = features;
  schema.sensitive_column = sensitive;
  schema.target_column = target;
  const fp::Dataset ds = fp::load_dataset(data, schema);

  fp::Dataset repaired;
  fp::RepairPlan plan;
  if (!replay_path.empty()) {
    std::ifstream in(replay_path);
    if (!in) throw std::runtime_error("cannot open plan: " + replay_path);
    json j;
    in >> j;
    plan = plan_from_json(j);
    repaired = fp::apply_repair_plan(ds, plan);
  } else {
    repaired = fp::random_repair(ds, lambda, seed, &plan);
  }
  fp::save_dataset(repaired, out);
  if (!plan_path.empty()) write_file(plan_path, plan_to_json(plan).dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------- fit

json predictor_to_json(const fp::LinearPredictor& pred) {
  json j;
  j["beta0"] = pred.beta0;
  j["beta"] = std::vector<double>(pred.beta.begin(), pred.beta.end());
  return j;
}

int cmd_fit(const std::string& method, const std::string& data,
            const std::vector<std::string>& features,
            const std::string& sensitive, const std::string& target,
            const std::string& out_path) {
  fp::DatasetSchema schema;
  schema.feature_columns = features;
  schema.sensitive_column = sensitive;
  schema.target_column = target;
  const fp::Dataset ds = fp::load_dataset(data, schema);

  json rep;
  rep["schema_version"] = kSchemaVersion;
  rep["method"] = method;

  if (method == "gaussian-eo" || method == "unconstrained") {
    Eigen::VectorXd s(ds.rows());
    for (std::size_t i = 0; i < ds.rows(); ++i) s(i) = ds.sensitive[i];
    const fp::CovarianceEstimate est =
        fp::estimate_covariance(ds.features, s, ds.target);
    const fp::LinearPredictor pred = method == "gaussian-eo"
                                         ? fp::fit_eo_fair_linear(est.model)
                                         : fp::fit_unconstrained_linear(est.model);
    rep["predictor"] = predictor_to_json(pred);
    rep["constraint_residual"] = fp::eo_constraint_residual(est.model, pred);
    rep["train_risk"] = fp::population_risk(est.model, pred);
    rep["psd_projected"] = est.psd_projected;
  } else if (method == "eo-classifier") {
    const fp::EtaFitResult fit = fp::fit_eta_logistic(ds);
    fp::GroupSample dist;
    for (std::size_t i = 0; i < ds.rows(); ++i)
      dist.x[ds.sensitive[i]].push_back(ds.features.row(i).transpose());
    const fp::ThetaSolution sol = fp::solve_theta(fit.model, dist);
    const fp::Classifier g = fp::recalibrated_classifier(fit.model, sol.theta);

    std::vector<int> truth(ds.rows()), pred(ds.rows());
    for (std::size_t i = 0; i < ds.rows(); ++i) {
      truth[i] = int(ds.target(i));
      pred[i] = g(ds.features.row(i).transpose(), ds.sensitive[i]);
    }
    const fp::GroupConfusion conf =
        fp::confusion_by_group(truth, pred, ds.sensitive);
    auto [tpr_gap, fpr_gap] = fp::equalized_odds_gaps(conf);

    for (int s = 0; s < 2; ++s) {
      json grp;
      grp["intercept"] = fit.fit.intercept[s];
      grp["coef"] = std::vector<double>(fit.fit.coef[s].begin(),
                                        fit.fit.coef[s].end());
      rep["logistic"][std::to_string(s)] = grp;
    }
    rep["priors"] = {{"p_y1_s0", fit.model.joint[1][0]},
                     {"p_y1_s1", fit.model.joint[1][1]},
                     {"p_y0_s0", fit.model.joint[0][0]},
                     {"p_y0_s1", fit.model.joint[0][1]}};
    rep["theta"] = {sol.theta.theta0, sol.theta.theta1};
    rep["residuals"] = {sol.residual_tpr, sol.residual_fpr};
    rep["train_tpr_gap"] = tpr_gap;
    rep["train_fpr_gap"] = fpr_gap;
    rep["train_risk"] = fp::risk_of(g, dist, fit.model);
  } else {
    throw CLI::ValidationError("--method",
                               "expected gaussian-eo|eo-classifier|unconstrained");
  }

  const std::string text = rep.dump(2) + "\n";
  if (out_path.empty()) std::cout << text;
  else write_file(out_path, text);
  return 0;
}

// ---------------------------------------------------------------- simulate

fp::SimulationConfig config_from_json(const json& j) {
  fp::SimulationConfig c = fp::SimulationConfig::defaults();
  if (j.contains("Sigma_X")) {
    const auto rows = j.at("Sigma_X").get<std::vector<std::vector<double>>>();
    c.Sigma_X.resize(rows.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t k = 0; k < rows.size(); ++k) c.Sigma_X(i, k) = rows[i][k];
  }
  if (j.contains("Sigma_XS")) {
    const auto v = j.at("Sigma_XS").get<std::vector<double>>();
    c.Sigma_XS = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
  }
  if (j.contains("Sigma_S")) c.Sigma_S = j.at("Sigma_S").get<double>();
  if (j.contains("beta0")) c.beta0 = j.at("beta0").get<double>();
  if (j.contains("beta")) {
    const auto v = j.at("beta").get<std::vector<double>>();
    c.beta = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
  }
  if (j.contains("noise_sd")) c.noise_sd = j.at("noise_sd").get<double>();
  return c;
}

int cmd_simulate(const std::string& sizes_str, int reps, std::uint64_t seed,
                 const std::string& config_path, const std::string& prefix) {
  fp::SimulationConfig config = fp::SimulationConfig::defaults();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config: " + config_path);
    json j;
    in >> j;
    config = config_from_json(j);
  }
  if (!sizes_str.empty()) {
    config.sizes.clear();
    for (const auto& s : split_list(sizes_str))
      config.sizes.push_back(std::stoi(s));
  }
  config.reps = reps;
  config.seed = seed;

  const fp::ExcessRiskCurve curve = fp::simulate_excess_risk(config);

  std::ostringstream csv;
  csv << "n,mean,sd,reps\n";
  for (const auto& pt : curve.points)
    csv << pt.n << "," << fmt17(pt.mean) << "," << fmt17(pt.sd) << ","
        << (pt.reps - pt.failures) << "\n";
  write_file(prefix + ".csv", csv.str());

  std::ostringstream lcsv;
  lcsv << "n,stat,value\n";
  for (const auto& pt : curve.points) {
    lcsv << pt.n << ",mean," << fmt17(pt.mean) << "\n";
    lcsv << pt.n << ",sd," << fmt17(pt.sd) << "\n";
  }
  write_file(prefix + "_long.csv", lcsv.str());

  json j;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = curve.seed;
  j["population_excess_risk"] = fp::excess_risk(config.implied_model());
  for (const auto& pt : curve.points)
    j["points"].push_back({{"n", pt.n},
                           {"mean", pt.mean},
                           {"sd", pt.sd},
                           {"reps", pt.reps},
                           {"failures", pt.failures}});
  write_file(prefix + ".json", j.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------- witness

int cmd_witness(const std::string& pair_str, double delta, double grid_step,
                const std::string& out_path) {
  fp::CriterionPair pair;
  if (pair_str == "sp-eo") pair = fp::CriterionPair::SP_EO;
  else if (pair_str == "sp-pp") pair = fp::CriterionPair::SP_PP;
  else if (pair_str == "eo-pp") pair = fp::CriterionPair::EO_PP;
  else throw CLI::ValidationError("--pair", "expected sp-eo|sp-pp|eo-pp");

  fp::WitnessSearchOptions opts;
  opts.grid_step = grid_step;
  opts.threads = env_threads();
  const fp::WitnessResult res = fp::impossibility_witness_search(pair, delta, opts);

  json j;
  j["schema_version"] = kSchemaVersion;
  j["examined"] = res.examined;
  if (res.witness) {
    json cells = json::object();
    for (int y = 0; y < 2; ++y)
      for (int yh = 0; yh < 2; ++yh)
        for (int s = 0; s < 2; ++s)
          cells["p_y" + std::to_string(y) + "_yhat" + std::to_string(yh) +
                "_s" + std::to_string(s)] = res.witness->p[y][yh][s];
    j["witness"] = cells;
    const fp::CriteriaFlags flags = fp::criteria_satisfied(*res.witness, 1e-9);
    j["criteria"] = {{"sp", fp::to_string(flags.sp)},
                     {"eo", fp::to_string(flags.eo)},
                     {"pp", fp::to_string(flags.pp)},
                     {"pp_ppv_only", fp::to_string(flags.pp_ppv_only)}};
  } else {
    j["witness"] = nullptr;
    j["note"] = res.note;
  }
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty()) std::cout << text;
  else write_file(out_path, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairness auditing, data repair and fair-model fitting"};
  app.require_subcommand(1);

  // audit
  auto* audit = app.add_subcommand("audit", "compute fairness metrics for a CSV");
  std::string a_data, a_sensitive, a_target, a_pred, a_score, a_out;
  int a_bins = 10;
  std::vector<std::string> a_fail_on;
  audit->add_option("--data", a_data)->required();
  audit->add_option("--sensitive", a_sensitive)->required();
  audit->add_option("--target", a_target)->required();
  audit->add_option("--pred", a_pred)->required();
  audit->add_option("--score", a_score);
  audit->add_option("--bins", a_bins);
  audit->add_option("--fail-on", a_fail_on,
                    "metric:threshold, e.g. di:0.8 or eo:0.1");
  audit->add_option("--out", a_out);

  // repair
  auto* repair = app.add_subcommand("repair", "repair features toward the barycenter");
  std::string r_data, r_sensitive, r_target, r_out, r_plan, r_replay;
  std::vector<std::string> r_features;
  double r_lambda = 1.0;
  std::uint64_t r_seed = 0;
  repair->add_option("--data", r_data)->required();
  repair->add_option("--features", r_features)->required()->delimiter(',');
  repair->add_option("--sensitive", r_sensitive)->required();
  repair->add_option("--target", r_target)->required();
  repair->add_option("--lambda", r_lambda);
  auto* r_seed_opt = repair->add_option("--seed", r_seed);
  repair->add_option("--out", r_out)->required();
  repair->add_option("--plan", r_plan);
  repair->add_option("--replay", r_replay, "apply an existing plan JSON");

  // fit
  auto* fit = app.add_subcommand("fit", "fit a fair or unconstrained model");
  std::string f_method, f_data, f_sensitive, f_target, f_out;
  std::vector<std::string> f_features;
  fit->add_option("--method", f_method)->required();
  fit->add_option("--data", f_data)->required();
  fit->add_option("--features", f_features)->required()->delimiter(',');
  fit->add_option("--sensitive", f_sensitive)->required();
  fit->add_option("--target", f_target)->required();
  fit->add_option("--out", f_out);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "excess-risk convergence study");
  std::string s_sizes, s_config, s_prefix = "excess_risk";
  int s_reps = 1000;
  std::uint64_t s_seed = 0;
  simulate->add_option("--sizes", s_sizes, "comma-separated sample sizes");
  simulate->add_option("--reps", s_reps);
  auto* s_seed_opt = simulate->add_option("--seed", s_seed);
  simulate->add_option("--config", s_config, "generator config JSON");
  simulate->add_option("--out", s_prefix, "output file prefix");

  // witness
  auto* witness = app.add_subcommand(
      "witness", "grid search for joint pmfs satisfying a criterion pair");
  std::string w_pair, w_out;
  double w_delta = 0.2, w_step = 0.05;
  witness->add_option("--pair", w_pair)->required();
  witness->add_option("--delta", w_delta, "minimum base-rate gap");
  witness->add_option("--grid-step", w_step);
  witness->add_option("--out", w_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (audit->parsed())
      return cmd_audit(a_data, a_sensitive, a_target, a_pred, a_score, a_bins,
                       a_fail_on, a_out);
    if (repair->parsed())
      return cmd_repair(r_data, r_features, r_sensitive, r_target, r_lambda,
                        resolve_seed(r_seed_opt, r_seed), r_out, r_plan,
                        r_replay);
    if (fit->parsed())
      return cmd_fit(f_method, f_data, f_features, f_sensitive, f_target, f_out);
    if (simulate->parsed())
      return cmd_simulate(s_sizes, s_reps, resolve_seed(s_seed_opt, s_seed),
                          s_config, s_prefix);
    if (witness->parsed()) return cmd_witness(w_pair, w_delta, w_step, w_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
