// Batch front-end: threshold tables, worst-case probability curves,
// per-point certification runs, toy experiments, and diagnostic reports.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "idrs/certification.hpp"
#include "idrs/datasets.hpp"
#include "idrs/dimension_bounds.hpp"
#include "idrs/experiment.hpp"
#include "idrs/renyi.hpp"
#include "idrs/smoothing.hpp"
#include "idrs/worst_case.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitUnstable = 2;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string config_path;
  json config = json::object();

  void load() {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw CLI::ValidationError("--config", "cannot open " + config_path);
      in >> config;
    }
    // environment sits between the config file and explicit flags
    if (const char* env = std::getenv("IDRS_SEED"); env && !seed) seed = std::strtoull(env, nullptr, 10);
    if (const char* env = std::getenv("IDRS_JOBS"); env && !jobs) jobs = std::atoi(env);
  }

  template <typename T>
  T get(const std::string& key, T fallback) const {
    if (config.contains(key)) return config.at(key).get<T>();
    return fallback;
  }

  std::uint64_t effective_seed(std::uint64_t fallback) const {
    if (seed) return *seed;
    return get<std::uint64_t>("seed", fallback);
  }
  int effective_jobs(int fallback) const {
    if (jobs) return *jobs;
    return get<int>("jobs", fallback);
  }
};

idrs::SmoothingConfig smoothing_from(const GlobalOptions& g) {
  idrs::SmoothingConfig cfg;
  if (g.config.contains("smoothing")) {
    const auto& s = g.config.at("smoothing");
    cfg.n0 = s.value("n0", cfg.n0);
    cfg.n = s.value("n", cfg.n);
    cfg.alpha = s.value("alpha", cfg.alpha);
    cfg.mc_batch = s.value("mc_batch", cfg.mc_batch);
    if (s.value("pb_mode", std::string("complement")) == "estimated")
      cfg.pb_mode = idrs::PbMode::Estimated;
  }
  cfg.seed = g.effective_seed(cfg.seed);
  return cfg;
}

idrs::RadiusSearchConfig search_from(const GlobalOptions& g) {
  idrs::RadiusSearchConfig search;
  if (g.config.contains("search")) {
    const auto& s = g.config.at("search");
    search.num_steps = s.value("num_steps", search.num_steps);
    search.max_radius_factor = s.value("max_radius_factor", search.max_radius_factor);
    search.use_clamps = s.value("use_clamps", search.use_clamps);
  }
  return search;
}

json config_snapshot(const idrs::SmoothingConfig& cfg, const idrs::RadiusSearchConfig& search) {
  return json{{"smoothing",
               {{"n0", cfg.n0},
                {"n", cfg.n},
                {"alpha", cfg.alpha},
                {"mc_batch", cfg.mc_batch},
                {"seed", cfg.seed},
                {"pb_mode", cfg.pb_mode == idrs::PbMode::Complement ? "complement" : "estimated"}}},
              {"search",
               {{"num_steps", search.num_steps},
                {"max_radius_factor", search.max_radius_factor},
                {"use_clamps", search.use_clamps}}}};
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  return out;
}

// ---------------------------------------------------------------------------
// model + field specs (JSON)
// ---------------------------------------------------------------------------

std::unique_ptr<idrs::BaseClassifier> model_from_spec(const json& spec) {
  const std::string type = spec.at("type").get<std::string>();
  if (type == "ball") {
    return std::make_unique<idrs::BallIndicator>(spec.at("center").get<std::vector<double>>(),
                                                 spec.at("radius").get<double>());
  }
  if (type == "halfspace") {
    return std::make_unique<idrs::LinearHalfSpace>(spec.at("normal").get<std::vector<double>>(),
                                                   spec.at("offset").get<double>());
  }
  if (type == "knn") {
    auto train = idrs::load_dataset(spec.at("train").get<std::string>());
    return std::make_unique<idrs::KnnVote>(train.points, train.labels, train.dim,
                                           spec.value("k", 5));
  }
  if (type == "mlp") {
    std::ifstream in(spec.at("weights").get<std::string>());
    if (!in) throw std::runtime_error("cannot open model file");
    json m;
    in >> m;
    return std::make_unique<idrs::TinyMlp>(
        m.at("layer_sizes").get<std::vector<int>>(),
        m.at("weights").get<std::vector<std::vector<double>>>(),
        m.at("biases").get<std::vector<std::vector<double>>>());
  }
  throw std::runtime_error("unknown model type '" + type + "'");
}

idrs::SigmaField field_from_spec(const json& spec, const idrs::Dataset& refs) {
  double sigma_base = spec.at("sigma_base").get<double>();
  double rate = spec.value("rate", 0.0);
  int k = spec.value("k", 20);
  std::optional<double> cap;
  if (spec.contains("sigma_cap_factor") && spec.at("sigma_cap_factor").get<double>() > 0.0)
    cap = spec.at("sigma_cap_factor").get<double>() * sigma_base;
  double m;
  if (spec.contains("normalization") && spec.at("normalization").is_number()) {
    m = spec.at("normalization").get<double>();
  } else {
    auto mode = spec.value("normalization", std::string("min-dist")) == "mean-dist"
                    ? idrs::NormalizationMode::MeanDist
                    : idrs::NormalizationMode::MinDist;
    m = idrs::calibrate_normalization(refs.points, refs.dim, k, mode);
  }
  return idrs::SigmaField(refs.points, refs.dim, sigma_base, rate, k, m, cap,
                          spec.value("exclude_self", false));
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_thresholds(const std::vector<int>& dims, const std::vector<double>& pas,
                   const std::string& output) {
  auto out = open_output(output);
  out << "# schema=idrs.thresholds.v1\n";
  out << "N,pA,theoretical,practical,corollary\n";
  char buf[160];
  for (int n : dims) {
    for (double pa : pas) {
      idrs::ThresholdQuery q{n, pa};
      double theo = idrs::theoretical_threshold(q);
      double prac = idrs::practical_threshold(q);
      auto coro = idrs::closed_form_threshold(q);
      std::snprintf(buf, sizeof(buf), "%d,%.6g,%.9f,%.9f,", n, pa, theo, prac);
      out << buf;
      if (coro)
        out << *coro;
      else
        out << "nan";
      out << '\n';
    }
  }
  std::cerr << "wrote " << dims.size() * pas.size() << " threshold rows to " << output << '\n';
  return kExitOk;
}

int cmd_xi_curves(double sigma0, double sigma1, int dof, double pa, double a_max, int steps,
                  const std::string& output) {
  auto out = open_output(output);
  out << "# schema=idrs.xi-curves.v1\n";
  out << "a,xi,halfspace\n";
  double pb = 1.0 - pa;
  for (int i = 0; i < steps; ++i) {
    double a = a_max * i / (steps - 1);
    double xi;
    if (sigma0 > sigma1)
      xi = idrs::xi_greater(idrs::AdversaryPair{sigma0, sigma1, a, dof, pa, pb});
    else if (sigma0 < sigma1)
      xi = idrs::xi_less(idrs::AdversaryPair{sigma0, sigma1, a, dof, pa, pb});
    else
      xi = idrs::normal_cdf(idrs::normal_quantile(pb) + a / sigma0);
    double halfspace = idrs::normal_cdf(idrs::normal_quantile(pb) + a / sigma0);
    out << a << ',' << xi << ',' << halfspace << '\n';
  }
  return kExitOk;
}

int cmd_certify(const GlobalOptions& g, const std::string& dataset_path, const json& model_spec,
                const json& field_spec, double const_sigma, const std::string& method,
                const std::string& output, int jobs) {
  auto data = idrs::load_dataset(dataset_path);
  auto model = model_from_spec(model_spec);
  auto cfg = smoothing_from(g);
  auto search = search_from(g);

  std::vector<idrs::PointOutcome> outcomes;
  std::optional<idrs::SigmaField> field;
  if (method == "renyi") {
    // comparative divergence-based certificate; constant sigma only, and
    // never mixed with the Neyman-Pearson path
    if (!field_spec.is_null())
      throw std::runtime_error("--method renyi works with a constant sigma, not a field spec");
    outcomes = idrs::certify_dataset(*model, nullptr, const_sigma, data, cfg, search, jobs);
    for (auto& o : outcomes) {
      o.cert.method = idrs::CertMethod::Renyi;
      if (o.cert.predicted == idrs::kAbstain || o.cert.pa_lower <= o.cert.pb_upper) {
        o.cert.radius = 0.0;
        continue;
      }
      idrs::RenyiQuery q;
      q.sigma0 = q.sigma1 = const_sigma;
      q.dof = model->dim();
      q.pA = o.cert.pa_lower;
      q.pB = o.cert.pb_upper;
      o.cert.radius = idrs::renyi_certified_radius(q);
    }
  } else if (method != "np") {
    throw std::runtime_error("unknown --method '" + method + "' (np or renyi)");
  } else if (!field_spec.is_null()) {
    idrs::Dataset refs = field_spec.contains("references")
                             ? idrs::load_dataset(field_spec.at("references"))
                             : data;
    field = field_from_spec(field_spec, refs);
    outcomes = idrs::certify_dataset(*model, &*field, 0.0, data, cfg, search, jobs);
  } else {
    outcomes = idrs::certify_dataset(*model, nullptr, const_sigma, data, cfg, search, jobs);
  }

  auto out = open_output(output);
  json head{{"schema_version", 1}, {"kind", "idrs.certify"}, {"config", config_snapshot(cfg, search)}};
  head["config"]["model"] = model_spec;
  head["config"]["field"] = field_spec;
  head["config"]["dataset"] = dataset_path;
  head["config"]["jobs"] = jobs;
  out << head.dump() << '\n';
  for (const auto& o : outcomes) {
    json rec{{"index", o.index},
             {"label", o.label},
             {"predicted", o.cert.predicted},
             {"abstained", o.cert.predicted == idrs::kAbstain},
             {"pa_lower", o.cert.pa_lower},
             {"pb_upper", o.cert.pb_upper},
             {"sigma0", o.cert.sigma0},
             {"radius", o.cert.radius},
             {"method", o.cert.method == idrs::CertMethod::Idrs        ? "idrs"
                        : o.cert.method == idrs::CertMethod::Renyi ? "renyi"
                                                                   : "cohen-constant"},
             {"diagnostics",
              {{"clamp_hit", o.cert.diag.clamp_hit},
               {"approx_path_used", o.cert.diag.approx_path_used},
               {"unstable_points", o.cert.diag.unstable_points},
               {"grid_step", o.cert.diag.grid_step},
               {"notes", o.cert.diag.notes}}}};
    out << rec.dump() << '\n';
  }
  auto summary = idrs::summarize(outcomes, model->num_classes());
  json tail{{"kind", "summary"},
            {"count", summary.count},
            {"clean_accuracy", summary.clean_accuracy},
            {"abstention_rate", summary.abstention_rate},
            {"misclassification_rate", summary.misclassification_rate},
            {"classwise_accuracy_std", summary.classwise_accuracy_std}};
  out << tail.dump() << '\n';
  std::cerr << "certified " << outcomes.size() << " points -> " << output << '\n';
  return kExitOk;
}

int cmd_toy(const GlobalOptions& g, int dim, double const_sigma, double sigma_base, double rate,
            double radial_scale, double half_angle, int n_train, int n_test, int seeds,
            const std::string& out_dir, int jobs) {
  std::filesystem::create_directories(out_dir);
  idrs::ToyRunConfig cfg;
  cfg.dataset.dim = dim;
  cfg.dataset.radial_scale = radial_scale;
  cfg.dataset.cone_half_angle = half_angle;
  cfg.dataset.n_per_class = n_train;
  cfg.test_per_class = n_test;
  cfg.const_sigma = const_sigma;
  cfg.sigma_base = sigma_base;
  cfg.rate = rate;
  cfg.smoothing = smoothing_from(g);
  cfg.search = search_from(g);
  cfg.jobs = jobs;

  json summary = json::array();
  std::vector<double> grid;
  for (int i = 0; i <= 120; ++i) grid.push_back(0.05 * i);
  std::vector<double> curve_const(grid.size(), 0.0), curve_idrs(grid.size(), 0.0);

  for (int s = 0; s < seeds; ++s) {
    cfg.dataset.seed = g.effective_seed(1) + static_cast<std::uint64_t>(s);
    cfg.train.seed = cfg.dataset.seed ^ 0xBEEF;
    cfg.smoothing.seed = cfg.dataset.seed ^ 0xF00D;
    auto run = idrs::run_toy_comparison(cfg);
    auto cc = idrs::certified_accuracy_curve(run.constant_points, grid);
    auto ci = idrs::certified_accuracy_curve(run.idrs_points, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      curve_const[i] += cc[i].second / seeds;
      curve_idrs[i] += ci[i].second / seeds;
    }
    summary.push_back({{"seed", cfg.dataset.seed},
                       {"base_test_accuracy", run.base_test_accuracy},
                       {"mean_field_sigma", run.mean_field_sigma},
                       {"constant_ceiling", run.constant_ceiling},
                       {"constant",
                        {{"clean_accuracy", run.constant_summary.clean_accuracy},
                         {"abstention_rate", run.constant_summary.abstention_rate},
                         {"misclassification_rate", run.constant_summary.misclassification_rate},
                         {"classwise_accuracy_std", run.constant_summary.classwise_accuracy_std}}},
                       {"idrs",
                        {{"clean_accuracy", run.idrs_summary.clean_accuracy},
                         {"abstention_rate", run.idrs_summary.abstention_rate},
                         {"misclassification_rate", run.idrs_summary.misclassification_rate},
                         {"classwise_accuracy_std", run.idrs_summary.classwise_accuracy_std}}}});

    if (s == 0) {
      // per-point radii for the first seed
      auto points = open_output(out_dir + "/toy_points.jsonl");
      for (std::size_t i = 0; i < run.idrs_points.size(); ++i) {
        json rec{{"index", run.idrs_points[i].index},
                 {"label", run.idrs_points[i].label},
                 {"constant_radius", run.constant_points[i].cert.radius},
                 {"constant_predicted", run.constant_points[i].cert.predicted},
                 {"idrs_radius", run.idrs_points[i].cert.radius},
                 {"idrs_predicted", run.idrs_points[i].cert.predicted},
                 {"sigma0", run.idrs_points[i].cert.sigma0}};
        points << rec.dump() << '\n';
      }
      if (dim == 2) {
        // decision-boundary probe grid for external rendering
        auto probe = open_output(out_dir + "/toy_probe.csv");
        probe << "# schema=idrs.toy-probe.v1\nx,y,base_class\n";
        idrs::TinyMlp model = idrs::train_tiny_mlp(run.train_data.points, run.train_data.labels,
                                                   2, 2, cfg.train);
        for (double x = -6.0; x <= 6.0; x += 0.25)
          for (double y = -6.0; y <= 6.0; y += 0.25) {
            std::vector<double> p{x, y};
            probe << x << ',' << y << ',' << model.classify(p) << '\n';
          }
      }
    }
  }

  {
    auto curves = open_output(out_dir + "/toy_curves.csv");
    curves << "# schema=idrs.toy-curves.v1\nradius,constant_certified_accuracy,idrs_certified_accuracy\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      curves << grid[i] << ',' << curve_const[i] << ',' << curve_idrs[i] << '\n';
  }
  {
    auto sum = open_output(out_dir + "/toy_summary.json");
    json doc{{"schema_version", 1},
             {"kind", "idrs.toy"},
             {"config",
              {{"dim", dim},
               {"const_sigma", const_sigma},
               {"sigma_base", sigma_base},
               {"rate", rate},
               {"n_train_per_class", n_train},
               {"n_test_per_class", n_test},
               {"seeds", seeds},
               {"smoothing", config_snapshot(cfg.smoothing, cfg.search)}}},
             {"runs", summary}};
    sum << doc.dump(2) << '\n';
  }
  std::cerr << "toy experiment written to " << out_dir << '\n';
  return kExitOk;
}

int cmd_counterexample(double rate, const std::string& output) {
  auto rep = idrs::run_counterexample(rate);
  json doc{{"schema_version", 1},
           {"kind", "idrs.counterexample"},
           {"naive",
            {{"sigma", rep.naive_sigma},
             {"claimed_radius", rep.naive_radius},
             {"violation_found", rep.naive_violation_found},
             {"violation_distance", rep.violation_distance}}},
           {"elastic",
            {{"sigma0", rep.idrs_sigma0},
             {"rate", rate},
             {"radius", rep.idrs_radius},
             {"sweep_clean", rep.idrs_sweep_clean}}},
           {"center_query", {{"class", rep.center_class}, {"radius", rep.center_radius}}}};
  if (!output.empty()) {
    auto out = open_output(output);
    out << doc.dump(2) << '\n';
  }
  std::cout << doc.dump(2) << '\n';
  return kExitOk;
}

int cmd_truncation(const GlobalOptions& g, double sigma, std::int64_t n, double alpha,
                   const std::string& output) {
  idrs::SmoothingConfig cfg = smoothing_from(g);
  cfg.n = n;
  cfg.alpha = alpha;
  std::vector<double> distances;
  for (int i = 0; i <= 240; ++i) distances.push_back(0.05 * i * sigma);
  auto curve = idrs::linear_truncation_curve(sigma, distances, cfg);
  auto out = open_output(output);
  out << "# schema=idrs.truncation.v1\n";
  out << "distance,pa_exact,radius,undercertification_ratio\n";
  for (auto& [d, r] : curve) {
    double pa = idrs::normal_cdf(d / sigma);
    double ratio = std::numeric_limits<double>::quiet_NaN();
    if (pa > 0.5 && pa < 1.0) ratio = r / (sigma * idrs::normal_quantile(pa));
    out << d << ',' << pa << ',' << r << ',' << ratio << '\n';
  }
  return kExitOk;
}

int cmd_train_toy(const GlobalOptions& g, const std::string& dataset_path, int dim, int n_train,
                  double augment, const std::string& output, const std::string& save_dataset) {
  idrs::Dataset data;
  if (!dataset_path.empty()) {
    data = idrs::load_dataset(dataset_path);
  } else {
    idrs::ConeDatasetSpec spec;
    spec.dim = dim;
    spec.n_per_class = n_train;
    spec.seed = g.effective_seed(1);
    data = idrs::generate_cone(spec).data;
  }
  if (!save_dataset.empty()) idrs::save_dataset(save_dataset, data);
  int num_classes = 1 + *std::max_element(data.labels.begin(), data.labels.end());
  idrs::MlpTrainConfig tc;
  tc.seed = g.effective_seed(1);
  tc.augment_sigma = augment;
  auto model = idrs::train_tiny_mlp(data.points, data.labels, data.dim, num_classes, tc);

  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (model.classify(data.point(i)) == data.labels[i]) ++correct;
  double acc = static_cast<double>(correct) / data.size();

  json doc{{"schema_version", 1},
           {"kind", "idrs.mlp"},
           {"layer_sizes", model.layer_sizes()},
           {"weights", model.weights()},
           {"biases", model.biases()},
           {"train_accuracy", acc}};
  auto out = open_output(output);
  out << doc.dump() << '\n';
  std::cerr << "trained model, clean accuracy " << acc << " -> " << output << '\n';
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified robustness for input-dependent randomized smoothing"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON config file; flags override its values");
  app.add_option("--seed", g.seed, "RNG seed (overrides config and IDRS_SEED)");
  app.add_option("--jobs", g.jobs, "worker threads (overrides config and IDRS_JOBS)");

  // thresholds
  auto* thresholds = app.add_subcommand("thresholds", "feasibility threshold table");
  std::vector<int> dims{784, 3072, 196608};
  std::vector<double> pas{0.9, 0.99, 0.999, 0.99993};
  std::string out_path = "thresholds.csv";
  thresholds->add_option("--dims", dims, "dimensions");
  thresholds->add_option("--pa", pas, "leading-class probabilities");
  thresholds->add_option("-o,--output", out_path, "output CSV");

  // xi-curves
  auto* xi = app.add_subcommand("xi-curves", "worst-case runner-up probability curves");
  double xo_s0 = 1.0, xo_s1 = 0.9, xo_pa = 0.99, xo_amax = 3.0;
  int xo_dof = 100, xo_steps = 200;
  std::string xi_out = "xi_curves.csv";
  xi->add_option("--sigma0", xo_s0);
  xi->add_option("--sigma1", xo_s1);
  xi->add_option("--dof", xo_dof);
  xi->add_option("--pa", xo_pa);
  xi->add_option("--a-max", xo_amax);
  xi->add_option("--steps", xo_steps);
  xi->add_option("-o,--output", xi_out);

  // certify
  auto* certify = app.add_subcommand("certify", "certify every point of a dataset");
  std::string cert_dataset, cert_model, cert_field, cert_out = "results.jsonl";
  int cert_jobs = 2;
  certify->add_option("--dataset", cert_dataset, "CSV dataset")->required();
  certify->add_option("--model", cert_model, "model spec JSON file")->required();
  certify->add_option("--field", cert_field, "field spec JSON file (omit for constant sigma)");
  certify->add_option("-o,--output", cert_out, "JSON-lines output");
  certify->add_option("--certify-jobs", cert_jobs, "worker threads");
  double cert_sigma = 0.5;
  certify->add_option("--sigma", cert_sigma, "constant sigma when no field spec is given");
  std::string cert_method = "np";
  certify->add_option("--method", cert_method, "np (default) or renyi (comparative only)");

  // toy
  auto* toy = app.add_subcommand("toy", "cone-dataset comparison of constant vs input-dependent");
  int toy_dim = 2, toy_train = 500, toy_test = 100, toy_seeds = 1, toy_jobs = 2;
  double toy_const = 0.5, toy_base = 0.4, toy_rate = 0.2;
  std::string toy_out = "toy_out";
  toy->add_option("--dim", toy_dim);
  toy->add_option("--const-sigma", toy_const);
  toy->add_option("--sigma-base", toy_base);
  toy->add_option("--rate", toy_rate);
  double toy_radial = 2.2, toy_angle = 0.3;
  toy->add_option("--radial-scale", toy_radial);
  toy->add_option("--half-angle", toy_angle);
  toy->add_option("--train-per-class", toy_train);
  toy->add_option("--test-per-class", toy_test);
  toy->add_option("--seeds", toy_seeds);
  toy->add_option("--toy-jobs", toy_jobs);
  toy->add_option("-o,--output-dir", toy_out);

  // counterexample
  auto* ce = app.add_subcommand("counterexample", "per-point noise maximization is unsound");
  double ce_rate = 0.05;
  std::string ce_out;
  ce->add_option("--rate", ce_rate, "elasticity budget for the honest certificate");
  ce->add_option("-o,--output", ce_out, "optional JSON report path");

  // truncation
  auto* trunc = app.add_subcommand("truncation", "finite-sample radius ceiling for a linear boundary");
  double tr_sigma = 1.0, tr_alpha = 0.001;
  std::int64_t tr_n = 100000;
  std::string tr_out = "truncation.csv";
  trunc->add_option("--sigma", tr_sigma);
  trunc->add_option("--n", tr_n);
  trunc->add_option("--alpha", tr_alpha);
  trunc->add_option("-o,--output", tr_out);

  // train-toy
  auto* train = app.add_subcommand("train-toy", "train the toy network");
  std::string train_dataset, train_out = "model.json";
  int train_dim = 2, train_n = 500;
  double train_aug = 0.0;
  train->add_option("--dataset", train_dataset, "CSV dataset (generated when omitted)");
  train->add_option("--dim", train_dim);
  train->add_option("--n-per-class", train_n);
  train->add_option("--augment", train_aug, "augmentation noise std");
  train->add_option("-o,--output", train_out);
  std::string train_save;
  train->add_option("--save-dataset", train_save, "also write the training data as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage; // help/version are not errors
  }

  try {
    g.load();
    if (thresholds->parsed()) return cmd_thresholds(dims, pas, out_path);
    if (xi->parsed()) return cmd_xi_curves(xo_s0, xo_s1, xo_dof, xo_pa, xo_amax, xo_steps, xi_out);
    if (certify->parsed()) {
      json model_spec, field_spec;
      {
        std::ifstream in(cert_model);
        if (!in) throw std::runtime_error("cannot open model spec " + cert_model);
        in >> model_spec;
      }
      if (!cert_field.empty()) {
        std::ifstream in(cert_field);
        if (!in) throw std::runtime_error("cannot open field spec " + cert_field);
        in >> field_spec;
      }
      return cmd_certify(g, cert_dataset, model_spec, field_spec, cert_sigma, cert_method,
                         cert_out, g.effective_jobs(cert_jobs));
    }
    if (toy->parsed())
      return cmd_toy(g, toy_dim, toy_const, toy_base, toy_rate, toy_radial, toy_angle, toy_train,
                     toy_test, toy_seeds, toy_out, g.effective_jobs(toy_jobs));
    if (ce->parsed()) return cmd_counterexample(ce_rate, ce_out);
    if (trunc->parsed()) return cmd_truncation(g, tr_sigma, tr_n, tr_alpha, tr_out);
    if (train->parsed())
      return cmd_train_toy(g, train_dataset, train_dim, train_n, train_aug, train_out, train_save);
  } catch (const idrs::UnstableRegimeError& e) {
    std::cerr << "numerical instability: " << e.what() << '\n';
    return kExitUnstable;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}
