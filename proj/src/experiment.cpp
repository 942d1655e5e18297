#include "mlo/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "mlo/estimators.hpp"
#include "mlo/io.hpp"
#include "mlo/proposal.hpp"
#include "mlo/rng.hpp"
#include "mlo/weights.hpp"

namespace mlo {

namespace {

constexpr std::uint64_t kDataTag = 0xDA7A;
using json = nlohmann::ordered_json;

}  // namespace

// --- data generators --------------------------------------------------------

DataMatrix generate_gaussian_mean_data(std::size_t n, double mu_true,
                                       std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("generate_gaussian_mean_data: n >= 1");
  Rng rng(seed);
  DataMatrix data(1);
  data.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = mu_true + rng.normal();
    data.append_row(std::span<const double>(&x, 1));
  }
  return data;
}

DataMatrix generate_gaussian_precision_data(std::size_t n, double tau_true,
                                            std::uint64_t seed) {
  if (n == 0 || tau_true <= 0.0)
    throw std::invalid_argument("generate_gaussian_precision_data: bad arguments");
  Rng rng(seed);
  const double sd = 1.0 / std::sqrt(tau_true);
  DataMatrix data(1);
  data.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = sd * rng.normal();
    data.append_row(std::span<const double>(&x, 1));
  }
  return data;
}

DataMatrix generate_logistic_data(std::size_t n, std::span<const double> theta_true,
                                  bool with_intercept, std::uint64_t seed) {
  if (n == 0 || theta_true.empty())
    throw std::invalid_argument("generate_logistic_data: bad arguments");
  const std::size_t ncov = theta_true.size() - (with_intercept ? 1 : 0);
  if (ncov == 0)
    throw std::invalid_argument("generate_logistic_data: needs >= 1 covariate");
  Rng rng(seed);
  DataMatrix data(ncov + 1);
  data.reserve(n);
  std::vector<double> row(ncov + 1);
  for (std::size_t i = 0; i < n; ++i) {
    double lin = with_intercept ? theta_true[0] : 0.0;
    const std::size_t off = with_intercept ? 1 : 0;
    for (std::size_t j = 0; j < ncov; ++j) {
      row[j] = rng.normal();
      lin += row[j] * theta_true[j + off];
    }
    const double gamma = 1.0 / (1.0 + std::exp(-lin));
    row[ncov] = rng.uniform() < gamma ? 1.0 : 0.0;
    data.append_row(row);
  }
  return data;
}

// --- config parsing ---------------------------------------------------------

namespace {

template <class T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

ParamVector get_vector(const json& j, const std::string& key) {
  ParamVector v;
  for (const auto& e : j.at(key)) v.push_back(e.get<double>());
  return v;
}

Method parse_method(const std::string& s) {
  if (s == "full") return Method::kFull;
  if (s == "mlo") return Method::kMlo;
  if (s == "uniform") return Method::kUniform;
  if (s == "adaptive") return Method::kAdaptive;
  throw ConfigError("unknown arm method: " + s);
}

std::string method_name(Method m) {
  switch (m) {
    case Method::kFull: return "full";
    case Method::kMlo: return "mlo";
    case Method::kUniform: return "uniform";
    case Method::kAdaptive: return "adaptive";
  }
  return "?";
}

DataSource parse_data_source(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian_mean") {
    SyntheticGaussianMean s;
    s.n = j.at("n").get<std::size_t>();
    s.mu_true = get_or(j, "mu_true", 1.0);
    return s;
  }
  if (kind == "gaussian_precision") {
    SyntheticGaussianPrecision s;
    s.n = j.at("n").get<std::size_t>();
    s.tau_true = get_or(j, "tau_true", 1.0);
    return s;
  }
  if (kind == "logistic") {
    SyntheticLogistic s;
    s.n = j.at("n").get<std::size_t>();
    s.theta_true = get_vector(j, "theta_true");
    s.with_intercept = get_or(j, "with_intercept", false);
    return s;
  }
  if (kind == "csv") {
    CsvSource s;
    s.path = j.at("path").get<std::string>();
    s.label_column = j.at("label_column").get<std::string>();
    for (const auto& c : j.at("covariate_columns"))
      s.covariate_columns.push_back(c.get<std::string>());
    s.standardize = get_or(j, "standardize", false);
    s.add_intercept = get_or(j, "add_intercept", false);
    return s;
  }
  throw ConfigError("unknown data kind: " + kind);
}

}  // namespace

ExperimentConfig parse_experiment_config_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    ExperimentConfig cfg;
    const json& jm = j.at("model");
    cfg.model.kind = jm.at("kind").get<std::string>();
    cfg.model.prior_mean = get_or(jm, "prior_mean", 0.0);
    cfg.model.prior_sd = get_or(jm, "prior_sd", 3.0);
    cfg.model.gamma_shape = get_or(jm, "gamma_shape", 0.01);
    cfg.model.gamma_rate = get_or(jm, "gamma_rate", 0.01);
    cfg.model.with_intercept = get_or(jm, "with_intercept", false);
    if (cfg.model.kind != "gaussian_mean" && cfg.model.kind != "gaussian_precision" &&
        cfg.model.kind != "logistic")
      throw ConfigError("unknown model kind: " + cfg.model.kind);

    cfg.data = parse_data_source(j.at("data"));

    if (j.contains("chain")) {
      const json& jc = j.at("chain");
      cfg.chain.iterations = get_or<std::size_t>(jc, "iterations", 3000);
      cfg.chain.burn = get_or<std::size_t>(jc, "burn", 1000);
      cfg.chain.thin = get_or<std::size_t>(jc, "thin", 1);
      cfg.chain.proposal_scale = get_or(jc, "proposal_scale", 1.0);
      if (jc.contains("init")) cfg.chain.init = get_vector(jc, "init");
    }

    for (const auto& ja : j.at("arms")) {
      ArmConfig arm;
      arm.method = parse_method(ja.at("method").get<std::string>());
      arm.name = get_or<std::string>(ja, "name", method_name(arm.method));
      arm.r = get_or<std::size_t>(ja, "r", 100);
      arm.r_max = get_or<std::size_t>(ja, "r_max", 5000);
      arm.delta = get_or(ja, "delta", 0.05);
      if (ja.contains("weights_at")) arm.weights_at = get_vector(ja, "weights_at");
      arm.group = get_or<std::string>(ja, "group", arm.name);
      cfg.arms.push_back(std::move(arm));
    }
    if (cfg.arms.empty()) throw ConfigError("config needs at least one arm");

    cfg.replications = get_or<std::size_t>(j, "replications", 1);
    if (cfg.replications == 0) throw ConfigError("replications must be >= 1");
    cfg.base_seed = get_or<std::uint64_t>(j, "base_seed", 0);
    cfg.output_dir = get_or<std::string>(j, "output_dir", "out");
    cfg.save_chains = get_or(j, "save_chains", false);
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
}

ExperimentConfig parse_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config_text(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["model"] = {{"kind", cfg.model.kind},
                {"prior_mean", cfg.model.prior_mean},
                {"prior_sd", cfg.model.prior_sd},
                {"gamma_shape", cfg.model.gamma_shape},
                {"gamma_rate", cfg.model.gamma_rate},
                {"with_intercept", cfg.model.with_intercept}};
  std::visit(
      [&](const auto& src) {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, SyntheticGaussianMean>) {
          j["data"] = {{"kind", "gaussian_mean"}, {"n", src.n}, {"mu_true", src.mu_true}};
        } else if constexpr (std::is_same_v<T, SyntheticGaussianPrecision>) {
          j["data"] = {{"kind", "gaussian_precision"}, {"n", src.n}, {"tau_true", src.tau_true}};
        } else if constexpr (std::is_same_v<T, SyntheticLogistic>) {
          j["data"] = {{"kind", "logistic"},
                       {"n", src.n},
                       {"theta_true", src.theta_true},
                       {"with_intercept", src.with_intercept}};
        } else {
          j["data"] = {{"kind", "csv"},
                       {"path", src.path},
                       {"label_column", src.label_column},
                       {"covariate_columns", src.covariate_columns},
                       {"standardize", src.standardize},
                       {"add_intercept", src.add_intercept}};
        }
      },
      cfg.data);
  j["chain"] = {{"iterations", cfg.chain.iterations},
                {"burn", cfg.chain.burn},
                {"thin", cfg.chain.thin},
                {"proposal_scale", cfg.chain.proposal_scale}};
  if (cfg.chain.init) j["chain"]["init"] = *cfg.chain.init;
  j["arms"] = json::array();
  for (const auto& arm : cfg.arms) {
    json ja = {{"name", arm.name},
               {"group", arm.group},
               {"method", method_name(arm.method)},
               {"r", arm.r},
               {"r_max", arm.r_max},
               {"delta", arm.delta}};
    if (arm.weights_at) ja["weights_at"] = *arm.weights_at;
    j["arms"].push_back(std::move(ja));
  }
  j["replications"] = cfg.replications;
  j["base_seed"] = cfg.base_seed;
  j["output_dir"] = cfg.output_dir;
  j["save_chains"] = cfg.save_chains;
  return j.dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string s = config_to_json(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// --- orchestration ----------------------------------------------------------

namespace {

std::unique_ptr<Model> build_model(const ModelConfig& mc, std::size_t data_arity) {
  if (mc.kind == "gaussian_mean") {
    if (data_arity != 1) throw ConfigError("gaussian_mean expects arity-1 rows");
    return gaussian_mean_model(mc.prior_mean, mc.prior_sd);
  }
  if (mc.kind == "gaussian_precision") {
    if (data_arity != 1) throw ConfigError("gaussian_precision expects arity-1 rows");
    return gaussian_precision_model(mc.gamma_shape, mc.gamma_rate);
  }
  if (data_arity < 2) throw ConfigError("logistic expects covariates plus label");
  return logistic_model(data_arity - 1, mc.prior_sd, mc.with_intercept);
}

std::optional<ParamVector> truth_of(const DataSource& src) {
  if (const auto* g = std::get_if<SyntheticGaussianMean>(&src))
    return ParamVector{g->mu_true};
  if (const auto* g = std::get_if<SyntheticGaussianPrecision>(&src))
    return ParamVector{g->tau_true};
  if (const auto* g = std::get_if<SyntheticLogistic>(&src)) return g->theta_true;
  return std::nullopt;
}

DataMatrix make_data(const DataSource& src, std::uint64_t seed,
                     const DataMatrix* fixed) {
  if (fixed) return *fixed;  // CSV data, shared across replications
  if (const auto* g = std::get_if<SyntheticGaussianMean>(&src))
    return generate_gaussian_mean_data(g->n, g->mu_true, seed);
  if (const auto* g = std::get_if<SyntheticGaussianPrecision>(&src))
    return generate_gaussian_precision_data(g->n, g->tau_true, seed);
  const auto& g = std::get<SyntheticLogistic>(src);
  return generate_logistic_data(g.n, g.theta_true, g.with_intercept, seed);
}

struct RepArmOut {
  ParamVector estimate;
  PosteriorSummary summary;
  double mean_frac = 0.0;
  double median_frac = 0.0;
  std::string error;
  ChainRun chain;  // populated only when save_chains
};

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

RepArmOut run_one_arm(const Model& model, const DataMatrix& data,
                      const ExperimentConfig& cfg, const ArmConfig& arm,
                      const ParamVector& theta_hat, std::uint64_t chain_seed,
                      bool keep_chain) {
  RepArmOut out;
  const ProposalSpec proposal(model.param_dim(), cfg.chain.proposal_scale);

  ChainConfig ccfg;
  ccfg.num_iters = cfg.chain.iterations;
  ccfg.init_theta = cfg.chain.init ? *cfg.chain.init : theta_hat;
  ccfg.seed = chain_seed;
  ccfg.subsample_r = arm.r;
  ccfg.size_rule = make_size_rule(arm.delta, arm.r_max);

  ChainRun run;
  switch (arm.method) {
    case Method::kFull:
      run = standard_mh(model, data, proposal, ccfg);
      break;
    case Method::kUniform:
      run = uniform_subsampled_mh(model, data, proposal, ccfg);
      break;
    case Method::kMlo: {
      const SubsampleWeights w = mlo_weights(
          model, data, arm.weights_at ? *arm.weights_at : theta_hat);
      run = mlo_subsampled_mh(model, data, proposal, w, ccfg);
      break;
    }
    case Method::kAdaptive: {
      const SubsampleWeights w = mlo_weights(
          model, data, arm.weights_at ? *arm.weights_at : theta_hat);
      run = adaptive_mlo_mh(model, data, proposal, w, ccfg);
      break;
    }
  }

  const double n = static_cast<double>(data.size());
  std::vector<double> fracs(run.num_iters());
  for (std::size_t k = 0; k < run.num_iters(); ++k)
    fracs[k] = static_cast<double>(run.subsample_sizes[k]) / n;
  out.mean_frac = 0.0;
  for (double f : fracs) out.mean_frac += f;
  out.mean_frac /= static_cast<double>(fracs.size());
  out.median_frac = median_of(fracs);

  const Matrix kept = burn_thin(run, cfg.chain.burn, cfg.chain.thin);
  const Matrix reported = transform_draws(model, kept);
  out.summary = posterior_summary(reported, 0.05);
  out.estimate = out.summary.mean;
  if (keep_chain) out.chain = std::move(run);
  return out;
}

}  // namespace

ResultBundle run_experiment(const ExperimentConfig& cfg) {
  const std::size_t B = cfg.replications;
  const std::size_t A = cfg.arms.size();

  // CSV data is fixed across replications; synthetic data is fresh per rep.
  std::unique_ptr<DataMatrix> fixed;
  if (const auto* csv = std::get_if<CsvSource>(&cfg.data))
    fixed = std::make_unique<DataMatrix>(
        load_csv_dataset(csv->path, csv->label_column, csv->covariate_columns,
                         csv->standardize, csv->add_intercept));

  std::vector<std::vector<RepArmOut>> cells(B, std::vector<RepArmOut>(A));

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t bs = 0; bs < static_cast<std::ptrdiff_t>(B); ++bs) {
    const std::size_t b = static_cast<std::size_t>(bs);
    try {
      const DataMatrix data =
          make_data(cfg.data, derive_seed(cfg.base_seed, b, kDataTag), fixed.get());
      const std::unique_ptr<Model> model = build_model(cfg.model, data.arity());
      const ParamVector theta_hat = model->mle(data);
      for (std::size_t a = 0; a < A; ++a) {
        try {
          cells[b][a] = run_one_arm(*model, data, cfg, cfg.arms[a], theta_hat,
                                    derive_seed(cfg.base_seed, b, a),
                                    cfg.save_chains);
        } catch (const std::exception& e) {
          cells[b][a].error = e.what();
        }
      }
    } catch (const std::exception& e) {
      for (std::size_t a = 0; a < A; ++a) cells[b][a].error = e.what();
    }
  }

  ResultBundle bundle;
  bundle.config = cfg;
  bundle.truth = truth_of(cfg.data);

  for (std::size_t a = 0; a < A; ++a) {
    ArmResult res;
    res.arm = cfg.arms[a];
    std::vector<double> means, medians;
    std::vector<RepArmOut*> ok;
    res.errors.resize(B);
    for (std::size_t b = 0; b < B; ++b) {
      res.errors[b] = cells[b][a].error;
      if (cells[b][a].error.empty()) {
        ok.push_back(&cells[b][a]);
        means.push_back(cells[b][a].mean_frac);
        medians.push_back(cells[b][a].median_frac);
      } else {
        ++res.failures;
      }
    }
    const std::size_t p = ok.empty() ? 0 : ok.front()->estimate.size();
    res.estimates = Matrix(ok.size(), p);
    for (std::size_t i = 0; i < ok.size(); ++i) {
      for (std::size_t j = 0; j < p; ++j)
        res.estimates.at(i, j) = ok[i]->estimate[j];
      res.summaries.push_back(ok[i]->summary);
      if (cfg.save_chains) res.chains.push_back(std::move(ok[i]->chain));
    }
    if (!means.empty()) {
      res.mean_subsample_fraction = 0.0;
      for (double v : means) res.mean_subsample_fraction += v;
      res.mean_subsample_fraction /= static_cast<double>(means.size());
      res.median_subsample_fraction = median_of(medians);
    }
    if (bundle.truth && ok.size() >= 2 && p == bundle.truth->size())
      res.report = replication_metrics(res.estimates, *bundle.truth);
    bundle.arms.push_back(std::move(res));
  }

  // Manifest: everything needed to reproduce the run bit-for-bit.
  {
    json m;
    m["config"] = json::parse(config_to_json(cfg));
    char hashbuf[19];
    std::snprintf(hashbuf, sizeof(hashbuf), "0x%016llx",
                  static_cast<unsigned long long>(config_hash(cfg)));
    m["config_hash"] = hashbuf;
    m["seed_protocol"] = {
        {"data", "derive_seed(base_seed, rep, 0xDA7A)"},
        {"chain", "derive_seed(base_seed, rep, arm_index)"}};
    json data_seeds = json::array();
    json chain_seeds = json::array();
    for (std::size_t b = 0; b < B; ++b) {
      data_seeds.push_back(derive_seed(cfg.base_seed, b, kDataTag));
      json row = json::array();
      for (std::size_t a = 0; a < A; ++a)
        row.push_back(derive_seed(cfg.base_seed, b, a));
      chain_seeds.push_back(std::move(row));
    }
    m["data_seeds"] = std::move(data_seeds);
    m["chain_seeds"] = std::move(chain_seeds);
    m["version"] = "mlomc 1.0.0";
    bundle.manifest_json = m.dump(2);
  }
  return bundle;
}

// --- bundle output ----------------------------------------------------------

namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

std::size_t data_n(const ExperimentConfig& cfg, const ResultBundle& bundle) {
  if (const auto* g = std::get_if<SyntheticGaussianMean>(&cfg.data)) return g->n;
  if (const auto* g = std::get_if<SyntheticGaussianPrecision>(&cfg.data)) return g->n;
  if (const auto* g = std::get_if<SyntheticLogistic>(&cfg.data)) return g->n;
  // CSV: recover n from any successful arm's subsample stats is not possible;
  // reload is wasteful, so record 0 ("unknown") in arms.csv for CSV sources.
  (void)bundle;
  return 0;
}

double mse_sum_of(const ArmResult& arm) {
  double s = 0.0;
  for (double v : arm.report->mse) s += v;
  return s;
}

}  // namespace

void write_bundle(const ResultBundle& bundle, const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root);

  write_text(root / "manifest.json", bundle.manifest_json);
  write_text(root / "config.json", config_to_json(bundle.config));

  // Arm index: one row per arm with grid coordinates and headline stats.
  {
    std::ostringstream out;
    out << "name,group,method,r,r_max,delta,n,replications,failures,"
           "mean_subsample_fraction,median_subsample_fraction,mse_sum\n";
    const std::size_t n = data_n(bundle.config, bundle);
    for (const auto& arm : bundle.arms) {
      out << arm.arm.name << ',' << arm.arm.group << ','
          << method_name(arm.arm.method) << ',' << arm.arm.r << ','
          << arm.arm.r_max << ',' << format_double(arm.arm.delta) << ',' << n
          << ',' << bundle.config.replications << ',' << arm.failures << ','
          << format_double(arm.mean_subsample_fraction) << ','
          << format_double(arm.median_subsample_fraction) << ',';
      if (arm.report) out << format_double(mse_sum_of(arm));
      out << '\n';
    }
    write_text(root / "arms.csv", out.str());
  }

  for (const auto& arm : bundle.arms) {
    const fs::path adir = root / ("arm_" + arm.arm.name);
    fs::create_directories(adir);

    {
      std::ostringstream out;
      const std::size_t p = arm.estimates.cols;
      out << "replication";
      for (std::size_t j = 0; j < p; ++j) out << ",theta_" << j;
      out << '\n';
      for (std::size_t b = 0; b < arm.estimates.rows; ++b) {
        out << b;
        for (std::size_t j = 0; j < p; ++j)
          out << ',' << format_double(arm.estimates.at(b, j));
        out << '\n';
      }
      write_text(adir / "estimates.csv", out.str());
    }

    if (arm.report) {
      write_report_csv((adir / "replication_report.csv").string(), *arm.report);
      write_text(adir / "replication_report.json", report_to_json(*arm.report));
    }

    {
      std::ostringstream out;
      out << "replication,parameter,mean,sd,hpd_lo,hpd_hi\n";
      for (std::size_t b = 0; b < arm.summaries.size(); ++b) {
        const auto& s = arm.summaries[b];
        for (std::size_t j = 0; j < s.mean.size(); ++j)
          out << b << ",theta_" << j << ',' << format_double(s.mean[j]) << ','
              << format_double(s.sd[j]) << ',' << format_double(s.hpd_lo[j])
              << ',' << format_double(s.hpd_hi[j]) << '\n';
      }
      write_text(adir / "posterior_summaries.csv", out.str());
    }

    {
      std::ostringstream out;
      out << "mean_fraction,median_fraction,failures\n"
          << format_double(arm.mean_subsample_fraction) << ','
          << format_double(arm.median_subsample_fraction) << ',' << arm.failures
          << '\n';
      write_text(adir / "subsample_stats.csv", out.str());
    }

    if (arm.failures > 0) {
      std::ostringstream out;
      out << "replication,error\n";
      for (std::size_t b = 0; b < arm.errors.size(); ++b)
        if (!arm.errors[b].empty()) out << b << ",\"" << arm.errors[b] << "\"\n";
      write_text(adir / "errors.csv", out.str());
    }

    if (!arm.chains.empty()) {
      const fs::path cdir = adir / "chains";
      fs::create_directories(cdir);
      for (std::size_t b = 0; b < arm.chains.size(); ++b) {
        write_chain_csv((cdir / ("rep_" + std::to_string(b) + ".csv")).string(),
                        arm.chains[b]);
        write_chain_binary((cdir / ("rep_" + std::to_string(b) + ".bin")).string(),
                           arm.chains[b]);
      }
    }
  }

  // MSE matrix in the usual table layout (rows = subsample size, columns =
  // arm groups) when the truth is known and subsampled arms exist.
  if (bundle.truth) {
    std::vector<std::string> groups;
    std::vector<std::size_t> sizes;
    std::map<std::pair<std::string, std::size_t>, double> cell;
    for (const auto& arm : bundle.arms) {
      if (arm.arm.method == Method::kFull || !arm.report) continue;
      if (std::find(groups.begin(), groups.end(), arm.arm.group) == groups.end())
        groups.push_back(arm.arm.group);
      if (std::find(sizes.begin(), sizes.end(), arm.arm.r) == sizes.end())
        sizes.push_back(arm.arm.r);
      cell[{arm.arm.group, arm.arm.r}] = mse_sum_of(arm);
    }
    if (!groups.empty()) {
      std::sort(sizes.begin(), sizes.end());
      std::ostringstream out;
      out << "r";
      for (const auto& g : groups) out << ',' << g;
      out << '\n';
      for (std::size_t r : sizes) {
        out << r;
        for (const auto& g : groups) {
          out << ',';
          const auto it = cell.find({g, r});
          if (it != cell.end()) out << format_double(it->second);
        }
        out << '\n';
      }
      write_text(root / "mse_matrix.csv", out.str());
    }
  }
}

void emit_mse_curve(const ResultBundle& bundle, const std::string& path) {
  struct Row {
    std::string name;
    std::size_t r;
    double mse_sum;
  };
  std::vector<Row> rows;
  std::size_t distinct = 0;
  {
    std::vector<std::size_t> seen;
    const std::size_t n = data_n(bundle.config, bundle);
    for (const auto& arm : bundle.arms) {
      if (!arm.report) continue;
      const std::size_t r = arm.arm.method == Method::kFull ? n : arm.arm.r;
      rows.push_back({arm.arm.name, r, mse_sum_of(arm)});
      if (std::find(seen.begin(), seen.end(), r) == seen.end()) seen.push_back(r);
    }
    distinct = seen.size();
  }
  if (distinct < 2)
    throw std::invalid_argument(
        "emit_mse_curve: need at least two distinct subsample sizes");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "arm,r,mse_sum\n";
  for (const auto& row : rows)
    out << row.name << ',' << row.r << ',' << format_double(row.mse_sum) << '\n';
}

}  // namespace mlo
