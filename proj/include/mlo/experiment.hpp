// Config-driven experiment harness: synthetic data generation, method arms
// over (model, r, seed) grids, replication metrics, and bundle output.
//
// Seed protocol (documented so runs are reproducible bit-for-bit):
//   data seed for replication b:   derive_seed(base_seed, b, 0xDA7A)
//   chain seed for (b, arm a):     derive_seed(base_seed, b, a)
// Replications may execute concurrently; each owns its RNGs and result slot,
// and aggregation folds in index order, so the output is identical for any
// thread count.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mlo/data.hpp"
#include "mlo/diagnostics.hpp"
#include "mlo/models.hpp"
#include "mlo/samplers.hpp"

namespace mlo {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- data sources ---------------------------------------------------------

struct SyntheticGaussianMean {
  std::size_t n = 1000;
  double mu_true = 1.0;
};

struct SyntheticGaussianPrecision {
  std::size_t n = 1000;
  double tau_true = 1.0;
};

struct SyntheticLogistic {
  std::size_t n = 1000;
  ParamVector theta_true;
  bool with_intercept = false;
};

struct CsvSource {
  std::string path;
  std::string label_column;
  std::vector<std::string> covariate_columns;
  bool standardize = false;
  bool add_intercept = false;
};

using DataSource = std::variant<SyntheticGaussianMean, SyntheticGaussianPrecision,
                                SyntheticLogistic, CsvSource>;

// i.i.d. N(mu_true, 1) observations.
DataMatrix generate_gaussian_mean_data(std::size_t n, double mu_true,
                                       std::uint64_t seed);

// i.i.d. N(0, 1/tau_true) observations (tau is the precision).
DataMatrix generate_gaussian_precision_data(std::size_t n, double tau_true,
                                            std::uint64_t seed);

// Standard-normal covariates, Bernoulli labels through the logistic link.
// With with_intercept, theta_true[0] is the intercept and the row carries
// one fewer covariate than theta has coordinates.  Row layout matches the
// logistic model: covariates then label.
DataMatrix generate_logistic_data(std::size_t n, std::span<const double> theta_true,
                                  bool with_intercept, std::uint64_t seed);

// --- experiment configuration ---------------------------------------------

struct ModelConfig {
  std::string kind;  // gaussian_mean | gaussian_precision | logistic
  double prior_mean = 0.0;
  double prior_sd = 3.0;
  double gamma_shape = 0.01;
  double gamma_rate = 0.01;
  bool with_intercept = false;
};

enum class Method { kFull, kMlo, kUniform, kAdaptive };

struct ArmConfig {
  std::string name;
  std::string group;  // column label in the MSE matrix; defaults to name
  Method method = Method::kFull;
  std::size_t r = 100;       // fixed size (mlo/uniform); pilot size (adaptive)
  std::size_t r_max = 5000;  // adaptive cap
  double delta = 0.05;       // adaptive coverage level
  std::optional<ParamVector> weights_at;  // mlo: weights at a fixed theta
};

struct ChainSettings {
  std::size_t iterations = 3000;
  std::size_t burn = 1000;
  std::size_t thin = 1;
  double proposal_scale = 1.0;
  std::optional<ParamVector> init;  // default: MLE
};

struct ExperimentConfig {
  ModelConfig model;
  DataSource data;
  std::vector<ArmConfig> arms;
  ChainSettings chain;
  std::size_t replications = 1;
  std::uint64_t base_seed = 0;
  std::string output_dir = "out";
  bool save_chains = false;
};

ExperimentConfig parse_experiment_config_text(const std::string& json_text);
ExperimentConfig parse_experiment_config(const std::string& path);

// --- results ---------------------------------------------------------------

struct ArmResult {
  ArmConfig arm;
  Matrix estimates;                         // B x p, report scale
  std::vector<PosteriorSummary> summaries;  // one per successful replication
  std::optional<ReplicationReport> report;  // only when the truth is known
  double mean_subsample_fraction = 0.0;
  double median_subsample_fraction = 0.0;
  std::vector<std::string> errors;  // per-replication failures, "" when ok
  std::size_t failures = 0;
  std::vector<ChainRun> chains;  // populated only with save_chains
};

struct ResultBundle {
  ExperimentConfig config;
  std::optional<ParamVector> truth;  // report scale; synthetic sources only
  std::vector<ArmResult> arms;
  std::string manifest_json;
};

// Runs all replications and arms.  Per-arm failures are recorded, not fatal.
ResultBundle run_experiment(const ExperimentConfig& cfg);

// Writes the bundle under cfg.output_dir (or `dir` when given): manifest,
// per-arm estimates/report/summaries/subsample stats, and the MSE matrix
// when the arm grid spans several subsample sizes.
void write_bundle(const ResultBundle& bundle, const std::string& dir);

// Long-form MSE curve: one "arm,r,mse_sum" row per arm, full-data arms
// reported at r = n.  Requires at least two distinct subsample sizes.
void emit_mse_curve(const ResultBundle& bundle, const std::string& path);

// FNV-1a hash of the canonical config serialization; stamped into manifests.
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace mlo
