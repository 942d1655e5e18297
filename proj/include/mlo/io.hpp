// File formats.  All text outputs are UTF-8 CSV (or JSON) with LF line
// endings and doubles printed with 17 significant digits, so a write/read
// round trip reproduces every value exactly.
//
// Chain CSV columns: iteration (1-based), theta_0..theta_{p-1}, accepted,
// subsample_size.  The binary chain dump is a fixed little-endian layout for
// large runs (magic "MLOCHAIN", u64 N, u64 p, N*p draw doubles, N accept
// bytes, N u64 sizes).
//
// Summary CSV columns: parameter, mean, sd, hpd_lo, hpd_hi.
// Report CSV columns: parameter, bias, sd, mse.
// Weights CSV columns: index, eta.

#pragma once

#include <string>
#include <vector>

#include "mlo/data.hpp"
#include "mlo/diagnostics.hpp"
#include "mlo/samplers.hpp"
#include "mlo/weights.hpp"

namespace mlo {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonBinaryLabel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest exact decimal form of a double (17 significant digits).
std::string format_double(double v);

void write_chain_csv(const std::string& path, const ChainRun& run);
ChainRun read_chain_csv(const std::string& path);

void write_chain_binary(const std::string& path, const ChainRun& run);
ChainRun read_chain_binary(const std::string& path);

void write_weights_csv(const std::string& path, const SubsampleWeights& weights);

// Parameter rows are labeled theta_0..theta_{p-1} unless names are given.
void write_summary_csv(const std::string& path, const PosteriorSummary& summary,
                       const std::vector<std::string>& names = {});
void write_report_csv(const std::string& path, const ReplicationReport& report,
                      const std::vector<std::string>& names = {});
std::string summary_to_json(const PosteriorSummary& summary,
                            const std::vector<std::string>& names = {});
std::string report_to_json(const ReplicationReport& report,
                           const std::vector<std::string>& names = {});

// Loads a headered CSV into rows of [covariates..., label].  The label column
// must hold only 0/1 values (NonBinaryLabel otherwise).  With standardize,
// each covariate column is centered to mean 0 and scaled to sample SD 1
// (constant columns are centered only).  With add_intercept a constant-1
// column is appended after the covariates, before the label.  Parse failures
// report the offending row and column.
DataMatrix load_csv_dataset(const std::string& path,
                            const std::string& label_column,
                            const std::vector<std::string>& covariate_columns,
                            bool standardize, bool add_intercept);

}  // namespace mlo
