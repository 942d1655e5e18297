#include "mlo/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mlo {

namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode = {}) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = {}) {
  std::ifstream in(path, mode);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim surrounding whitespace
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string()
                                         : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t row, const std::string& col) {
  double v = 0.0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw ParseError("CSV parse error at row " + std::to_string(row) +
                     ", column '" + col + "': '" + s + "'");
  return v;
}

const char* kChainMagic = "MLOCHAIN";

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_chain_csv(const std::string& path, const ChainRun& run) {
  auto out = open_out(path);
  out << "iteration";
  for (std::size_t j = 0; j < run.param_dim; ++j) out << ",theta_" << j;
  out << ",accepted,subsample_size\n";
  for (std::size_t k = 0; k < run.num_iters(); ++k) {
    out << (k + 1);
    for (std::size_t j = 0; j < run.param_dim; ++j)
      out << ',' << format_double(run.draws.at(k, j));
    out << ',' << static_cast<int>(run.accepted[k]) << ','
        << run.subsample_sizes[k] << '\n';
  }
}

ChainRun read_chain_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("chain CSV is empty: " + path);
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header.front() != "iteration")
    throw ParseError("chain CSV header malformed: " + path);
  const std::size_t p = header.size() - 3;

  ChainRun run;
  run.param_dim = p;
  std::vector<double> draws;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw ParseError("chain CSV row " + std::to_string(row) +
                       ": wrong field count");
    for (std::size_t j = 0; j < p; ++j)
      draws.push_back(parse_double(fields[1 + j], row, header[1 + j]));
    run.accepted.push_back(
        static_cast<std::uint8_t>(parse_double(fields[1 + p], row, "accepted")));
    run.subsample_sizes.push_back(static_cast<std::size_t>(
        parse_double(fields[2 + p], row, "subsample_size")));
  }
  run.draws.rows = run.accepted.size();
  run.draws.cols = p;
  run.draws.data = std::move(draws);
  return run;
}

void write_chain_binary(const std::string& path, const ChainRun& run) {
  auto out = open_out(path, std::ios::binary);
  out.write(kChainMagic, 8);
  const std::uint64_t n = run.num_iters();
  const std::uint64_t p = run.param_dim;
  out.write(reinterpret_cast<const char*>(&n), 8);
  out.write(reinterpret_cast<const char*>(&p), 8);
  out.write(reinterpret_cast<const char*>(run.draws.data.data()),
            static_cast<std::streamsize>(sizeof(double) * run.draws.data.size()));
  out.write(reinterpret_cast<const char*>(run.accepted.data()),
            static_cast<std::streamsize>(run.accepted.size()));
  for (std::size_t s : run.subsample_sizes) {
    const std::uint64_t v = s;
    out.write(reinterpret_cast<const char*>(&v), 8);
  }
}

ChainRun read_chain_binary(const std::string& path) {
  auto in = open_in(path, std::ios::binary);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kChainMagic, 8) != 0)
    throw ParseError("not a chain dump: " + path);
  std::uint64_t n = 0, p = 0;
  in.read(reinterpret_cast<char*>(&n), 8);
  in.read(reinterpret_cast<char*>(&p), 8);
  ChainRun run;
  run.param_dim = p;
  run.draws = Matrix(n, p);
  run.accepted.resize(n);
  run.subsample_sizes.resize(n);
  in.read(reinterpret_cast<char*>(run.draws.data.data()),
          static_cast<std::streamsize>(sizeof(double) * n * p));
  in.read(reinterpret_cast<char*>(run.accepted.data()),
          static_cast<std::streamsize>(n));
  for (std::size_t k = 0; k < n; ++k) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    run.subsample_sizes[k] = v;
  }
  if (!in) throw ParseError("truncated chain dump: " + path);
  return run;
}

void write_weights_csv(const std::string& path, const SubsampleWeights& weights) {
  auto out = open_out(path);
  out << "index,eta\n";
  for (std::size_t i = 0; i < weights.eta.size(); ++i)
    out << i << ',' << format_double(weights.eta[i]) << '\n';
}

namespace {

std::string param_name(const std::vector<std::string>& names, std::size_t j) {
  return j < names.size() ? names[j] : "theta_" + std::to_string(j);
}

}  // namespace

void write_summary_csv(const std::string& path, const PosteriorSummary& summary,
                       const std::vector<std::string>& names) {
  auto out = open_out(path);
  out << "parameter,mean,sd,hpd_lo,hpd_hi\n";
  for (std::size_t j = 0; j < summary.mean.size(); ++j)
    out << param_name(names, j) << ',' << format_double(summary.mean[j]) << ','
        << format_double(summary.sd[j]) << ',' << format_double(summary.hpd_lo[j])
        << ',' << format_double(summary.hpd_hi[j]) << '\n';
}

void write_report_csv(const std::string& path, const ReplicationReport& report,
                      const std::vector<std::string>& names) {
  auto out = open_out(path);
  out << "parameter,bias,sd,mse\n";
  for (std::size_t j = 0; j < report.bias.size(); ++j)
    out << param_name(names, j) << ',' << format_double(report.bias[j]) << ','
        << format_double(report.sd[j]) << ',' << format_double(report.mse[j])
        << '\n';
}

std::string summary_to_json(const PosteriorSummary& summary,
                            const std::vector<std::string>& names) {
  std::ostringstream out;
  out << "{\"alpha\":" << format_double(summary.alpha) << ",\"parameters\":[";
  for (std::size_t j = 0; j < summary.mean.size(); ++j) {
    if (j) out << ',';
    out << "{\"parameter\":\"" << param_name(names, j)
        << "\",\"mean\":" << format_double(summary.mean[j])
        << ",\"sd\":" << format_double(summary.sd[j])
        << ",\"hpd_lo\":" << format_double(summary.hpd_lo[j])
        << ",\"hpd_hi\":" << format_double(summary.hpd_hi[j]) << '}';
  }
  out << "]}";
  return out.str();
}

std::string report_to_json(const ReplicationReport& report,
                           const std::vector<std::string>& names) {
  std::ostringstream out;
  out << "{\"replications\":" << report.B << ",\"parameters\":[";
  for (std::size_t j = 0; j < report.bias.size(); ++j) {
    if (j) out << ',';
    out << "{\"parameter\":\"" << param_name(names, j)
        << "\",\"bias\":" << format_double(report.bias[j])
        << ",\"sd\":" << format_double(report.sd[j])
        << ",\"mse\":" << format_double(report.mse[j]) << '}';
  }
  out << "]}";
  return out.str();
}

DataMatrix load_csv_dataset(const std::string& path,
                            const std::string& label_column,
                            const std::vector<std::string>& covariate_columns,
                            bool standardize, bool add_intercept) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("dataset CSV is empty: " + path);
  const auto header = split_csv_line(line);

  auto column_of = [&](const std::string& name) {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (header[j] == name) return j;
    throw ParseError("column '" + name + "' not found in " + path);
  };

  std::vector<std::size_t> cov_idx;
  cov_idx.reserve(covariate_columns.size());
  for (const auto& name : covariate_columns) cov_idx.push_back(column_of(name));
  const std::size_t label_idx = column_of(label_column);

  const std::size_t ncov = cov_idx.size();
  std::vector<double> covs;  // row-major n x ncov
  std::vector<double> labels;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw ParseError("row " + std::to_string(row) + " of " + path +
                       ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(fields.size()));
    for (std::size_t j = 0; j < ncov; ++j)
      covs.push_back(parse_double(fields[cov_idx[j]], row, header[cov_idx[j]]));
    const double y = parse_double(fields[label_idx], row, label_column);
    if (y != 0.0 && y != 1.0)
      throw NonBinaryLabel("row " + std::to_string(row) + " of " + path +
                           ": label must be 0 or 1, got " + format_double(y));
    labels.push_back(y);
  }
  const std::size_t n = labels.size();
  if (n == 0) throw ParseError("no data rows in " + path);

  if (standardize) {
    for (std::size_t j = 0; j < ncov; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += covs[i * ncov + j];
      mean /= static_cast<double>(n);
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = covs[i * ncov + j] - mean;
        ss += d * d;
      }
      const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double& v = covs[i * ncov + j];
        v -= mean;
        if (sd > 0.0) v /= sd;  // constant columns stay centered
      }
    }
  }

  const std::size_t arity = ncov + (add_intercept ? 1 : 0) + 1;
  DataMatrix data(arity);
  data.reserve(n);
  std::vector<double> rowbuf(arity);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < ncov; ++j) rowbuf[c++] = covs[i * ncov + j];
    if (add_intercept) rowbuf[c++] = 1.0;
    rowbuf[c] = labels[i];
    data.append_row(rowbuf);
  }
  return data;
}

}  // namespace mlo
