// Flat row-major storage for observation data.
//
// A row is one observation: scalar models use arity 1, logistic rows hold the
// covariates followed by the 0/1 label.  Entries are validated finite on
// insertion.

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlo {

using ParamVector = std::vector<double>;
using Observation = std::span<const double>;

struct NonFiniteValue : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class DataMatrix {
 public:
  explicit DataMatrix(std::size_t arity) : arity_(arity) {
    if (arity == 0) throw std::invalid_argument("DataMatrix: arity must be >= 1");
  }

  static DataMatrix from_rows(const std::vector<std::vector<double>>& rows);

  void reserve(std::size_t n) { values_.reserve(n * arity_); }
  void append_row(std::span<const double> row);

  Observation row(std::size_t i) const {
    return Observation(values_.data() + i * arity_, arity_);
  }
  std::size_t size() const { return values_.size() / arity_; }
  std::size_t arity() const { return arity_; }
  std::span<const double> values() const { return values_; }

 private:
  std::size_t arity_;
  std::vector<double> values_;
};

// Dense row-major matrix used for chain draws and replication estimates.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data.data() + r * cols, cols);
  }
};

}  // namespace mlo
