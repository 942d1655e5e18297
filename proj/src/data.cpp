#include "mlo/data.hpp"

#include <cmath>

namespace mlo {

DataMatrix DataMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("DataMatrix: no rows");
  DataMatrix m(rows.front().size());
  m.reserve(rows.size());
  for (const auto& r : rows) m.append_row(r);
  return m;
}

void DataMatrix::append_row(std::span<const double> row) {
  if (row.size() != arity_)
    throw std::invalid_argument("DataMatrix: row arity mismatch");
  for (double v : row)
    if (!std::isfinite(v))
      throw NonFiniteValue("DataMatrix: non-finite entry in row " +
                           std::to_string(size()));
  values_.insert(values_.end(), row.begin(), row.end());
}

}  // namespace mlo
