// Deterministic data-parallel reductions.
//
// All tall-data kernels (full-data log-likelihood, weight scans, variance
// factors) reduce through a fixed block decomposition: the index range is cut
// into blocks of kBlockSize, each block is accumulated serially, and the block
// partials are combined in index order.  The result is bit-identical for any
// OpenMP thread count, including 1, which is what makes "same output across
// thread counts" a testable property instead of a hope.
//
// The *_serial variants run the identical blocked computation without OpenMP
// and are kept as the reference implementation for tests and benchmarks.

#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace mlo::par {

inline constexpr std::size_t kBlockSize = 2048;

namespace detail {

template <class F>
double sum_block(std::size_t lo, std::size_t hi, const F& term) {
  double s = 0.0;
  for (std::size_t i = lo; i < hi; ++i) s += term(i);
  return s;
}

template <class F>
double max_block(std::size_t lo, std::size_t hi, const F& term) {
  double m = term(lo);
  for (std::size_t i = lo + 1; i < hi; ++i) {
    const double v = term(i);
    if (v > m) m = v;
  }
  return m;
}

}  // namespace detail

// sum_{i=0}^{n-1} term(i), blocked, serial reference.
template <class F>
double block_sum_serial(std::size_t n, const F& term) {
  const std::size_t nblocks = (n + kBlockSize - 1) / kBlockSize;
  double total = 0.0;
  for (std::size_t b = 0; b < nblocks; ++b) {
    const std::size_t lo = b * kBlockSize;
    const std::size_t hi = lo + std::min(kBlockSize, n - lo);
    total += detail::sum_block(lo, hi, term);
  }
  return total;
}

// Same decomposition, blocks evaluated in parallel, partials combined in
// index order.  Bit-identical to block_sum_serial.
template <class F>
double block_sum(std::size_t n, const F& term) {
  if (n == 0) return 0.0;
  const std::size_t nblocks = (n + kBlockSize - 1) / kBlockSize;
  if (nblocks == 1) return detail::sum_block(0, n, term);
  std::vector<double> partial(nblocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlockSize;
    const std::size_t hi = lo + std::min(kBlockSize, n - lo);
    partial[static_cast<std::size_t>(b)] = detail::sum_block(lo, hi, term);
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

// Order-independent sum: each term is truncated to a 64.64 fixed-point
// integer and the integers are added, which is exactly associative and
// commutative.  The result is therefore bit-identical under any permutation
// of the terms and any thread count, at a cost of < 2^-64 absolute error per
// term.  Terms that are non-finite or larger than 2^25 in magnitude fall
// back to the blocked double sum (still thread-count deterministic, but not
// permutation invariant).
namespace detail {

struct FixedPartial {
  __int128 acc = 0;
  bool ok = true;
};

template <class F>
FixedPartial fixed_block(std::size_t lo, std::size_t hi, const F& term) {
  FixedPartial p;
  for (std::size_t i = lo; i < hi; ++i) {
    const double scaled = term(i) * 0x1.0p64;
    if (!(scaled > -0x1.0p89 && scaled < 0x1.0p89)) {  // also catches NaN
      p.ok = false;
      return p;
    }
    p.acc += static_cast<__int128>(scaled);
  }
  return p;
}

}  // namespace detail

template <class F>
double fixed_sum_serial(std::size_t n, const F& term) {
  const std::size_t nblocks = (n + kBlockSize - 1) / kBlockSize;
  detail::FixedPartial total;
  for (std::size_t b = 0; b < nblocks && total.ok; ++b) {
    const std::size_t lo = b * kBlockSize;
    const std::size_t hi = lo + std::min(kBlockSize, n - lo);
    const auto p = detail::fixed_block(lo, hi, term);
    total.ok = total.ok && p.ok;
    total.acc += p.acc;
  }
  if (!total.ok) return block_sum_serial(n, term);
  return static_cast<double>(total.acc) * 0x1.0p-64;
}

template <class F>
double fixed_sum(std::size_t n, const F& term) {
  if (n == 0) return 0.0;
  const std::size_t nblocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<detail::FixedPartial> partial(nblocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlockSize;
    const std::size_t hi = lo + std::min(kBlockSize, n - lo);
    partial[static_cast<std::size_t>(b)] = detail::fixed_block(lo, hi, term);
  }
  detail::FixedPartial total;
  for (const auto& p : partial) {
    total.ok = total.ok && p.ok;
    total.acc += p.acc;
  }
  if (!total.ok) return block_sum(n, term);
  return static_cast<double>(total.acc) * 0x1.0p-64;
}

// max_{i=0}^{n-1} term(i); n must be >= 1.
template <class F>
double block_max_serial(std::size_t n, const F& term) {
  const std::size_t nblocks = (n + kBlockSize - 1) / kBlockSize;
  double best = term(0);
  for (std::size_t b = 0; b < nblocks; ++b) {
    const std::size_t lo = b * kBlockSize;
    const std::size_t hi = lo + std::min(kBlockSize, n - lo);
    const double v = detail::max_block(lo, hi, term);
    if (v > best) best = v;
  }
  return best;
}

template <class F>
double block_max(std::size_t n, const F& term) {
  const std::size_t nblocks = (n + kBlockSize - 1) / kBlockSize;
  if (nblocks == 1) return detail::max_block(0, n, term);
  std::vector<double> partial(nblocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlockSize;
    const std::size_t hi = lo + std::min(kBlockSize, n - lo);
    partial[static_cast<std::size_t>(b)] = detail::max_block(lo, hi, term);
  }
  double best = partial[0];
  for (double v : partial)
    if (v > best) best = v;
  return best;
}

}  // namespace mlo::par
