#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mems4 {

/// Symmetric band matrix stored by diagonals: band(k)[i] = A(i, i+k).
class BandedSymmetric {
 public:
  BandedSymmetric() = default;
  BandedSymmetric(std::size_t n, std::size_t bandwidth);

  std::size_t size() const { return n_; }
  std::size_t bandwidth() const { return bands_.empty() ? 0 : bands_.size() - 1; }

  /// A(i, j) for |i - j| <= bandwidth; zero outside the band.
  double operator()(std::size_t i, std::size_t j) const;
  /// Adds to A(i, j) and A(j, i).
  void add(std::size_t i, std::size_t j, double value);
  void add_to_diagonal(std::span<const double> values);

  std::vector<double> multiply(std::span<const double> x) const;

 private:
  std::size_t n_ = 0;
  std::vector<std::vector<double>> bands_;
};

/// A = L D L^T without pivoting. The matrices here are either positive
/// definite or, for linearizations past a fold, indefinite with the
/// negative-pivot count read as the inertia (Sylvester's law).
class BandedLDLT {
 public:
  explicit BandedLDLT(const BandedSymmetric& a);

  std::vector<double> solve(std::span<const double> b) const;
  std::size_t negative_pivots() const { return negative_; }
  /// True when some pivot was exactly zero or non-finite.
  bool breakdown() const { return breakdown_; }

 private:
  std::size_t n_;
  std::size_t p_;
  std::vector<double> d_;
  // l_[k][i] = L(i + k, i), k = 1..p
  std::vector<std::vector<double>> l_;
  std::size_t negative_ = 0;
  bool breakdown_ = false;
};

}  // namespace mems4
