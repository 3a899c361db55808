#include "mems4/banded.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mems4 {

BandedSymmetric::BandedSymmetric(std::size_t n, std::size_t bandwidth) : n_(n) {
  bands_.resize(bandwidth + 1);
  for (std::size_t k = 0; k <= bandwidth; ++k) bands_[k].assign(n > k ? n - k : 0, 0.0);
}

double BandedSymmetric::operator()(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  const std::size_t k = j - i;
  return k < bands_.size() ? bands_[k][i] : 0.0;
}

void BandedSymmetric::add(std::size_t i, std::size_t j, double value) {
  if (i > j) std::swap(i, j);
  const std::size_t k = j - i;
  if (k >= bands_.size() || j >= n_) throw std::out_of_range("entry outside band");
  bands_[k][i] += value;
}

void BandedSymmetric::add_to_diagonal(std::span<const double> values) {
  if (values.size() != n_) throw std::invalid_argument("diagonal length mismatch");
  for (std::size_t i = 0; i < n_; ++i) bands_[0][i] += values[i];
}

std::vector<double> BandedSymmetric::multiply(std::span<const double> x) const {
  if (x.size() != n_) throw std::invalid_argument("vector length mismatch");
  std::vector<double> y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) y[i] = bands_[0][i] * x[i];
  for (std::size_t k = 1; k < bands_.size(); ++k) {
    const auto& b = bands_[k];
    for (std::size_t i = 0; i + k < n_; ++i) {
      y[i] += b[i] * x[i + k];
      y[i + k] += b[i] * x[i];
    }
  }
  return y;
}

BandedLDLT::BandedLDLT(const BandedSymmetric& a) : n_(a.size()), p_(a.bandwidth()), d_(n_, 0.0) {
  l_.assign(p_ + 1, {});
  for (std::size_t k = 1; k <= p_; ++k) l_[k].assign(n_ > k ? n_ - k : 0, 0.0);

  for (std::size_t j = 0; j < n_; ++j) {
    double dj = a(j, j);
    const std::size_t kmin = j > p_ ? j - p_ : 0;
    for (std::size_t k = kmin; k < j; ++k) {
      const double ljk = l_[j - k][k];
      dj -= ljk * ljk * d_[k];
    }
    d_[j] = dj;
    if (!(std::isfinite(dj)) || dj == 0.0) {
      breakdown_ = true;
      d_[j] = dj == 0.0 ? 1e-300 : dj;
    }
    if (d_[j] < 0.0) ++negative_;
    for (std::size_t i = j + 1; i <= std::min(n_ - 1, j + p_); ++i) {
      double s = a(i, j);
      const std::size_t lo = i > p_ ? i - p_ : 0;
      for (std::size_t k = std::max(lo, kmin); k < j; ++k) s -= l_[i - k][k] * l_[j - k][k] * d_[k];
      l_[i - j][j] = s / d_[j];
    }
  }
}

std::vector<double> BandedLDLT::solve(std::span<const double> b) const {
  if (b.size() != n_) throw std::invalid_argument("rhs length mismatch");
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t lo = i > p_ ? i - p_ : 0;
    for (std::size_t k = lo; k < i; ++k) x[i] -= l_[i - k][k] * x[k];
  }
  for (std::size_t i = 0; i < n_; ++i) x[i] /= d_[i];
  for (std::size_t i = n_; i-- > 0;) {
    for (std::size_t k = i + 1; k <= std::min(n_ - 1, i + p_); ++k) x[i] -= l_[k - i][i] * x[k];
  }
  return x;
}

}  // namespace mems4
