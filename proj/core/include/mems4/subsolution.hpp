#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mems4/certify.hpp"

namespace mems4 {

/// How the perturbation kappa r^alpha (1 - r^beta) is scaled.
///   literal            kappa = 4 beta / 3; w'(1) = 0 only when beta = 1
///   literal_corrected  kappa = 4 beta / 3 plus c (r^{4/3} - r^2) with c
///                      chosen so that w'(1) = 0 (w(0) = 1 is kept)
///   slope_matched      kappa = 4 / (3 beta); restores w'(1) = 0 and, at
///                      alpha = 4/3, gives w_m with m = 4/3 + beta
enum class RemarkCoefficient { literal, literal_corrected, slope_matched };

std::string to_string(RemarkCoefficient c);
RemarkCoefficient remark_coefficient_from_string(const std::string& s);

struct Candidate {
  std::string family;
  std::string label;
  std::vector<std::pair<std::string, Rational>> params;
  PowerSum w;
};

/// w = (1 - r^{4/3}) - kappa r^alpha (1 - r^beta) [+ c (r^{4/3} - r^2)].
Candidate remark_candidate(const Rational& alpha, const Rational& beta, RemarkCoefficient coefficient);
Candidate wm_candidate(const Rational& m);

/// Cartesian product alpha x beta x coefficient variants.
std::vector<Candidate> remark_family(const std::vector<Rational>& alphas, const std::vector<Rational>& betas,
                                     const std::vector<RemarkCoefficient>& variants = {
                                         RemarkCoefficient::literal, RemarkCoefficient::literal_corrected,
                                         RemarkCoefficient::slope_matched});
std::vector<Candidate> wm_family(const std::vector<Rational>& ms);

struct CandidateReport {
  Candidate candidate;
  /// (i) w(1) = 0 and w'(1) = 0
  Certificate boundary;
  /// (ii) w(0) = 1, w >= 0 and 1 - w >= 0 on [0,1]
  Certificate range;
  /// (iii) lambda - (1-w)^2 Delta^2 w >= 0 on (0,1)
  Certificate subsolution;
  /// (iv) H_N (1-w)^3 - 2 lambda r^4 >= 0 on (0,1)
  Certificate stability;
  bool passes_all = false;
};

struct SearchOptions {
  std::size_t samples = 10000;
  unsigned jobs = 1;
};

struct SearchReport {
  int dimension = 0;
  Rational lambda;
  bool in_open_range = false;
  std::vector<CandidateReport> candidates;
  std::size_t passing = 0;
  /// check name -> (falsified, inconclusive) counts
  std::map<std::string, std::pair<std::size_t, std::size_t>> failures;
  std::vector<std::string> notes;
};

/// Runs checks (i)-(iv) on every candidate at the given lambda (default
/// H_N / 2). Dimensions outside 9..16 are allowed and flagged in the notes.
SearchReport subsolution_search(Dimension n, const std::vector<Candidate>& family,
                                const std::optional<Rational>& lambda = std::nullopt, const SearchOptions& opts = {});

}  // namespace mems4
