#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mems4/radial_operator.hpp"

namespace mems4 {

struct SolverOptions {
  /// Sup norm of u - (Phi + G lambda/(1-u)^2), the fixed-point defect.
  double tol = 1e-10;
  /// Iterates reaching 1 - ceiling_eps anywhere count as touchdown.
  double ceiling_eps = 1e-6;
  /// Monotone sweeps before handing over to Newton.
  int monotone_sweeps = 30;
  /// Hand over earlier once successive increments shrink by less than this.
  double stall_ratio = 0.5;
  int max_newton = 100;
  bool compute_mu1 = true;
};

/// One point of the minimal branch.
struct BranchPoint {
  double lambda = 0.0;
  RadialField field;
  double max_value = 0.0;
  double mu1 = 0.0;
  double residual = 0.0;
  double energy_h2 = 0.0;
  double energy_cubed = 0.0;
  int monotone_iterations = 0;
  int newton_iterations = 0;
  /// Most negative nodewise increment seen between successive monotone
  /// iterates (>= 0 up to rounding when the discrete Green operator is positive).
  double monotone_defect = 0.0;
};

enum class DivergenceReason { touchdown, unstable_linearization, newton_stalled };

std::string to_string(DivergenceReason r);

struct DivergenceReport {
  double lambda = 0.0;
  DivergenceReason reason = DivergenceReason::touchdown;
  RadialField last_iterate;
  int iterations = 0;
  std::string detail;
};

using SolveOutcome = std::variant<BranchPoint, DivergenceReport>;

inline bool converged(const SolveOutcome& s) { return std::holds_alternative<BranchPoint>(s); }

/// Minimal solution of Delta^2 u = lambda/(1-u)^2 with clamped data from the
/// operator's boundary pair.
///
/// Runs the classical monotone scheme v_k = G lambda/(1 - v_{k-1} - Phi)^2
/// from v_0 = 0 (or from `subsolution`, which must lie below the minimal
/// solution), then Newton from the last monotone iterate. Starting below the
/// minimal solution keeps every Newton linearization positive definite while
/// lambda < lambda*; a negative pivot or an iterate reaching the ceiling is
/// reported as divergence.
SolveOutcome minimal_solution(const OperatorMatrix& op, double lambda, const SolverOptions& opts = {},
                              const std::vector<double>* subsolution = nullptr);

SolveOutcome minimal_solution(double lambda, const BoundaryPair& bp, GridPtr grid, double tol);

struct BranchRun {
  std::vector<BranchPoint> points;
  /// First lambda at which the solver diverged, if any.
  std::optional<DivergenceReport> truncated_at;
};

/// Points along increasing lambdas, warm-started by linear extrapolation of
/// the two previous shifted fields (falling back to the monotone scheme from
/// the previous point when Newton leaves the stable branch).
BranchRun continue_branch(const OperatorMatrix& op, const std::vector<double>& lambdas,
                          const SolverOptions& opts = {});

enum class PullInMethod { bisection_on_convergence, mu1_extrapolation };

std::string to_string(PullInMethod m);

struct PullInEstimate {
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  /// max of the two classical lower bounds, exact.
  Rational analytic_lower;
  /// 4 nu1 / 27 with the discrete nu1.
  double analytic_upper = 0.0;
  double nu1 = 0.0;
  PullInMethod method = PullInMethod::bisection_on_convergence;
  /// [lambda_lo, lambda_hi] inside [analytic_lower, analytic_upper].
  bool consistent = false;
  /// Oracle flip-flop detected; the bracket was widened.
  bool ambiguous = false;
  std::size_t grid_nodes = 0;
  double grid_gamma = 1.0;
  BranchPoint near_fold;
};

/// Bisection on lambda with minimal_solution convergence as the oracle, to
/// relative bracket width rel_width. A discrete-scheme estimate of lambda*. The
/// near-fold max moves like sqrt(width), so verdicts near u = 1 need it tight.
PullInEstimate pull_in_voltage(const OperatorMatrix& op, double rel_width = 1e-10, const SolverOptions& opts = {});

struct PointDiagnostics {
  double lambda = 0.0;
  /// 2 int (u-Phi)^2/(1-u)^3 and int (u-Phi)/(1-u)^2, nodal quadrature.
  double stability_lhs = 0.0;
  double stability_rhs = 0.0;
  bool stability_holds = false;
  /// max_i (u_i - (1 - r_i^{4/3})); only meaningful for N >= 9.
  double barrier_excess = 0.0;
  bool below_barrier = true;
};

struct TouchdownCheck {
  Rational c0;
  double slack = 0.0;
  /// min_i (u_i - (1 - C0 r_i^{4/3}))
  double min_margin = 0.0;
  bool holds = false;
};

struct DiagnosticsReport {
  double max_energy_h2 = 0.0;
  double max_energy_cubed = 0.0;
  bool energies_finite = true;
  std::vector<PointDiagnostics> points;
  bool barrier_checked = false;
  std::optional<TouchdownCheck> touchdown;
  double quadrature_rel_tol = 1e-6;

  bool stability_inequality_holds() const;
  bool barrier_holds() const;
};

struct DiagnosticsOptions {
  double quadrature_rel_tol = 1e-6;
  /// Slack added to the barrier 1 - r^{4/3} (the solver tolerance scale).
  double barrier_slack = 1e-9;
  double touchdown_slack = 0.02;
};

/// Checks along a computed branch: bounded energies, the stability-derived
/// inequality 2 int (u-Phi)^2/(1-u)^3 <= int (u-Phi)/(1-u)^2, for N >= 9 the
/// barrier u <= 1 - r^{4/3}, and, given a lambda* bracket, the lower profile
/// bound u >= 1 - C0 r^{4/3} - slack at the last point.
DiagnosticsReport extremal_diagnostics(const OperatorMatrix& op, const std::vector<BranchPoint>& branch,
                                       const PullInEstimate* pie = nullptr, const DiagnosticsOptions& opts = {});

enum class Verdict { regular_consistent, singular_consistent, inconclusive };

std::string to_string(Verdict v);

/// What the theory asserts in this dimension.
enum class KnownRegime { regular, singular, open };

KnownRegime known_regime(Dimension n);
std::string to_string(KnownRegime k);

struct VerdictReport {
  Verdict verdict = Verdict::inconclusive;
  KnownRegime known = KnownRegime::open;
  /// True only when the verdict agrees with a regime the theory establishes.
  bool regime_confirmed = false;
  bool below_hardy_half = false;
  std::vector<double> near_fold_max;
  std::string detail;
};

struct VerdictOptions {
  double delta_reg = 0.05;
  /// Singular-consistent needs 1 - max to shrink at least by this factor on
  /// each refinement.
  double gap_contraction = 0.9;
  /// ... or stay below this on every grid.
  double touchdown_gap = 1e-4;
};

/// Numerical consistency verdict from near-fold maxima over successive grid
/// refinements (coarse to fine). Not a proof.
VerdictReport regularity_verdict(const std::vector<PullInEstimate>& refinements, Dimension n,
                                 const VerdictOptions& opts = {});

/// Single-grid form; with one grid nothing can be seen approaching 1, so the
/// result is regular-consistent or inconclusive.
VerdictReport regularity_verdict(const PullInEstimate& pie, const BranchPoint& near_fold, Dimension n,
                                 const VerdictOptions& opts = {});

}  // namespace mems4
