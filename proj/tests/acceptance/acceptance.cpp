// Acceptance run: one PASS/FAIL line per criterion with the measured numbers.
//
//   mems4_acceptance [--cli <mems4 binary>] [--out <dir>] [--only k,...] [--expect-fail k,...]
//
// Exit status is 0 when the failing criteria are exactly the expected ones.

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "../support/oracles.hpp"
#include "mems4/branch.hpp"
#include "mems4/certify.hpp"
#include "mems4/serialize.hpp"
#include "mems4/subsolution.hpp"

using namespace mems4;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

struct Context {
  std::string cli;
  fs::path out;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct CliRun {
  int code = -1;
  std::string output;
};

CliRun run_cli(const Context& ctx, const std::string& args) {
  CliRun r;
  const std::string cmd = "\"" + ctx.cli + "\" --out \"" + ctx.out.string() + "\" " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[512];
  while (fgets(buf, sizeof buf, p)) r.output += buf;
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

OperatorMatrix make(int dim, std::size_t n, BoundaryPair bp = {}) {
  return assemble_bilaplacian(build_grid(n, 1.5, Dimension(dim)), bp);
}

// 1 ---------------------------------------------------------------------------
Outcome thresholds(const Context& ctx) {
  Outcome o;
  const auto t0 = Clock::now();
  const ThresholdTable t = threshold_table(Dimension(1), Dimension(40));
  const Certificate c = certify_thresholds(Dimension(1), Dimension(40));
  const double dt = seconds_since(t0);
  auto show = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string("none"); };
  o.detail << "onsets " << show(t.onset_regular) << " and " << show(t.onset_hjh) << ", certificate "
           << to_string(c.status) << ", " << dt << " s";
  o.require(t.onset_regular == 9 && t.onset_hjh == 31, "onsets 9 and 31");
  o.require(t.onset_regular == oracle::onset(1, 40, oracle::regular_cmp) &&
                t.onset_hjh == oracle::onset(1, 40, oracle::hjh_cmp),
            "brute-force oracle");
  o.require(c.status == CertStatus::verified && replay(c).ok, "verified and replayable");
  o.require(dt < 1.0, "runtime < 1 s");
  if (!ctx.cli.empty()) {
    const CliRun r = run_cli(ctx, "certify thresholds --n 1..40");
    o.detail << "; cli exit " << r.code;
    o.require(r.code == 0, "cli exit 0");
    o.require(r.output.find("<= H_N: 9") != std::string::npos && r.output.find("<= H_N/2: 31") != std::string::npos,
              "cli reports 9 and 31");
  }
  return o;
}

// 2 ---------------------------------------------------------------------------
Outcome hjh(const Context& ctx) {
  Outcome o;
  const auto t0 = Clock::now();
  int verified = 0;
  bool replays = true;
  for (int n = 17; n <= 30; ++n) {
    const Certificate c = certify_hjh(Dimension(n));
    verified += c.status == CertStatus::verified;
    replays = replays && replay(c).ok;
  }
  const double dt = seconds_since(t0);
  o.detail << verified << "/14 verified, " << dt << " s";
  o.require(verified == 14, "14 verified");
  o.require(replays, "replay");
  o.require(dt < 5.0, "runtime < 5 s");
  if (!ctx.cli.empty()) {
    const auto t1 = Clock::now();
    const CliRun r = run_cli(ctx, "certify hjh --n 17..30");
    const double dc = seconds_since(t1);
    int files = 0;
    const fs::path dir = ctx.out / "certify-hjh-N17-30" / "certificates";
    if (fs::exists(dir)) {
      for (const auto& e : fs::directory_iterator(dir)) {
        const Certificate c = certificate_from_json(read_file(e.path()));
        files += c.status == CertStatus::verified && replay(c).ok;
      }
    }
    o.detail << "; cli exit " << r.code << ", " << files << " certificate files verified on reload, " << dc << " s";
    o.require(r.code == 0 && files == 14, "cli certificates");
    o.require(dc < 5.0, "cli runtime < 5 s");
  }
  return o;
}

// 3 ---------------------------------------------------------------------------
Outcome consistency(const Context&) {
  Outcome o;
  const auto t0 = Clock::now();
  for (int dim : {3, 9, 17}) {
    const Dimension d(dim);
    double err[2];
    int k = 0;
    for (std::size_t n : {std::size_t{1024}, std::size_t{2049}}) {
      const OperatorMatrix op = make(dim, n, {0, Rational(-4, 3)});
      const auto a = op.apply_profile(singular_profile());
      const double lb = to_double(lambda_bar(d));
      double e = 0, m = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double r = op.grid().node(i);
        if (r < 0.1 || r > 0.9) continue;
        const double exact = lb * std::pow(r, -8.0 / 3.0);
        e = std::max(e, std::abs(a[i] - exact));
        m = std::max(m, std::abs(exact));
      }
      err[k++] = e / m;
    }
    const double order = std::log2(err[0] / err[1]);
    o.detail << "N=" << dim << " rel " << err[0] << " order " << order << "; ";
    o.require(err[0] < 1e-2, "relative error < 1% at N=" + std::to_string(dim));
    o.require(std::abs(order - 2.0) <= 0.4, "order within 20% of 2 at N=" + std::to_string(dim));
  }
  const double dt = seconds_since(t0);
  o.detail << dt << " s";
  o.require(dt < 5.0, "runtime < 5 s");
  return o;
}

// 4 ---------------------------------------------------------------------------
Outcome eigenvalues(const Context&) {
  Outcome o;
  const auto t0 = Clock::now();
  const double beam = oracle::beam_nu1();
  const double disc = oracle::disc_nu1();
  const auto e1 = nu1(make(1, 1024));
  const auto e2 = nu1(make(2, 1024));
  const double r1 = std::abs(e1.value - beam) / beam;
  const double r2 = std::abs(e2.value - disc) / disc;
  const double dt = seconds_since(t0);
  o.detail << "N=1 " << e1.value << " vs " << beam << " (rel " << r1 << "); N=2 " << e2.value << " vs " << disc
           << " (rel " << r2 << "); " << dt << " s";
  o.require(e1.converged && e2.converged, "inverse iteration converged");
  o.require(r1 < 1e-3, "N=1 within 1e-3");
  o.require(r2 < 1e-2, "N=2 within 1e-2");
  o.require(dt < 10.0, "runtime < 10 s");
  return o;
}

// 5 ---------------------------------------------------------------------------
Outcome brackets(const Context&) {
  Outcome o;
  for (int dim : {2, 3, 9, 17}) {
    const Dimension d(dim);
    const PullInEstimate p = pull_in_voltage(make(dim, 1024));
    const double lower = to_double(std::max(classical_lower_bound(d), lambda_bar(d)));
    const double upper = 4 * p.nu1 / 27;
    o.detail << "N=" << dim << " [" << p.lambda_lo << ", " << p.lambda_hi << "] in [" << lower << ", " << upper << "]; ";
    o.require(p.lambda_lo >= 0.99 * lower && p.lambda_hi <= 1.01 * upper, "bracket within bounds at N=" + std::to_string(dim));
    if (dim == 17) {
      const double half = to_double(hardy_constant(d)) / 2;
      o.detail << "H_N/2 = " << half;
      o.require(p.lambda_hi <= 1.01 * half, "upper end <= 1.01 H_N/2");
    }
  }
  return o;
}

// 6 ---------------------------------------------------------------------------
Outcome branch_suite(const Context&) {
  Outcome o;
  const auto t0 = Clock::now();
  const OperatorMatrix op = make(3, 1024);
  std::vector<double> lambdas;
  for (int k = 1; k <= 10; ++k) lambdas.push_back(k);  // all below 32/3
  const BranchRun run = continue_branch(op, lambdas);
  const double tol = SolverOptions{}.tol;
  bool monotone = true, decreasing = true, stable = true;
  for (std::size_t k = 0; k < run.points.size(); ++k) {
    const auto& u = run.points[k].field.values;
    stable = stable && run.points[k].mu1 > 0;
    for (std::size_t i = 1; i < u.size(); ++i) decreasing = decreasing && u[i - 1] >= u[i] - tol;
    if (k > 0) {
      const auto& v = run.points[k - 1].field.values;
      for (std::size_t i = 0; i < u.size(); ++i) monotone = monotone && u[i] >= v[i];
    }
  }
  DiagnosticsOptions dopts;
  dopts.quadrature_rel_tol = 1e-6;
  const DiagnosticsReport d = extremal_diagnostics(op, run.points, nullptr, dopts);
  double worst = 0;
  for (const auto& p : d.points) worst = std::max(worst, p.stability_lhs / p.stability_rhs);
  const double dt = seconds_since(t0);
  o.detail << run.points.size() << " points, monotone " << monotone << ", decreasing " << decreasing << ", mu1 > 0 "
           << stable << ", max lhs/rhs " << worst << ", " << dt << " s";
  o.require(run.points.size() == 10 && !run.truncated_at, "10 converged points");
  o.require(monotone && decreasing && stable, "monotone, decreasing, stable");
  o.require(d.stability_inequality_holds(), "stability inequality");
  o.require(dt < 60.0, "runtime < 1 min");
  return o;
}

// 7 ---------------------------------------------------------------------------
Outcome singular_bounds(const Context&) {
  Outcome o;
  const Dimension d(17);
  const OperatorMatrix op = make(17, 1024);
  const SolverOptions sopts;
  const PullInEstimate p = pull_in_voltage(op);
  std::vector<double> lambdas;
  for (int k = 1; k <= 20; ++k) lambdas.push_back(p.lambda_lo * k / 20);
  const BranchRun run = continue_branch(op, lambdas, sopts);
  std::vector<BranchPoint> points = run.points;
  points.push_back(p.near_fold);

  double excess = -1e300;
  for (const auto& pt : points) {
    for (std::size_t i = 0; i < pt.field.values.size(); ++i) {
      excess = std::max(excess, pt.field.values[i] - (1 - std::pow(op.grid().node(i), 4.0 / 3.0)));
    }
  }
  const double c0 = to_double(c0_constant(from_double(p.lambda_hi), d));
  double margin = 1e300;
  const auto& u = p.near_fold.field.values;
  for (std::size_t i = 0; i < u.size(); ++i) {
    margin = std::min(margin, u[i] - (1 - c0 * std::pow(op.grid().node(i), 4.0 / 3.0)));
  }
  o.detail << points.size() << " profiles, max u - (1 - r^(4/3)) = " << excess << ", C0 = " << c0
           << ", min u - (1 - C0 r^(4/3)) = " << margin;
  o.require(!run.truncated_at, "branch below the bracket converges");
  o.require(excess <= 10 * sopts.tol, "u <= 1 - r^(4/3) + 10 tol");
  o.require(margin >= -0.02, "u >= 1 - C0 r^(4/3) - 0.02");
  return o;
}

// 8 ---------------------------------------------------------------------------
Outcome verdicts(const Context&) {
  Outcome o;
  std::vector<int> dims;
  for (int n = 1; n <= 17; ++n) dims.push_back(n);
  std::vector<VerdictReport> reports(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const Dimension d(dims[k]);
    GridPtr g = build_grid(1024, 1.5, d);
    std::vector<PullInEstimate> est;
    for (int r = 0; r < 3; ++r) {
      if (r > 0) g = std::make_shared<const RadialGrid>(g->refined());
      est.push_back(pull_in_voltage(assemble_bilaplacian(g)));
    }
    reports[k] = regularity_verdict(est, d);
  }
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const int n = dims[k];
    const auto& v = reports[k];
    if (n <= 8) {
      const bool ok = v.verdict == Verdict::regular_consistent;
      if (!ok) o.detail << "N=" << n << " " << to_string(v.verdict) << " (" << v.detail << "); ";
      o.require(ok, "regular-consistent at N=" + std::to_string(n));
    } else if (n <= 16) {
      o.require(!(v.verdict == Verdict::regular_consistent && v.regime_confirmed),
                "no confirmed regular verdict at N=" + std::to_string(n));
    } else {
      o.detail << "N=17 " << to_string(v.verdict) << " (" << v.detail << "); ";
      o.require(v.verdict == Verdict::singular_consistent, "singular-consistent at N=17");
    }
  }
  int regular = 0;
  for (std::size_t k = 0; k < 8; ++k) regular += reports[k].verdict == Verdict::regular_consistent;
  o.detail << regular << "/8 regular-consistent for N=1..8";
  return o;
}

// 9 ---------------------------------------------------------------------------
Outcome boggio(const Context&) {
  Outcome o;
  const auto t0 = Clock::now();
  for (int dim : {1, 3, 9, 17}) {
    for (std::size_t n : {std::size_t{64}, std::size_t{256}}) {
      const BoggioCheck b = boggio_check(green_matrix(make(dim, n)));
      if (n == 256) o.detail << "N=" << dim << " min/max " << b.min_entry / b.max_entry << "; ";
      o.require(b.holds, "N=" + std::to_string(dim) + " n=" + std::to_string(n));
    }
  }
  const double dt = seconds_since(t0);
  o.detail << dt << " s";
  o.require(dt < 10.0, "runtime < 10 s");
  return o;
}

// 10 --------------------------------------------------------------------------
Outcome remark(const Context&) {
  Outcome o;
  const auto t0 = Clock::now();
  auto grid = [](const Rational& a, const Rational& b, int k) {
    std::vector<Rational> v;
    for (int i = 0; i < k; ++i) v.push_back(Rational(a + (b - a) * make_rational(i, k - 1)));
    return v;
  };
  SearchOptions opts;
  opts.jobs = std::max(1u, std::thread::hardware_concurrency());
  const auto fam = remark_family(grid(1, 3, 9), grid(Rational(1, 10), 2, 20));
  const SearchReport n9 = subsolution_search(Dimension(9), fam, std::nullopt, opts);
  const SearchReport n17 = subsolution_search(Dimension(17), wm_family({Rational(3)}), std::nullopt, opts);
  const double dt = seconds_since(t0);
  o.detail << "N=9: " << n9.passing << "/" << n9.candidates.size() << " pass; N=17 w_3: " << n17.passing << "/"
           << n17.candidates.size() << " pass; " << dt << " s";
  o.require(n9.candidates.size() == 540 && n9.passing == 0, "no passing candidate at N=9");
  o.require(n17.passing == 1, "w_3 passes at N=17");
  o.require(dt < 60.0, "runtime < 1 min");
  return o;
}

std::set<int> parse_set(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.insert(std::stoi(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  ctx.out = fs::temp_directory_path() / "mems4-acceptance";
  std::set<int> only, expected;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string key = argv[i];
    const std::string value = argv[i + 1];
    if (key == "--cli") ctx.cli = value;
    else if (key == "--out") ctx.out = value;
    else if (key == "--only") only = parse_set(value);
    else if (key == "--expect-fail") expected = parse_set(value);
    else {
      std::cerr << "unknown option " << key << '\n';
      return 3;
    }
  }
  fs::remove_all(ctx.out);

  const std::pair<const char*, std::function<Outcome(const Context&)>> criteria[] = {
      {"exact thresholds", thresholds},
      {"hjh certificates N=17..30", hjh},
      {"closed-form consistency", consistency},
      {"first eigenvalue vs oracles", eigenvalues},
      {"pull-in brackets vs analytic bounds", brackets},
      {"branch properties N=3", branch_suite},
      {"singular-regime profile bounds N=17", singular_bounds},
      {"regularity verdicts", verdicts},
      {"discrete Boggio positivity", boggio},
      {"subsolution search", remark},
  };

  std::set<int> failed;
  std::cout.precision(6);
  for (int k = 1; k <= 10; ++k) {
    if (!only.empty() && !only.count(k)) continue;
    const auto& [name, fn] = criteria[k - 1];
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn(ctx);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    if (!o.pass) failed.insert(k);
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << k << " " << name << ": " << o.detail.str() << " ("
              << seconds_since(t0) << " s total)" << std::endl;
  }

  std::set<int> checked_expected;
  for (int k : expected) {
    if (only.empty() || only.count(k)) checked_expected.insert(k);
  }
  std::cout << failed.size() << " criterion/criteria failed";
  if (!checked_expected.empty()) {
    std::cout << "; known failures:";
    for (int k : checked_expected) std::cout << ' ' << k;
  }
  std::cout << std::endl;
  for (int k : checked_expected) {
    if (!failed.count(k)) std::cout << "known failure " << k << " now passes; update the registration" << std::endl;
  }
  return failed == checked_expected ? 0 : 1;
}
