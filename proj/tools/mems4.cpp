#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>

#include "cli_args.hpp"
#include "mems4/branch.hpp"
#include "mems4/certify.hpp"
#include "mems4/serialize.hpp"
#include "mems4/subsolution.hpp"

namespace {

using namespace mems4;
using mems4::cli::kFalsified;
using mems4::cli::kFlagged;
using mems4::cli::kOk;
using mems4::cli::kUsage;

struct Globals {
  std::optional<std::string> config_path;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<unsigned> jobs;
  std::optional<std::size_t> mesh;
  std::optional<double> gamma;
  std::optional<double> tol;
};

struct Resolved {
  RunConfig config;
  std::filesystem::path root;
};

std::mutex out_mutex;

void say(const std::string& line) {
  std::lock_guard lock(out_mutex);
  std::cout << line << '\n' << std::flush;
}

Resolved resolve(const Globals& g, const std::optional<std::string>& dims,
                 const std::optional<std::string>& bc_alpha = {}, const std::optional<std::string>& bc_beta = {}) {
  Resolved r;
  std::optional<std::string> config_dir;
  if (g.config_path) {
    const std::string text = read_file(*g.config_path);
    r.config = run_config_from_json(text);
    const auto j = nlohmann::json::parse(text);
    if (j.contains("output") && j["output"].contains("directory")) config_dir = j["output"]["directory"].get<std::string>();
  }
  RunConfig& c = r.config;
  if (g.format) c.output.format = *g.format;
  if (g.jobs) c.jobs = *g.jobs;
  if (g.mesh) c.grid.n_nodes = *g.mesh;
  if (g.gamma) c.grid.gamma = *g.gamma;
  if (g.tol) c.tol.residual = *g.tol;
  if (dims) c.dimensions = cli::parse_int_list(*dims);
  if (bc_alpha) c.boundary.alpha = parse_rational(*bc_alpha);
  if (bc_beta) c.boundary.beta = parse_rational(*bc_beta);
  c.validate();
  r.root = cli::output_root(g.out, config_dir, std::getenv("MEMS4_OUT"), OutputConfig{}.directory);
  c.output.directory = r.root.string();
  return r;
}

std::string range_tag(int lo, int hi) {
  return lo == hi ? "N" + std::to_string(lo) : "N" + std::to_string(lo) + "-" + std::to_string(hi);
}

std::string fmt(double x, int digits = 10) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

SolverOptions solver_options(const RunConfig& c) {
  SolverOptions o;
  o.tol = c.tol.residual;
  return o;
}

OperatorMatrix make_operator(const RunConfig& c, int n) {
  return assemble_bilaplacian(build_grid(c.grid.n_nodes, c.grid.gamma, Dimension(n)), c.boundary);
}

// bounds ---------------------------------------------------------------------

int cmd_bounds(const Globals& g, const std::string& range) {
  const auto r = cli::parse_int_range(range);
  if (r.lo < 1 || r.hi > 64) throw std::invalid_argument("bounds needs 1 <= nmin <= nmax <= 64");
  Resolved res = resolve(g, std::nullopt);
  res.config.dimensions.clear();
  for (int n = r.lo; n <= r.hi; ++n) res.config.dimensions.push_back(n);
  const auto table = threshold_table(Dimension(r.lo), Dimension(r.hi));
  ResultStore store(res.root, "bounds-" + range_tag(r.lo, r.hi));
  store.write_config(res.config);
  const bool json = res.config.output.format == "json";
  const std::string body = json ? threshold_json(table) : threshold_csv(table);
  const auto path = store.write_table(json ? "bounds.json" : "bounds.csv", body);
  std::cout << body;
  if (!body.empty() && body.back() != '\n') std::cout << '\n';
  say("wrote " + path.string());
  return kOk;
}

// certify --------------------------------------------------------------------

int cmd_certify(const Globals& g, const std::string& claim, const std::string& range) {
  const auto r = cli::parse_int_range(range);
  if (r.lo < 1) throw std::invalid_argument("dimensions start at 1");
  if (claim == "w3-stability" && r.lo < 5) throw std::invalid_argument("w3-stability needs N >= 5");
  Resolved res = resolve(g, std::nullopt);
  res.config.dimensions.clear();
  for (int n = r.lo; n <= r.hi; ++n) res.config.dimensions.push_back(n);
  ResultStore store(res.root, "certify-" + claim + "-" + range_tag(r.lo, r.hi));
  store.write_config(res.config);

  if (claim == "thresholds") {
    const auto table = threshold_table(Dimension(r.lo), Dimension(r.hi));
    const bool json = res.config.output.format == "json";
    store.write_table(json ? "thresholds.json" : "thresholds.csv", json ? threshold_json(table) : threshold_csv(table));
    const Certificate c = certify_thresholds(Dimension(r.lo), Dimension(r.hi));
    store.write_certificate(c);
    auto onset = [](const std::optional<int>& o) { return o ? std::to_string(*o) : std::string("none"); };
    say("onset 2*lambda_bar <= H_N: " + onset(table.onset_regular));
    say("onset 27*lambda_bar <= H_N/2: " + onset(table.onset_hjh));
    say(c.id + ": " + to_string(c.status));
    return cli::exit_code(c.status);
  }

  std::vector<Certificate> certs(static_cast<std::size_t>(r.hi - r.lo + 1));
  cli::parallel_for(certs.size(), res.config.jobs, [&](std::size_t i) {
    const Dimension n(r.lo + static_cast<int>(i));
    if (claim == "hjh") {
      certs[i] = certify_hjh(n);
    } else if (claim == "w2") {
      certs[i] = certify_w2(n);
    } else {
      certs[i] = certify_w3_stability(n);
    }
    store.write_certificate(certs[i]);
  });
  CertStatus overall = CertStatus::verified;
  std::size_t verified = 0;
  for (const auto& c : certs) {
    overall = combine(overall, c.status);
    if (c.status == CertStatus::verified) ++verified;
    std::string line = c.id + ": " + to_string(c.status);
    if (c.witness) line += " witness " + fraction_string(*c.witness);
    say(line);
  }
  say(std::to_string(verified) + "/" + std::to_string(certs.size()) + " verified; certificates in " +
      (store.run_dir() / "certificates").string());
  return cli::exit_code(overall);
}

// branch ---------------------------------------------------------------------

struct BranchArgs {
  std::optional<std::string> dims;
  std::string lambda = "auto";
  int points = 20;
  int profiles = 0;
  std::optional<std::string> bc_alpha, bc_beta;
};

std::vector<std::size_t> profile_indices(std::size_t count, int k) {
  std::vector<std::size_t> out;
  if (count == 0 || k <= 0) return out;
  if (k == 1) return {count - 1};
  for (int j = 0; j < k; ++j) {
    const auto idx = static_cast<std::size_t>(std::llround(static_cast<double>(j) * (count - 1) / (k - 1)));
    if (out.empty() || out.back() != idx) out.push_back(idx);
  }
  return out;
}

std::string lambda_tag(double l) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "lambda-%.9g", l);
  return buf;
}

int run_branch(const Resolved& res, int n, const BranchArgs& a, const cli::LambdaSpec& spec) {
  RunConfig cfg = res.config;
  cfg.dimensions = {n};
  const OperatorMatrix op = make_operator(cfg, n);
  const SolverOptions sopts = solver_options(cfg);
  ResultStore store(res.root, "branch-N" + std::to_string(n));
  store.write_config(cfg);

  std::vector<double> lambdas = spec.values;
  std::optional<PullInEstimate> pie;
  if (spec.automatic) {
    pie = pull_in_voltage(op, cfg.tol.bracket_rel_width, sopts);
    store.write_file("pullin.json", pullin_json(*pie, n));
    for (int i = 1; i <= a.points; ++i) lambdas.push_back(pie->lambda_lo * i / a.points);
  }

  const BranchRun run = continue_branch(op, lambdas, sopts);
  std::vector<std::string> records;
  for (const auto& p : run.points) records.push_back(branch_record(p, n));
  if (run.truncated_at) records.push_back(divergence_record(*run.truncated_at, n));
  store.write_branch(records);
  for (auto i : profile_indices(run.points.size(), a.profiles)) {
    const auto& p = run.points[i];
    store.write_profile(lambda_tag(p.lambda), profile_csv(p.field, cfg.boundary));
  }

  const std::string tag = "N=" + std::to_string(n) + ": ";
  if (run.points.empty() && run.truncated_at) {
    say(tag + "diverged at the first lambda " + fmt(run.truncated_at->lambda) + " (" +
        to_string(run.truncated_at->reason) + ")");
    return kFalsified;
  }
  int code = kOk;
  if (run.truncated_at) {
    say(tag + "branch truncated at lambda " + fmt(run.truncated_at->lambda) + " (" +
        to_string(run.truncated_at->reason) + ")");
    code = kFlagged;
  }
  const DiagnosticsReport d = extremal_diagnostics(op, run.points, pie ? &*pie : nullptr);
  const bool mu1_positive =
      std::all_of(run.points.begin(), run.points.end(), [](const BranchPoint& p) { return p.mu1 > 0; });
  std::string line = tag + std::to_string(run.points.size()) + " records";
  if (!run.points.empty()) line += ", last max u " + fmt(run.points.back().max_value);
  line += mu1_positive ? ", all mu1 > 0" : ", some mu1 <= 0";
  line += d.stability_inequality_holds() ? ", stability inequality holds" : ", stability inequality fails";
  if (d.barrier_checked) line += d.barrier_holds() ? ", below 1 - r^(4/3)" : ", above 1 - r^(4/3) somewhere";
  if (d.touchdown) line += ", touchdown margin " + fmt(d.touchdown->min_margin, 4);
  say(line);
  if (!mu1_positive || !d.stability_inequality_holds() || (d.barrier_checked && !d.barrier_holds())) code = kFlagged;
  say(tag + "wrote " + store.run_dir().string());
  return code;
}

int cmd_branch(const Globals& g, const BranchArgs& a) {
  const Resolved res = resolve(g, a.dims, a.bc_alpha, a.bc_beta);
  const auto spec = cli::parse_lambda_spec(a.lambda);
  if (a.points < 1) throw std::invalid_argument("--points must be >= 1");
  if (a.profiles < 0) throw std::invalid_argument("--profiles must be >= 0");
  std::vector<int> codes(res.config.dimensions.size());
  cli::parallel_for(codes.size(), res.config.jobs,
                    [&](std::size_t i) { codes[i] = run_branch(res, res.config.dimensions[i], a, spec); });
  return *std::max_element(codes.begin(), codes.end());
}

// pullin ---------------------------------------------------------------------

int run_pullin(const Resolved& res, int n, int refinements) {
  RunConfig cfg = res.config;
  cfg.dimensions = {n};
  const SolverOptions sopts = solver_options(cfg);
  ResultStore store(res.root, "pullin-N" + std::to_string(n));
  store.write_config(cfg);

  std::vector<PullInEstimate> estimates;
  GridPtr grid = build_grid(cfg.grid.n_nodes, cfg.grid.gamma, Dimension(n));
  for (int k = 0; k <= refinements; ++k) {
    if (k > 0) grid = std::make_shared<const RadialGrid>(grid->refined());
    const OperatorMatrix op = assemble_bilaplacian(grid, cfg.boundary);
    estimates.push_back(pull_in_voltage(op, cfg.tol.bracket_rel_width, sopts));
    const auto& p = estimates.back();
    const std::string name = k == 0 ? "pullin.json" : "pullin-refined-" + std::to_string(k) + ".json";
    store.write_file(name, pullin_json(p, n));
    say("N=" + std::to_string(n) + " n=" + std::to_string(p.grid_nodes) + ": lambda* in [" + fmt(p.lambda_lo) + ", " +
        fmt(p.lambda_hi) + "], analytic [" + fmt(to_double(p.analytic_lower)) + ", " + fmt(p.analytic_upper) +
        "], near-fold max u " + fmt(p.near_fold.max_value, 6) + (p.consistent ? "" : ", INCONSISTENT") +
        (p.ambiguous ? ", ambiguous oracle" : ""));
  }
  int code = kOk;
  for (const auto& p : estimates) {
    if (!p.consistent || p.ambiguous) code = kFlagged;
  }
  if (refinements > 0) {
    const VerdictReport v = regularity_verdict(estimates, Dimension(n));
    store.write_file("verdict.json", verdict_json(v, n));
    say("N=" + std::to_string(n) + ": verdict " + to_string(v.verdict) + " (known regime " + to_string(v.known) +
        (v.regime_confirmed ? ", confirmed" : ", not confirmed") + ")");
  }
  return code;
}

int cmd_pullin(const Globals& g, const std::optional<std::string>& dims, int refinements,
               const std::optional<std::string>& bc_alpha, const std::optional<std::string>& bc_beta) {
  if (refinements < 0) throw std::invalid_argument("--refinements must be >= 0");
  const Resolved res = resolve(g, dims, bc_alpha, bc_beta);
  std::vector<int> codes(res.config.dimensions.size());
  cli::parallel_for(codes.size(), res.config.jobs,
                    [&](std::size_t i) { codes[i] = run_pullin(res, res.config.dimensions[i], refinements); });
  return *std::max_element(codes.begin(), codes.end());
}

// profile --------------------------------------------------------------------

int cmd_profile(const Globals& g, const std::optional<std::string>& dims, double lambda,
                const std::optional<std::string>& bc_alpha, const std::optional<std::string>& bc_beta) {
  if (!(lambda >= 0)) throw std::invalid_argument("lambda must be >= 0");
  const Resolved res = resolve(g, dims, bc_alpha, bc_beta);
  std::vector<int> codes(res.config.dimensions.size());
  cli::parallel_for(codes.size(), res.config.jobs, [&](std::size_t i) {
    const int n = res.config.dimensions[i];
    RunConfig cfg = res.config;
    cfg.dimensions = {n};
    const OperatorMatrix op = make_operator(cfg, n);
    ResultStore store(res.root, "profile-N" + std::to_string(n));
    store.write_config(cfg);
    const SolveOutcome s = minimal_solution(op, lambda, solver_options(cfg));
    if (const auto* d = std::get_if<DivergenceReport>(&s)) {
      store.write_branch({divergence_record(*d, n)});
      say("N=" + std::to_string(n) + ": diverged at lambda " + fmt(lambda) + " (" + to_string(d->reason) + ")");
      codes[i] = kFalsified;
      return;
    }
    const auto& p = std::get<BranchPoint>(s);
    store.write_branch({branch_record(p, n)});
    const auto path = store.write_profile(lambda_tag(lambda), profile_csv(p.field, cfg.boundary));
    say("N=" + std::to_string(n) + ": max u " + fmt(p.max_value) + ", mu1 " + fmt(p.mu1, 6) + "; wrote " +
        path.string());
    codes[i] = kOk;
  });
  return *std::max_element(codes.begin(), codes.end());
}

// search-subsolution ---------------------------------------------------------

struct SearchArgs {
  int dim = 9;
  std::string family = "remark-phi0";
  std::string alpha = "1:3:9";
  std::string beta = "0.1:2:20";
  std::string m = "3";
  std::string variants = "literal,literal-corrected,slope-matched";
  std::optional<std::string> lambda;
  std::size_t samples = 10000;
};

std::string candidates_csv(const SearchReport& r) {
  std::ostringstream os;
  os << "family,label,boundary,range,subsolution,stability,passes_all\n";
  for (const auto& c : r.candidates) {
    os << c.candidate.family << ',' << c.candidate.label << ',' << to_string(c.boundary.status) << ','
       << to_string(c.range.status) << ',' << to_string(c.subsolution.status) << ',' << to_string(c.stability.status)
       << ',' << (c.passes_all ? "true" : "false") << '\n';
  }
  return os.str();
}

int cmd_search(const Globals& g, const SearchArgs& a) {
  std::vector<Candidate> family;
  std::string tag;
  try {
    if (a.family == "remark-phi0") {
      std::vector<RemarkCoefficient> variants;
      for (std::size_t start = 0; start <= a.variants.size();) {
        const auto pos = a.variants.find(',', start);
        const auto len = (pos == std::string::npos ? a.variants.size() : pos) - start;
        if (len > 0) variants.push_back(remark_coefficient_from_string(a.variants.substr(start, len)));
        if (pos == std::string::npos) break;
        start = pos + 1;
      }
      family = remark_family(cli::parse_grid(a.alpha), cli::parse_grid(a.beta), variants);
    } else if (a.family == "wm") {
      family = wm_family(cli::parse_grid(a.m));
    } else {
      throw std::invalid_argument("unknown family: " + a.family);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "family spec: " << e.what() << '\n';
    return kUsage;
  }
  if (a.dim < 9 || a.dim > 16) {
    std::cerr << "warning: dimension " << a.dim << " is outside 9..16\n";
  }
  Resolved res = resolve(g, std::to_string(a.dim));
  SearchOptions opts;
  opts.samples = a.samples;
  opts.jobs = res.config.jobs;
  std::optional<Rational> lambda;
  if (a.lambda) lambda = parse_rational(*a.lambda);
  const SearchReport rep = subsolution_search(Dimension(a.dim), family, lambda, opts);

  ResultStore store(res.root, "search-" + a.family + "-N" + std::to_string(a.dim));
  store.write_config(res.config);
  store.write_file("report.json", search_report_json(rep));
  store.write_table("candidates.csv", candidates_csv(rep));
  for (const auto& c : rep.candidates) {
    if (c.passes_all) say("passing: " + c.candidate.family + " " + c.candidate.label);
  }
  for (const auto& [name, f] : rep.failures) {
    say(name + ": " + std::to_string(f.first) + " falsified, " + std::to_string(f.second) + " inconclusive");
  }
  say(std::to_string(rep.passing) + "/" + std::to_string(rep.candidates.size()) + " candidates pass all checks at lambda " +
      fraction_string(rep.lambda) + "; wrote " + store.run_dir().string());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial clamped-plate MEMS solver and exact certifier"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "JSON run configuration");
  app.add_option("--out", g.out, "output root (default: $MEMS4_OUT or ./mems4-out)");
  app.add_option("--format", g.format, "table format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--mesh", g.mesh, "interior nodes")->check(CLI::Range(RadialGrid::kMinNodes, std::size_t{1} << 24));
  app.add_option("--gamma", g.gamma, "grading exponent (>= 1)");
  app.add_option("--tol", g.tol, "fixed-point residual tolerance");

  auto* bounds = app.add_subcommand("bounds", "table of the exact bounds and thresholds");
  std::string bounds_range = "1..40";
  bounds->add_option("--n", bounds_range, "dimension range a..b");

  auto* certify = app.add_subcommand("certify", "exact certificates");
  std::string claim;
  std::optional<std::string> certify_range;
  certify->add_option("claim", claim)->required()->check(CLI::IsMember({"hjh", "w2", "w3-stability", "thresholds"}));
  certify->add_option("--n", certify_range, "dimension range a..b (default 1..40 for thresholds, else 17..30)");

  auto* branch = app.add_subcommand("branch", "minimal branch over a lambda sweep");
  BranchArgs ba;
  branch->add_option("--dim", ba.dims, "dimension(s): 3, 2..5 or 2,3,9");
  branch->add_option("--lambda", ba.lambda, "a:b:k, a list, or auto (up to the pull-in bracket)");
  branch->add_option("--points", ba.points, "points for --lambda auto");
  branch->add_option("--profiles", ba.profiles, "dump k equally spaced profiles");
  branch->add_option("--bc-alpha", ba.bc_alpha, "boundary value u(1)");
  branch->add_option("--bc-beta", ba.bc_beta, "boundary slope u'(1)");

  auto* pullin = app.add_subcommand("pullin", "bracket the pull-in voltage");
  std::optional<std::string> pullin_dims, pullin_alpha, pullin_beta;
  int refinements = 0;
  pullin->add_option("--dim", pullin_dims, "dimension(s)");
  pullin->add_option("--refinements", refinements, "extra halvings of the spacing; >= 1 adds a regularity verdict");
  pullin->add_option("--bc-alpha", pullin_alpha, "boundary value u(1)");
  pullin->add_option("--bc-beta", pullin_beta, "boundary slope u'(1)");

  auto* profile = app.add_subcommand("profile", "minimal solution at one lambda");
  std::optional<std::string> profile_dims, profile_alpha, profile_beta;
  double profile_lambda = 0;
  profile->add_option("--dim", profile_dims, "dimension(s)");
  profile->add_option("--lambda", profile_lambda, "lambda")->required();
  profile->add_option("--bc-alpha", profile_alpha, "boundary value u(1)");
  profile->add_option("--bc-beta", profile_beta, "boundary slope u'(1)");

  auto* search = app.add_subcommand("search-subsolution", "exact checks over a candidate family");
  SearchArgs sa;
  search->add_option("--dim", sa.dim, "dimension")->check(CLI::PositiveNumber);
  search->add_option("--family", sa.family, "remark-phi0 or wm");
  search->add_option("--alpha", sa.alpha, "alpha grid a:b:k or list");
  search->add_option("--beta", sa.beta, "beta grid a:b:k or list");
  search->add_option("--m", sa.m, "m grid for the wm family");
  search->add_option("--variants", sa.variants, "coefficient variants, comma separated");
  search->add_option("--lambda", sa.lambda, "lambda (default H_N/2)");
  search->add_option("--samples", sa.samples, "exact samples when a reduction is too large to certify");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*bounds) return cmd_bounds(g, bounds_range);
    if (*certify) return cmd_certify(g, claim, certify_range.value_or(claim == "thresholds" ? "1..40" : "17..30"));
    if (*branch) return cmd_branch(g, ba);
    if (*pullin) return cmd_pullin(g, pullin_dims, refinements, pullin_alpha, pullin_beta);
    if (*profile) return cmd_profile(g, profile_dims, profile_lambda, profile_alpha, profile_beta);
    if (*search) return cmd_search(g, sa);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
