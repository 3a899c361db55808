#include "mems4/serialize.hpp"

#include <unistd.h>

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mems4 {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

ordered_json rational_json(const Rational& q) { return {{"fraction", fraction_string(q)}, {"decimal", decimal_string(q)}}; }

// NaN and infinities are not JSON numbers; emit null.
ordered_json number(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

std::string dbl(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void RunConfig::validate() const {
  if (dimensions.empty()) throw std::invalid_argument("no dimensions given");
  for (int n : dimensions) {
    if (n < 1 || n > 64) throw std::invalid_argument("dimension out of range 1..64: " + std::to_string(n));
  }
  if (!is_admissible(boundary)) throw std::invalid_argument("boundary pair is not admissible (need beta <= 0, alpha - beta/2 < 1)");
  if (grid.n_nodes < RadialGrid::kMinNodes) {
    throw std::invalid_argument("mesh must have at least " + std::to_string(RadialGrid::kMinNodes) + " nodes");
  }
  if (!(grid.gamma >= 1.0) || !std::isfinite(grid.gamma)) throw std::invalid_argument("grading exponent must be >= 1");
  if (!(tol.residual > 0.0)) throw std::invalid_argument("residual tolerance must be positive");
  if (!(tol.bracket_rel_width > 0.0)) throw std::invalid_argument("bracket width must be positive");
  if (output.format != "csv" && output.format != "json") throw std::invalid_argument("format must be csv or json");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
}

std::string to_json(const RunConfig& c) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["dimensions"] = c.dimensions;
  j["boundary"] = {{"alpha", fraction_string(c.boundary.alpha)}, {"beta", fraction_string(c.boundary.beta)}};
  j["grid"] = {{"n_nodes", c.grid.n_nodes}, {"gamma", c.grid.gamma}};
  j["tolerances"] = {{"residual", c.tol.residual}, {"bracket_rel_width", c.tol.bracket_rel_width}};
  j["output"] = {{"directory", c.output.directory}, {"format", c.output.format}};
  j["jobs"] = c.jobs;
  return j.dump(2) + "\n";
}

RunConfig run_config_from_json(std::string_view text) {
  RunConfig c;
  try {
    const auto j = ordered_json::parse(text);
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != kSchemaVersion) {
      throw std::invalid_argument("unsupported config schema version");
    }
    if (j.contains("dimensions")) c.dimensions = j.at("dimensions").get<std::vector<int>>();
    if (j.contains("boundary")) {
      const auto& b = j.at("boundary");
      auto rat = [](const ordered_json& x) -> Rational {
        return x.is_string() ? parse_rational(x.get<std::string>()) : from_double(x.get<double>());
      };
      if (b.contains("alpha")) c.boundary.alpha = rat(b.at("alpha"));
      if (b.contains("beta")) c.boundary.beta = rat(b.at("beta"));
    }
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      if (g.contains("n_nodes")) c.grid.n_nodes = g.at("n_nodes").get<std::size_t>();
      if (g.contains("gamma")) c.grid.gamma = g.at("gamma").get<double>();
    }
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      if (t.contains("residual")) c.tol.residual = t.at("residual").get<double>();
      if (t.contains("bracket_rel_width")) c.tol.bracket_rel_width = t.at("bracket_rel_width").get<double>();
    }
    if (j.contains("output")) {
      const auto& o = j.at("output");
      if (o.contains("directory")) c.output.directory = o.at("directory").get<std::string>();
      if (o.contains("format")) c.output.format = o.at("format").get<std::string>();
    }
    if (j.contains("jobs")) c.jobs = j.at("jobs").get<unsigned>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed config: ") + e.what());
  }
  return c;
}

void write_atomic(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  static std::atomic<unsigned long> counter{0};
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot rename onto " + path.string());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string branch_record(const BranchPoint& p, int dimension) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "point";
  j["dimension"] = dimension;
  j["lambda"] = p.lambda;
  j["max_u"] = p.max_value;
  j["mu1"] = number(p.mu1);
  j["residual"] = p.residual;
  j["energy_h2"] = number(p.energy_h2);
  j["energy_cubed"] = number(p.energy_cubed);
  j["monotone_iterations"] = p.monotone_iterations;
  j["newton_iterations"] = p.newton_iterations;
  j["nodes"] = p.field.values.size();
  return j.dump();
}

std::string divergence_record(const DivergenceReport& d, int dimension) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "divergence";
  j["dimension"] = dimension;
  j["lambda"] = d.lambda;
  j["reason"] = to_string(d.reason);
  j["iterations"] = d.iterations;
  j["last_max_u"] = number(d.last_iterate.values.empty() ? 0.0 : d.last_iterate.max());
  j["detail"] = d.detail;
  return j.dump();
}

std::string profile_csv(const RadialField& f, const BoundaryPair& bp) {
  std::string out = "r,u\n";
  const auto nodes = f.grid->nodes();
  for (std::size_t i = 0; i < f.values.size(); ++i) out += dbl(nodes[i]) + "," + dbl(f.values[i]) + "\n";
  out += "1," + dbl(to_double(bp.alpha)) + "\n";
  return out;
}

std::string pullin_json(const PullInEstimate& p, int dimension) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["dimension"] = dimension;
  j["method"] = to_string(p.method);
  j["lambda_lo"] = p.lambda_lo;
  j["lambda_hi"] = p.lambda_hi;
  j["analytic_lower"] = rational_json(p.analytic_lower);
  j["analytic_upper"] = p.analytic_upper;
  j["nu1"] = p.nu1;
  j["consistent"] = p.consistent;
  j["ambiguous"] = p.ambiguous;
  j["grid"] = {{"n_nodes", p.grid_nodes}, {"gamma", p.grid_gamma}};
  j["near_fold"] = {{"lambda", p.near_fold.lambda},
                    {"max_u", p.near_fold.max_value},
                    {"mu1", number(p.near_fold.mu1)},
                    {"residual", p.near_fold.residual}};
  return j.dump(2) + "\n";
}

std::string verdict_json(const VerdictReport& v, int dimension) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["dimension"] = dimension;
  j["verdict"] = to_string(v.verdict);
  j["known_regime"] = to_string(v.known);
  j["confirmed"] = v.regime_confirmed;
  j["below_hardy_half"] = v.below_hardy_half;
  j["near_fold_max"] = v.near_fold_max;
  j["detail"] = v.detail;
  return j.dump(2) + "\n";
}

std::string threshold_csv(const ThresholdTable& t) {
  std::ostringstream os;
  os << "N,L1,L1_decimal,lambda_bar,lambda_bar_decimal,H_N,H_N_decimal,half_H_N,half_H_N_decimal,"
        "twentyseven_lambda_bar,twentyseven_lambda_bar_decimal,two_lambda_bar_le_H_N,twentyseven_lambda_bar_le_half_H_N,"
        "lambda_bar_positive\n";
  auto cell = [&](const Rational& q) { os << fraction_string(q) << "," << decimal_string(q) << ","; };
  for (const auto& r : t.rows) {
    os << r.n << ",";
    cell(r.classical_lower);
    cell(r.lambda_bar);
    cell(r.hardy);
    cell(r.half_hardy);
    cell(r.twentyseven_lambda_bar);
    os << (r.regular_threshold ? "true" : "false") << "," << (r.hjh_threshold ? "true" : "false") << ","
       << (r.lambda_bar_positive ? "true" : "false") << "\n";
  }
  return os.str();
}

std::string threshold_json(const ThresholdTable& t) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["onset_two_lambda_bar_le_H_N"] = t.onset_regular ? ordered_json(*t.onset_regular) : ordered_json(nullptr);
  j["onset_twentyseven_lambda_bar_le_half_H_N"] = t.onset_hjh ? ordered_json(*t.onset_hjh) : ordered_json(nullptr);
  ordered_json rows = ordered_json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"N", r.n},
                    {"L1", rational_json(r.classical_lower)},
                    {"lambda_bar", rational_json(r.lambda_bar)},
                    {"H_N", rational_json(r.hardy)},
                    {"half_H_N", rational_json(r.half_hardy)},
                    {"twentyseven_lambda_bar", rational_json(r.twentyseven_lambda_bar)},
                    {"two_lambda_bar_le_H_N", r.regular_threshold},
                    {"twentyseven_lambda_bar_le_half_H_N", r.hjh_threshold},
                    {"lambda_bar_positive", r.lambda_bar_positive}});
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string search_report_json(const SearchReport& r) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["dimension"] = r.dimension;
  j["lambda"] = rational_json(r.lambda);
  j["in_open_range"] = r.in_open_range;
  j["candidates_checked"] = r.candidates.size();
  j["passing"] = r.passing;
  j["notes"] = r.notes;
  ordered_json fails = ordered_json::object();
  for (const auto& [name, counts] : r.failures) fails[name] = {{"falsified", counts.first}, {"inconclusive", counts.second}};
  j["failure_summary"] = std::move(fails);
  ordered_json cands = ordered_json::array();
  for (const auto& c : r.candidates) {
    ordered_json x;
    x["family"] = c.candidate.family;
    x["label"] = c.candidate.label;
    ordered_json params = ordered_json::object();
    for (const auto& [k, v] : c.candidate.params) params[k] = fraction_string(v);
    x["params"] = std::move(params);
    x["w"] = c.candidate.w.to_string("r");
    x["passes_all"] = c.passes_all;
    auto check = [](const Certificate& cert) {
      ordered_json y;
      y["status"] = to_string(cert.status);
      y["witness"] = cert.witness ? ordered_json(fraction_string(*cert.witness)) : ordered_json(nullptr);
      y["variable"] = cert.claim.variable;
      y["reduction"] = cert.claim.reduction;
      std::vector<std::string> notes = cert.notes;
      for (const auto& s : cert.trail) {
        if (s.kind == "inconclusive") notes.push_back(s.note);
      }
      y["notes"] = notes;
      return y;
    };
    x["boundary"] = check(c.boundary);
    x["range"] = check(c.range);
    x["subsolution"] = check(c.subsolution);
    x["stability"] = check(c.stability);
    cands.push_back(std::move(x));
  }
  j["candidates"] = std::move(cands);
  return j.dump(2) + "\n";
}

std::string file_stem(std::string_view id) {
  std::string out;
  for (char ch : id) {
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.') {
      out += ch;
    } else if (ch == '/') {
      out += "_";
    } else if (ch == ' ' || ch == '=') {
      out += "-";
    }
  }
  return out.empty() ? "certificate" : out;
}

ResultStore::ResultStore(fs::path root, std::string run_name) : dir_(std::move(root) / run_name) {}

fs::path ResultStore::write_file(const std::string& relative, const std::string& content) const {
  const fs::path p = dir_ / relative;
  write_atomic(p, content);
  return p;
}

fs::path ResultStore::write_config(const RunConfig& c) const { return write_file("config.json", to_json(c)); }

fs::path ResultStore::write_branch(const std::vector<std::string>& records) const {
  std::string out;
  for (const auto& r : records) out += r + "\n";
  return write_file("branch.jsonl", out);
}

fs::path ResultStore::write_profile(const std::string& name, const std::string& csv) const {
  return write_file("profiles/" + name + ".csv", csv);
}

fs::path ResultStore::write_certificate(const Certificate& c) const {
  return write_file("certificates/" + file_stem(c.id) + ".json", to_json(c) + "\n");
}

fs::path ResultStore::write_table(const std::string& name, const std::string& content) const {
  return write_file("tables/" + name, content);
}

}  // namespace mems4
