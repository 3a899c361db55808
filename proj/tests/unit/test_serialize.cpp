#include <doctest.h>

#include <json.hpp>

#include <filesystem>

#include "mems4/serialize.hpp"

using namespace mems4;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mems4-test-" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("run config round trip") {
  RunConfig c;
  c.dimensions = {2, 9, 17};
  c.boundary = {Rational(1, 7), Rational(-2, 3)};
  c.grid = {513, 1.25};
  c.tol = {1e-11, 1e-7};
  c.output = {"somewhere", "json"};
  c.jobs = 3;
  const std::string text = to_json(c);
  const RunConfig back = run_config_from_json(text);
  CHECK(to_json(back) == text);
  CHECK(back.boundary.alpha == Rational(1, 7));
  CHECK(back.grid.gamma == 1.25);
  CHECK_NOTHROW(back.validate());
}

TEST_CASE("run config accepts partial documents and decimals") {
  const RunConfig c = run_config_from_json(R"({"dimensions":[3],"boundary":{"alpha":"0.1","beta":-0.5}})");
  CHECK(c.boundary.alpha == Rational(1, 10));
  CHECK(c.boundary.beta == Rational(-1, 2));
  CHECK(c.grid.n_nodes == GridConfig{}.n_nodes);
}

TEST_CASE("run config validation") {
  auto bad = [](auto mutate) {
    RunConfig c;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  };
  bad([](RunConfig& c) { c.dimensions.clear(); });
  bad([](RunConfig& c) { c.dimensions = {0}; });
  bad([](RunConfig& c) { c.dimensions = {65}; });
  bad([](RunConfig& c) { c.boundary.alpha = 2; });
  bad([](RunConfig& c) { c.boundary.beta = 1; });
  bad([](RunConfig& c) { c.grid.n_nodes = 4; });
  bad([](RunConfig& c) { c.grid.gamma = 0.9; });
  bad([](RunConfig& c) { c.tol.residual = 0; });
  bad([](RunConfig& c) { c.tol.bracket_rel_width = -1; });
  bad([](RunConfig& c) { c.output.format = "xml"; });
  bad([](RunConfig& c) { c.jobs = 0; });
  CHECK_THROWS_AS(run_config_from_json("{"), std::invalid_argument);
  CHECK_THROWS_AS(run_config_from_json(R"({"schema_version": 99})"), std::invalid_argument);
  CHECK_THROWS_AS(run_config_from_json(R"({"grid": {"n_nodes": "many"}})"), std::invalid_argument);
}

TEST_CASE("atomic writes create directories and leave no temporaries") {
  const fs::path dir = scratch_dir("atomic");
  const fs::path f = dir / "a" / "b" / "file.txt";
  write_atomic(f, "first");
  write_atomic(f, "second");
  CHECK(read_file(f) == "second");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(f.parent_path())) ++entries;
  CHECK(entries == 1);
  CHECK_THROWS_AS(read_file(dir / "missing"), std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("branch records and profiles") {
  const OperatorMatrix op = assemble_bilaplacian(build_grid(32, 1.5, Dimension(3)));
  const auto s = minimal_solution(op, 2.0);
  REQUIRE(converged(s));
  const auto& p = std::get<BranchPoint>(s);
  const auto j = nlohmann::json::parse(branch_record(p, 3));
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["lambda"] == 2.0);
  for (const char* key : {"max_u", "mu1", "residual", "energy_h2", "energy_cubed"}) CHECK(j.contains(key));

  const std::string csv = profile_csv(p.field, {});
  CHECK(csv.rfind("r,u\n", 0) == 0);
  CHECK(csv.find("\n1,0\n") != std::string::npos);
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 34);

  DivergenceReport d;
  d.lambda = 99;
  d.reason = DivergenceReason::touchdown;
  const auto k = nlohmann::json::parse(divergence_record(d, 3));
  CHECK(k["kind"] == "divergence");
  CHECK(k["reason"] == to_string(DivergenceReason::touchdown));
}

TEST_CASE("tables carry both fraction and decimal") {
  const ThresholdTable t = threshold_table(Dimension(1), Dimension(6));
  const std::string csv = threshold_csv(t);
  CHECK(csv.rfind("N,L1,", 0) == 0);
  CHECK(csv.find("5,416/27,15.407407407407407") != std::string::npos);
  CHECK(csv.find("-64/81") != std::string::npos);
  const auto j = nlohmann::json::parse(threshold_json(t));
  CHECK(j["rows"].size() == 6);
  CHECK(j["rows"][3]["H_N"]["fraction"] == "0/1");
  CHECK(j["schema_version"] == kSchemaVersion);
}

TEST_CASE("result store layout and determinism") {
  const fs::path root = scratch_dir("store");
  const ResultStore store(root, "run");
  RunConfig c;
  const auto cfg = store.write_config(c);
  const Certificate cert = certify_hjh(Dimension(20));
  const auto path = store.write_certificate(cert);
  CHECK(path == root / "run" / "certificates" / "hjh-N20.json");
  CHECK(store.write_profile("p", "r,u\n") == root / "run" / "profiles" / "p.csv");
  CHECK(store.write_table("t.csv", "x\n") == root / "run" / "tables" / "t.csv");
  const std::string first = read_file(path);
  store.write_certificate(certify_hjh(Dimension(20)));
  CHECK(read_file(path) == first);
  CHECK(nlohmann::json::parse(read_file(cfg))["schema_version"] == kSchemaVersion);
  CHECK(nlohmann::json::parse(first)["schema_version"] == kCertificateSchemaVersion);
  fs::remove_all(root);
}

TEST_CASE("file stems") {
  CHECK(file_stem("hjh-N17") == "hjh-N17");
  CHECK(file_stem("wm m=3/2 boundary") == "wm-m-3_2-boundary");
  CHECK(file_stem("***") == "certificate");
}

TEST_CASE("search report JSON") {
  const SearchReport r = subsolution_search(Dimension(17), wm_family({Rational(3)}));
  const auto j = nlohmann::json::parse(search_report_json(r));
  CHECK(j["passing"] == 1);
  CHECK(j["candidates"][0]["subsolution"]["status"] == "verified");
  CHECK(j["lambda"]["fraction"] == "48841/32");
}
