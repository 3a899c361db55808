#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mems4/branch.hpp"
#include "mems4/certificate.hpp"
#include "mems4/certify.hpp"
#include "mems4/subsolution.hpp"

namespace mems4 {

inline constexpr int kSchemaVersion = 1;

struct GridConfig {
  std::size_t n_nodes = 1024;
  double gamma = 1.5;
};

struct Tolerances {
  double residual = 1e-10;
  double bracket_rel_width = 1e-10;
};

struct OutputConfig {
  std::string directory = "mems4-out";
  /// "json" or "csv" for tables.
  std::string format = "csv";
};

struct RunConfig {
  std::vector<int> dimensions{3};
  BoundaryPair boundary;
  GridConfig grid;
  Tolerances tol;
  OutputConfig output;
  unsigned jobs = 1;

  /// Throws std::invalid_argument on inadmissible boundary data, grid size
  /// below RadialGrid::kMinNodes, gamma < 1, non-positive tolerances, empty
  /// or invalid dimensions, or an unknown format.
  void validate() const;
};

std::string to_json(const RunConfig& c);
RunConfig run_config_from_json(std::string_view text);

/// Writes to a temporary sibling and renames it over `path`, so readers
/// never see a partial file. Creates parent directories. Throws
/// std::runtime_error on I/O failure.
void write_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// One JSON Lines record (no trailing newline).
std::string branch_record(const BranchPoint& p, int dimension);
std::string divergence_record(const DivergenceReport& d, int dimension);

/// Two columns r,u with a header row; the boundary node r = 1 is included.
std::string profile_csv(const RadialField& f, const BoundaryPair& bp);

std::string pullin_json(const PullInEstimate& p, int dimension);
std::string verdict_json(const VerdictReport& v, int dimension);

/// Columns: N, L1, lambda_bar, H_N, H_N/2, 27 lambda_bar and both threshold
/// booleans. Rationals appear as fraction and 17-digit decimal.
std::string threshold_csv(const ThresholdTable& t);
std::string threshold_json(const ThresholdTable& t);

std::string search_report_json(const SearchReport& r);

/// One subdirectory per run under the output root:
///   config.json, branch.jsonl, profiles/*.csv, certificates/*.json, tables/*
class ResultStore {
 public:
  ResultStore(std::filesystem::path root, std::string run_name);

  const std::filesystem::path& run_dir() const { return dir_; }

  std::filesystem::path write_config(const RunConfig& c) const;
  std::filesystem::path write_branch(const std::vector<std::string>& records) const;
  std::filesystem::path write_profile(const std::string& name, const std::string& csv) const;
  std::filesystem::path write_certificate(const Certificate& c) const;
  std::filesystem::path write_table(const std::string& name, const std::string& content) const;
  std::filesystem::path write_file(const std::string& relative, const std::string& content) const;

 private:
  std::filesystem::path dir_;
};

/// Certificate ids may contain spaces and '/'; this maps them to file names.
std::string file_stem(std::string_view id);

}  // namespace mems4
