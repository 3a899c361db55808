#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mems4/certificate.hpp"
#include "mems4/rational.hpp"

namespace mems4::cli {

enum ExitCode : int { kOk = 0, kFalsified = 1, kFlagged = 2, kUsage = 3 };

int exit_code(CertStatus s);

struct IntRange {
  int lo = 0;
  int hi = 0;
};

/// "17..30", "17" or "3,5,9" (the last only via parse_int_list).
IntRange parse_int_range(std::string_view text);
std::vector<int> parse_int_list(std::string_view text);

/// "a:b:k" is k points from a to b inclusive (k = 0 gives none, k = 1 gives
/// a), "x,y,z" is an explicit list, a single number is a one-point grid.
/// Entries are exact decimals or fractions. Throws std::invalid_argument.
std::vector<Rational> parse_grid(std::string_view text);

struct LambdaSpec {
  bool automatic = false;
  std::vector<double> values;
};

/// "auto" or a grid as above.
LambdaSpec parse_lambda_spec(std::string_view text);

/// --out beats the config file, which beats MEMS4_OUT, which beats the default.
std::filesystem::path output_root(const std::optional<std::string>& flag, const std::optional<std::string>& from_config,
                                  const char* env, const std::string& fallback);

/// Runs fn(0..count-1) on at most `jobs` threads. The first exception thrown
/// by any item is rethrown after every thread has joined.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace mems4::cli
