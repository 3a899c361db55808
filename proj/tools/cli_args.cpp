#include "cli_args.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace mems4::cli {

int exit_code(CertStatus s) {
  switch (s) {
    case CertStatus::verified: return kOk;
    case CertStatus::falsified: return kFalsified;
    case CertStatus::inconclusive: return kFlagged;
  }
  return kFlagged;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

int parse_int(std::string_view s) {
  s = trim(s);
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) {
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

IntRange parse_int_range(std::string_view text) {
  const auto pos = text.find("..");
  IntRange r;
  if (pos == std::string_view::npos) {
    r.lo = r.hi = parse_int(text);
  } else {
    r.lo = parse_int(text.substr(0, pos));
    r.hi = parse_int(text.substr(pos + 2));
  }
  if (r.lo > r.hi) throw std::invalid_argument("empty range: " + std::string(text));
  return r;
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  for (auto part : split(text, ',')) {
    const auto r = parse_int_range(part);
    for (int n = r.lo; n <= r.hi; ++n) out.push_back(n);
  }
  return out;
}

std::vector<Rational> parse_grid(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw std::invalid_argument("empty grid");
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw std::invalid_argument("grid must be a:b:k: " + std::string(text));
    const Rational a = parse_rational(trim(parts[0]));
    const Rational b = parse_rational(trim(parts[1]));
    const int k = parse_int(parts[2]);
    if (k < 0) throw std::invalid_argument("negative point count: " + std::string(text));
    std::vector<Rational> out;
    if (k == 0) return out;
    if (k == 1) return {a};
    for (int i = 0; i < k; ++i) out.push_back(Rational(a + (b - a) * make_rational(i, k - 1)));
    return out;
  }
  std::vector<Rational> out;
  for (auto part : split(text, ',')) out.push_back(parse_rational(trim(part)));
  return out;
}

LambdaSpec parse_lambda_spec(std::string_view text) {
  LambdaSpec s;
  if (trim(text) == "auto") {
    s.automatic = true;
    return s;
  }
  for (const auto& q : parse_grid(text)) s.values.push_back(to_double(q));
  if (!std::is_sorted(s.values.begin(), s.values.end())) {
    throw std::invalid_argument("lambda values must be nondecreasing");
  }
  for (double l : s.values) {
    if (l < 0) throw std::invalid_argument("lambda must be >= 0");
  }
  return s;
}

std::filesystem::path output_root(const std::optional<std::string>& flag, const std::optional<std::string>& from_config,
                                  const char* env, const std::string& fallback) {
  if (flag) return *flag;
  if (from_config) return *from_config;
  if (env && *env) return env;
  return fallback;
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex m;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(m);
        if (!first) first = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < n; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace mems4::cli
