#include <doctest.h>

#include "mems4/subsolution.hpp"

using namespace mems4;

TEST_CASE("w_3 passes every check at N = 17, lambda = H_N / 2") {
  const SearchReport r = subsolution_search(Dimension(17), wm_family({Rational(3)}));
  REQUIRE(r.candidates.size() == 1);
  CHECK(r.lambda == hardy_constant(Dimension(17)) / 2);
  CHECK(r.passing == 1);
  const auto& c = r.candidates[0];
  CHECK(c.boundary.status == CertStatus::verified);
  CHECK(c.range.status == CertStatus::verified);
  CHECK(c.subsolution.status == CertStatus::verified);
  CHECK(c.stability.status == CertStatus::verified);
  CHECK_FALSE(r.in_open_range);
  CHECK(replay(c.subsolution).ok);
}

TEST_CASE("coefficient variants") {
  const Rational alpha(2), beta(1, 2);
  const Candidate lit = remark_candidate(alpha, beta, RemarkCoefficient::literal);
  CHECK(lit.w.value_at_one() == 0);
  CHECK(lit.w.derivative().value_at_one() != 0);

  const Candidate cor = remark_candidate(alpha, beta, RemarkCoefficient::literal_corrected);
  CHECK(cor.w.value_at_one() == 0);
  CHECK(cor.w.derivative().value_at_one() == 0);
  CHECK(cor.w.coefficient(0) == 1);

  const Candidate slope = remark_candidate(alpha, beta, RemarkCoefficient::slope_matched);
  CHECK(slope.w.derivative().value_at_one() == 0);

  // At alpha = 4/3 the slope-matched perturbation is w_m with m = 4/3 + beta.
  CHECK(remark_candidate(Rational(4, 3), Rational(5, 3), RemarkCoefficient::slope_matched).w == w_m(3));

  // beta = 1 makes every variant the same function.
  const Rational one(1);
  CHECK(remark_candidate(alpha, one, RemarkCoefficient::literal).w ==
        remark_candidate(alpha, one, RemarkCoefficient::slope_matched).w);

  for (auto v : {RemarkCoefficient::literal, RemarkCoefficient::literal_corrected, RemarkCoefficient::slope_matched}) {
    CHECK(remark_coefficient_from_string(to_string(v)) == v);
  }
  CHECK_THROWS_AS(remark_coefficient_from_string("other"), std::invalid_argument);
  CHECK_THROWS_AS(remark_candidate(0, 1, RemarkCoefficient::literal), std::invalid_argument);
}

TEST_CASE("literal variant off beta = 1 fails the boundary check") {
  const SearchReport r =
      subsolution_search(Dimension(9), remark_family({Rational(2)}, {Rational(1, 2)}, {RemarkCoefficient::literal}));
  REQUIRE(r.candidates.size() == 1);
  CHECK(r.candidates[0].boundary.status == CertStatus::falsified);
  CHECK_FALSE(r.candidates[0].passes_all);
}

TEST_CASE("small N = 9 grid has no passing candidate") {
  SearchOptions o;
  o.jobs = 2;
  o.samples = 2000;
  const SearchReport r = subsolution_search(Dimension(9), remark_family({Rational(1), Rational(2)}, {Rational(1, 2), Rational(1)}),
                                            std::nullopt, o);
  CHECK(r.candidates.size() == 12);
  CHECK(r.passing == 0);
  CHECK(r.in_open_range);
}

TEST_CASE("empty family") {
  const SearchReport r = subsolution_search(Dimension(12), {});
  CHECK(r.candidates.empty());
  CHECK(r.passing == 0);
}

TEST_CASE("search is deterministic across job counts") {
  const auto fam = remark_family({Rational(3, 2)}, {Rational(1, 5), Rational(3, 5)});
  SearchOptions one, four;
  four.jobs = 4;
  const auto a = subsolution_search(Dimension(10), fam, std::nullopt, one);
  const auto b = subsolution_search(Dimension(10), fam, std::nullopt, four);
  REQUIRE(a.candidates.size() == b.candidates.size());
  for (std::size_t i = 0; i < a.candidates.size(); ++i) {
    CHECK(to_json(a.candidates[i].subsolution) == to_json(b.candidates[i].subsolution));
  }
}
