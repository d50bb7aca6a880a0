#include <catch2/catch_amalgamated.hpp>

#include "msplit/instance.hpp"
#include "test_support.hpp"

using msplit::Instance;
using msplit::Solution;

TEST_CASE("parse: smallest well-formed file", "[instance]") {
  const Instance inst = msplit::parse_instance(std::string("1 2\n1 1 1\n"));
  CHECK(inst.m == 1);
  CHECK(inst.n == 2);
  CHECK(inst.A == std::vector<std::vector<long long>>{{1, 1}});
  CHECK(inst.d == std::vector<long long>{1});
  CHECK(inst.l == std::vector<long long>{0, 0});
  CHECK(inst.r == std::vector<long long>{1, 1});
}

TEST_CASE("parse: bounds line", "[instance]") {
  const Instance inst = msplit::parse_instance(std::string("2 3\n1 2 3 4\n5 6 7 8\nr: 2 2 2\n"));
  CHECK(inst.r == std::vector<long long>{2, 2, 2});
  CHECK(inst.l == std::vector<long long>{0, 0, 0});
  CHECK(inst.d == std::vector<long long>{4, 8});
}

TEST_CASE("parse: malformed inputs", "[instance]") {
  using msplit::ParseError;
  // row with too few numbers
  CHECK_THROWS_MATCHES(msplit::parse_instance(std::string("1 2\n1 1\n")), ParseError,
                       Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("line 2")));
  CHECK_THROWS_AS(msplit::parse_instance(std::string("")), ParseError);
  CHECK_THROWS_AS(msplit::parse_instance(std::string("2 2\n1 1 1\n")), ParseError);  // missing row
  CHECK_THROWS_AS(msplit::parse_instance(std::string("1 1\nx 1\n")), ParseError);
  CHECK_THROWS_AS(msplit::parse_instance(std::string("1 1\n9223372036854775808 1\n")), ParseError);
  CHECK_THROWS_AS(msplit::parse_instance(std::string("1 1\n1 1\nl: 2\nr: 1\n")), ParseError);  // l > r
  CHECK_THROWS_AS(msplit::parse_instance(std::string("1 1\n1 1\nl: 0\nl: 0\n")), ParseError);  // duplicate
  CHECK_THROWS_AS(msplit::parse_instance(std::string("1 1\n1 1\n1 1\n")), ParseError);  // trailing junk
}

TEST_CASE("parse: comments and blank lines ignored", "[instance]") {
  const Instance inst =
      msplit::parse_instance(std::string("# header\n\n1 2   # dims\n1 1 1\n\n# trailing\n"));
  CHECK(inst.m == 1);
  CHECK(inst.n == 2);
}

TEST_CASE("serialize/parse round trip", "[instance]") {
  msplit::SplitMix64 rng(7);
  for (int iter = 0; iter < 50; ++iter) {
    Instance inst;
    inst.m = 1 + static_cast<int>(rng.below(3));
    inst.n = 1 + static_cast<int>(rng.below(6));
    inst.A.assign(inst.m, std::vector<long long>(inst.n));
    inst.d.assign(inst.m, 0);
    inst.l.assign(inst.n, 0);
    inst.r.assign(inst.n, 1);
    for (auto& row : inst.A)
      for (auto& a : row) a = static_cast<long long>(rng.below(2001)) - 1000;
    for (auto& v : inst.d) v = static_cast<long long>(rng.below(2001)) - 1000;
    for (int j = 0; j < inst.n; ++j) {
      inst.l[j] = static_cast<long long>(rng.below(7)) - 3;
      inst.r[j] = inst.l[j] + static_cast<long long>(rng.below(5));
    }
    const Instance back = msplit::parse_instance(msplit::serialize_instance(inst));
    CHECK(back.A == inst.A);
    CHECK(back.d == inst.d);
    CHECK(back.l == inst.l);
    CHECK(back.r == inst.r);
  }
}

TEST_CASE("generate: shape and entry range", "[instance]") {
  const Instance inst = msplit::generate_cd(3, 50, 123, false);
  CHECK(inst.m == 3);
  CHECK(inst.n == 20);  // n = 10(m-1)
  for (const auto& row : inst.A)
    for (long long a : row) {
      CHECK(a >= 0);
      CHECK(a < 50);
    }
  CHECK(inst.l == std::vector<long long>(20, 0));
  CHECK(inst.r == std::vector<long long>(20, 1));
}

TEST_CASE("generate: rhs is the floored half row sum", "[instance]") {
  for (std::uint64_t seed : {1ULL, 2ULL, 42ULL}) {
    const Instance inst = msplit::generate_cd(4, 100, seed, false);
    for (int i = 0; i < inst.m; ++i) {
      long long sum = 0;
      for (long long a : inst.A[i]) sum += a;
      CHECK(inst.d[i] == sum / 2);        // floor((3+5+8)/2) = 8 style rule
      CHECK(2 * inst.d[i] <= sum);
      CHECK(sum <= 2 * inst.d[i] + 1);
    }
  }
}

TEST_CASE("generate: determinism", "[instance]") {
  const auto a = msplit::serialize_instance(msplit::generate_cd(3, 50, 9, false));
  const auto b = msplit::serialize_instance(msplit::generate_cd(3, 50, 9, false));
  CHECK(a == b);
  const auto c = msplit::serialize_instance(msplit::generate_cd(3, 50, 10, false));
  CHECK(a != c);
}

TEST_CASE("generate: planted instances are feasible", "[instance]") {
  Solution xstar;
  const Instance inst = msplit::generate_cd(4, 100, 7, true, &xstar);
  REQUIRE(static_cast<int>(xstar.size()) == inst.n);
  CHECK(msplit::verify_solution(inst, xstar));
  long long ones = 0;
  for (long long v : xstar) ones += v;
  CHECK(ones == inst.n / 2);
}

TEST_CASE("generate: preconditions", "[instance]") {
  CHECK_THROWS_AS(msplit::generate_cd(1, 50, 0, false), std::invalid_argument);
  CHECK_THROWS_AS(msplit::generate_cd(3, 0, 0, false), std::invalid_argument);
}

TEST_CASE("normalize: identity when l = 0", "[instance]") {
  const Instance inst = test_support::make_instance({{1, 1}}, {1});
  const auto norm = msplit::normalize_bounds(inst);
  CHECK(norm.inst.A == inst.A);
  CHECK(norm.inst.d == inst.d);
  CHECK(norm.inst.r == inst.r);
  CHECK(norm.shift == std::vector<long long>{0, 0});
}

TEST_CASE("normalize: 1-D substitution", "[instance]") {
  const Instance inst = test_support::make_instance({{2}}, {6}, {1}, {3});
  const auto norm = msplit::normalize_bounds(inst);
  CHECK(norm.inst.d == std::vector<long long>{4});
  CHECK(norm.inst.r == std::vector<long long>{2});
  CHECK(norm.inst.l == std::vector<long long>{0});
  CHECK(norm.shift == std::vector<long long>{1});
  // x' = 2 solves the normalized system and maps back to x = 3
  CHECK(msplit::verify_solution(norm.inst, {2}));
  CHECK(msplit::verify_solution(inst, {2 + norm.shift[0]}));
}

TEST_CASE("normalize: every normalized solution maps back", "[instance]") {
  msplit::SplitMix64 rng(99);
  for (int iter = 0; iter < 20; ++iter) {
    Instance inst;
    inst.m = 1 + static_cast<int>(rng.below(2));
    inst.n = 2 + static_cast<int>(rng.below(3));
    inst.A.assign(inst.m, std::vector<long long>(inst.n));
    inst.l.assign(inst.n, 0);
    inst.r.assign(inst.n, 0);
    for (auto& row : inst.A)
      for (auto& a : row) a = static_cast<long long>(rng.below(9)) - 4;
    for (int j = 0; j < inst.n; ++j) {
      inst.l[j] = static_cast<long long>(rng.below(5)) - 2;
      inst.r[j] = inst.l[j] + static_cast<long long>(rng.below(3));
    }
    // pick d so at least one point is inside the box
    std::vector<long long> x0(inst.n);
    for (int j = 0; j < inst.n; ++j)
      x0[j] = inst.l[j] + static_cast<long long>(rng.below(inst.r[j] - inst.l[j] + 1));
    inst.d.assign(inst.m, 0);
    for (int i = 0; i < inst.m; ++i)
      for (int j = 0; j < inst.n; ++j) inst.d[i] += inst.A[i][j] * x0[j];

    const auto norm = msplit::normalize_bounds(inst);
    // brute-force the normalized box and compare through the shift
    std::vector<long long> x(inst.n, 0);
    std::function<void(int)> scan = [&](int j) {
      if (j == inst.n) {
        if (msplit::verify_solution(norm.inst, x)) {
          Solution mapped(inst.n);
          for (int t = 0; t < inst.n; ++t) mapped[t] = x[t] + norm.shift[t];
          CHECK(msplit::verify_solution(inst, mapped));
        }
        return;
      }
      for (long long v = 0; v <= norm.inst.r[j]; ++v) {
        x[j] = v;
        scan(j + 1);
      }
    };
    scan(0);
  }
}

TEST_CASE("verify_solution", "[instance]") {
  const Instance inst = test_support::make_instance({{1, 1}}, {1});
  CHECK(msplit::verify_solution(inst, {1, 0}));
  CHECK_FALSE(msplit::verify_solution(inst, {1, 1}));   // A*x = 2 != 1
  CHECK_FALSE(msplit::verify_solution(inst, {2, -1}));  // bounds violated though A*x = 1
  CHECK_THROWS_AS(msplit::verify_solution(inst, {1}), std::invalid_argument);
}
