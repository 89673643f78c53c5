#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <type_traits>

#include "doctest.h"
#include "popcone/instances.hpp"
#include "popcone/problem_io.hpp"

using namespace popcone;

static_assert(std::is_base_of_v<std::runtime_error, ParseError>,
              "parse failures must be catchable as std::runtime_error");

namespace {

bool problems_equal(const PopProblem& a, const PopProblem& b) {
  return problem_hash(a) == problem_hash(b);
}

}  // namespace

TEST_CASE("serialization round-trips byte for byte") {
  for (const PopProblem& pop :
       {make_example3(true), make_example2(2, 3), make_example1(3)}) {
    std::string text = problem_to_json(pop);
    PopProblem back = parse_problem(text);
    CHECK(problems_equal(pop, back));
    CHECK(problem_to_json(back) == text);  // writer is deterministic
    CHECK(back.n == pop.n);
    CHECK(back.sense == pop.sense);
    CHECK(back.domain == pop.domain);
    CHECK(back.constraints.size() == pop.constraints.size());
  }
}

TEST_CASE("generated instances survive a file round-trip") {
  std::mt19937_64 rng(3);
  PopProblem pop = gen_example4(rng);
  const char* path = "io_roundtrip_tmp.json";
  save_problem(pop, path);
  PopProblem back = load_problem(path);
  CHECK(problems_equal(pop, back));
  std::remove(path);

  // Writing the same problem twice produces identical bytes on disk.
  save_problem(pop, "io_bytes_a.json");
  save_problem(back, "io_bytes_b.json");
  std::ifstream fa("io_bytes_a.json"), fb("io_bytes_b.json");
  std::string sa((std::istreambuf_iterator<char>(fa)), {});
  std::string sb((std::istreambuf_iterator<char>(fb)), {});
  CHECK(sa == sb);
  CHECK(!sa.empty());
  std::remove("io_bytes_a.json");
  std::remove("io_bytes_b.json");
}

TEST_CASE("malformed input raises ParseError") {
  // Syntax error.
  CHECK_THROWS_AS(parse_problem("{"), ParseError);
  CHECK_THROWS_AS(parse_problem(""), ParseError);
  CHECK_THROWS_AS(parse_problem("[1,2,3]"), ParseError);

  const std::string good = problem_to_json(make_example3(false));
  REQUIRE_NOTHROW(parse_problem(good));

  // Missing field.
  {
    std::string text = good;
    std::size_t at = text.find("\"sense\"");
    REQUIRE(at != std::string::npos);
    text.replace(at, 7, "\"tense\"");
    CHECK_THROWS_AS(parse_problem(text), ParseError);
  }
  // Bad enum values.
  {
    std::string text = good;
    std::size_t at = text.find("\"min\"");
    REQUIRE(at != std::string::npos);
    text.replace(at, 5, "\"minimize\"");
    CHECK_THROWS_AS(parse_problem(text), ParseError);
  }
  {
    std::string text = good;
    std::size_t at = text.find("\"orthant\"");
    REQUIRE(at != std::string::npos);
    text.replace(at, 9, "\"positive\"");
    CHECK_THROWS_AS(parse_problem(text), ParseError);
  }
  {
    std::string text = good;
    std::size_t at = text.find("\"<=\"");
    REQUIRE(at != std::string::npos);
    text.replace(at, 4, "\"<\"");
    CHECK_THROWS_AS(parse_problem(text), ParseError);
  }
}

TEST_CASE("structural defects raise ParseError") {
  // Exponent vector length must equal n.
  CHECK_THROWS_AS(
      parse_problem(R"({"n": 2, "sense": "min", "domain": "orthant",
        "objective": [{"exp": [1], "coef": 1.0}], "constraints": []})"),
      ParseError);
  // Coefficients must be numbers.
  CHECK_THROWS_AS(
      parse_problem(R"({"n": 1, "sense": "min", "domain": "orthant",
        "objective": [{"exp": [1], "coef": "one"}], "constraints": []})"),
      ParseError);
  // Negative exponents are not monomials.
  CHECK_THROWS_AS(
      parse_problem(R"({"n": 1, "sense": "min", "domain": "orthant",
        "objective": [{"exp": [-1], "coef": 1.0}], "constraints": []})"),
      ParseError);
  // Constraints must be an array.
  CHECK_THROWS_AS(
      parse_problem(R"({"n": 1, "sense": "min", "domain": "orthant",
        "objective": [{"exp": [1], "coef": 1.0}], "constraints": 3})"),
      ParseError);
  // A constraint needs a relation.
  CHECK_THROWS_AS(
      parse_problem(R"({"n": 1, "sense": "min", "domain": "orthant",
        "objective": [{"exp": [1], "coef": 1.0}],
        "constraints": [{"poly": [{"exp": [1], "coef": 1.0}], "rhs": 0}]})"),
      ParseError);
}

TEST_CASE("file errors raise ParseError") {
  CHECK_THROWS_AS(load_problem("definitely_not_here_9f2c.json"), ParseError);
}

TEST_CASE("a minimal handwritten problem parses to the expected structure") {
  PopProblem pop = parse_problem(R"({
    "n": 2, "sense": "max", "domain": "free",
    "objective": [{"exp": [1, 1], "coef": -2.5}],
    "constraints": [
      {"poly": [{"exp": [2, 0], "coef": 1.0}, {"exp": [0, 2], "coef": 1.0}],
       "rel": "==", "rhs": 1.0}
    ]})");
  CHECK(pop.n == 2);
  CHECK(pop.sense == Sense::MAX);
  CHECK(pop.domain == Domain::FREE);
  CHECK(pop.objective.coef({1, 1}) == doctest::Approx(-2.5));
  REQUIRE(pop.constraints.size() == 1);
  CHECK(pop.constraints[0].rel == Relation::EQ);
  CHECK(pop.constraints[0].rhs == doctest::Approx(1.0));
  CHECK(pop.constraints[0].poly.coef({2, 0}) == doctest::Approx(1.0));
}
