#pragma once

// JSON serialization for polynomial optimization problems.
//
// Schema (all fields required unless noted):
//   {
//     "n": <int>,                      // number of variables
//     "sense": "min" | "max",
//     "domain": "orthant" | "free",
//     "objective": [ {"exp": [e1,...,en], "coef": <number>}, ... ],
//     "constraints": [
//       {"poly": [ {"exp": [...], "coef": ...}, ... ],
//        "rel": "<=" | "==",
//        "rhs": <number>}, ...
//     ]
//   }
//
// Writing is deterministic: the same problem always produces the same bytes
// (terms are emitted in the polynomial's canonical exponent order, numbers
// via a fixed shortest round-trip format), so generated instance files can
// be compared byte-for-byte across runs.

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "popcone/polynomial.hpp"

namespace popcone {

// Thrown on malformed input: syntax errors, missing or mistyped fields,
// exponent vectors of the wrong length, or values failing validation.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parse a problem from JSON text.  Throws ParseError on any defect.
PopProblem parse_problem(const std::string& text);

// Read and parse a problem file.  Throws ParseError (file errors included).
PopProblem load_problem(const std::string& path);

// Serialize deterministically.  The result parses back to an equal problem.
std::string problem_to_json(const PopProblem& pop);

// Write problem_to_json(pop) to a file.  Throws std::runtime_error on I/O
// failure.
void save_problem(const PopProblem& pop, const std::string& path);

}  // namespace popcone
