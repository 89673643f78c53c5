#pragma once

#include <cstdint>
#include <vector>

#include "popcone/polynomial.hpp"

namespace popcone {

// Result of a sampling search for good feasible points. Stands in for an
// external global solver when judging relaxation bounds: a feasible point's
// objective is a certified one-sided bound, so any relaxation bound on the
// wrong side of it is provably broken.
struct OracleReport {
  double best_value = 0.0;          // objective at best_point (problem sense)
  std::vector<double> best_point;   // empty when nothing feasible was found
  long long samples_tried = 0;
  bool feasible_found = false;
  std::uint64_t hash = 0;           // problem_hash of the searched problem
};

// Uniform sampling over the box implied by the domain and any single-variable
// linear bound constraints (default [0,10]^n on the orthant, [-10,10]^n on
// the free domain), with a Gauss-Newton repair step projecting samples onto
// equality constraints and per-coordinate golden-section polish of the best
// points. Deterministic in (seed, budget); best_value is monotone in budget
// for a fixed seed.
OracleReport sample_upper_bound(const PopProblem& pop, long long budget,
                                std::uint64_t seed);

// Soundness check of a relaxation bound against the oracle's best feasible
// value: for MIN, bound must not exceed best_value + 1e-6 (mirrored for
// MAX). Vacuously true when the oracle found no feasible point. Throws
// std::invalid_argument if the report was produced for a different problem.
bool verify_bound(const PopProblem& pop, double bound, const OracleReport& report);

}  // namespace popcone
