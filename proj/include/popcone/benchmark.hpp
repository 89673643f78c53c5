#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "popcone/polynomial.hpp"
#include "popcone/report.hpp"
#include "popcone/solver.hpp"

namespace popcone {

// Solver configuration for the benchmark comparison pipeline. Accepts
// reduced-accuracy stalls within a wider band than the default: the
// quadratic-lifting programs have flat optimal faces (matrix entries no row
// reads) on which the homogeneous embedding drifts after reaching a
// near-optimal iterate. Precision paths keep the strict default config.
SolverConfig benchmark_config();

// A generated benchmark batch: instances and their per-instance oracle
// seeds, drawn from one deterministic stream (instance k, then its seed,
// then instance k+1, ...), so a batch is fully pinned by (example, count,
// seed).
struct GeneratedBatch {
  std::vector<PopProblem> pops;
  std::vector<std::uint64_t> oracle_seeds;
};

GeneratedBatch generate_batch(int example, int count, std::uint64_t seed);

// One comparison-pipeline run: sampled upper bound, then tensor and
// quadratic bounds on a copy strengthened to degree 4 by orthant monomial
// products (free-domain problems skip strengthening and use the SDP cone).
// Finite bounds are audited against the sampled value; a failed audit, a
// numerical-trouble solve, or a builder error is recorded in the row note
// and in error_class.
struct PipelineOutcome {
  ComparisonRow row;
  // 0 ok; 3 builder error; 4 solver trouble or soundness-audit failure
  // (matching the CLI exit-code classes).
  int error_class = 0;
};

PipelineOutcome run_comparison(const std::string& id, const PopProblem& pop,
                               long long budget, std::uint64_t oracle_seed);

}  // namespace popcone
