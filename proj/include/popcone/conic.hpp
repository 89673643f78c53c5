#pragma once

#include <string>
#include <vector>

#include "popcone/polynomial.hpp"

namespace popcone {

// Sparse linear functional sum_i coef_i * x[var_i].
struct LinTerm {
  int var = 0;
  double coef = 0.0;
};
using LinExpr = std::vector<LinTerm>;

struct LinearRow {
  LinExpr terms;
  Relation rel = Relation::LE;
  double rhs = 0.0;
};

// One PSD constraint: C + sum_v x_v * A_v must be PSD, given entrywise.
// Entries are stored upper-triangular (i <= j); the map is symmetric by
// construction.
struct PsdEntry {
  int i = 0;
  int j = 0;
  int var = 0;
  double coef = 0.0;
};
struct PsdConstEntry {
  int i = 0;
  int j = 0;
  double val = 0.0;
};
struct PsdBlock {
  int size = 0;
  std::vector<PsdEntry> entries;          // variable part
  std::vector<PsdConstEntry> const_part;  // C (usually empty)
};

// Linear conic program over free scalar variables:
//   optimize objective  s.t.  rows hold, each psd block is PSD,
//   each nonneg functional is >= 0.
struct ConicProgram {
  int num_vars = 0;
  Sense sense = Sense::MIN;
  LinExpr objective;
  double objective_constant = 0.0;
  std::vector<LinearRow> rows;
  std::vector<PsdBlock> psd_blocks;
  std::vector<LinExpr> nonneg;

  double objective_value(const std::vector<double>& x) const;
  // Throws std::invalid_argument on structural problems (no variables,
  // no constraints at all, out-of-range indices, i > j block entries).
  void validate() const;
  std::string to_json() const;  // sparse interchange dump
};

double eval_expr(const LinExpr& e, const std::vector<double>& x);

}  // namespace popcone
