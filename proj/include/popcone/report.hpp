#pragma once

#include <optional>
#include <string>
#include <vector>

#include "popcone/solver.hpp"

namespace popcone {

// One comparison-table row: an instance's sampled upper bound against its
// tensor-cone and quadratic-lifting relaxation bounds.
struct ComparisonRow {
  std::string id;
  std::optional<double> oracle_value;  // absent: no feasible point was found
  double tp_bound = 0.0;
  double qp_bound = 0.0;
  SolveStatus tp_status = SolveStatus::NUMERICAL_TROUBLE;
  SolveStatus qp_status = SolveStatus::NUMERICAL_TROUBLE;
  std::optional<double> ratio;
  std::string note;  // error text for failed rows; empty otherwise
};

// (tp - qp) / (oracle - qp): the share of the gap between the weaker bound
// and the sampled optimum that the tensor bound recovers. Defined only when
// the oracle found a feasible point, both solves are OPTIMAL (finite), and
// the denominator exceeds 1e-9 in magnitude.
std::optional<double> improve_ratio(const std::optional<double>& oracle_value,
                                    double tp_bound, SolveStatus tp_status,
                                    double qp_bound, SolveStatus qp_status);

struct ComparisonSummary {
  int rows = 0;
  int errors = 0;  // rows with a nonempty note and no usable bounds
  int tp_unbounded = 0;
  int qp_unbounded = 0;
  int ratios_defined = 0;
  std::optional<double> mean_ratio;  // over defined ratios
};

ComparisonSummary summarize(const std::vector<ComparisonRow>& rows);

// Table writers. Both emit the same cells with identical numeric text
// (4 decimal places, statuses spelled out, "-" for undefined cells); only
// the framing differs. CSV follows RFC 4180 quoting.
std::string comparison_csv(const std::vector<ComparisonRow>& rows);
std::string comparison_markdown(const std::vector<ComparisonRow>& rows);

// One formatted summary line, shared by the comparison commands.
std::string summary_line(const ComparisonSummary& s);

}  // namespace popcone
