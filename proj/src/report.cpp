#include "popcone/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace popcone {

namespace {

std::string num4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

// Bound cell: the value for OPTIMAL solves, the status word otherwise.
std::string bound_cell(double value, SolveStatus status) {
  if (status == SolveStatus::OPTIMAL) return num4(value);
  return to_string(status);
}

struct Cells {
  std::vector<std::string> fields;
};

const char* const kHeader[] = {"id",        "oracle",    "tp_bound", "tp_status",
                               "qp_bound",  "qp_status", "ratio",    "note"};
constexpr int kNumCols = 8;

Cells row_cells(const ComparisonRow& r) {
  Cells c;
  c.fields.push_back(r.id);
  if (!r.note.empty()) {
    // Failed row: every numeric cell is ERR, the note carries the reason.
    for (int i = 0; i < 5; ++i) c.fields.push_back("ERR");
    c.fields.push_back(r.note);
    return c;
  }
  c.fields.push_back(r.oracle_value ? num4(*r.oracle_value) : "-");
  c.fields.push_back(bound_cell(r.tp_bound, r.tp_status));
  c.fields.push_back(to_string(r.tp_status));
  c.fields.push_back(bound_cell(r.qp_bound, r.qp_status));
  c.fields.push_back(to_string(r.qp_status));
  c.fields.push_back(r.ratio ? num4(*r.ratio) : "-");
  c.fields.push_back("");
  return c;
}

std::string csv_escape(const std::string& f) {
  if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
  std::string out = "\"";
  for (char ch : f) {
    out += ch;
    if (ch == '"') out += '"';
  }
  out += '"';
  return out;
}

}  // namespace

std::optional<double> improve_ratio(const std::optional<double>& oracle_value,
                                    double tp_bound, SolveStatus tp_status,
                                    double qp_bound, SolveStatus qp_status) {
  if (!oracle_value) return std::nullopt;
  if (tp_status != SolveStatus::OPTIMAL || qp_status != SolveStatus::OPTIMAL)
    return std::nullopt;
  double den = *oracle_value - qp_bound;
  if (std::fabs(den) <= 1e-9) return std::nullopt;
  return (tp_bound - qp_bound) / den;
}

ComparisonSummary summarize(const std::vector<ComparisonRow>& rows) {
  ComparisonSummary s;
  s.rows = static_cast<int>(rows.size());
  double ratio_sum = 0.0;
  for (const ComparisonRow& r : rows) {
    if (!r.note.empty()) {
      ++s.errors;
      continue;
    }
    if (r.tp_status == SolveStatus::UNBOUNDED) ++s.tp_unbounded;
    if (r.qp_status == SolveStatus::UNBOUNDED) ++s.qp_unbounded;
    if (r.ratio) {
      ++s.ratios_defined;
      ratio_sum += *r.ratio;
    }
  }
  if (s.ratios_defined > 0) s.mean_ratio = ratio_sum / s.ratios_defined;
  return s;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  for (int i = 0; i < kNumCols; ++i) out << (i ? "," : "") << kHeader[i];
  out << "\r\n";
  for (const ComparisonRow& r : rows) {
    Cells c = row_cells(r);
    for (int i = 0; i < kNumCols; ++i)
      out << (i ? "," : "") << csv_escape(c.fields[i]);
    out << "\r\n";
  }
  return out.str();
}

std::string comparison_markdown(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << "|";
  for (int i = 0; i < kNumCols; ++i) out << " " << kHeader[i] << " |";
  out << "\n|";
  for (int i = 0; i < kNumCols; ++i) out << " --- |";
  out << "\n";
  for (const ComparisonRow& r : rows) {
    Cells c = row_cells(r);
    out << "|";
    for (int i = 0; i < kNumCols; ++i) out << " " << c.fields[i] << " |";
    out << "\n";
  }
  return out.str();
}

std::string summary_line(const ComparisonSummary& s) {
  std::ostringstream out;
  out << "rows " << s.rows << ", errors " << s.errors << ", tensor unbounded "
      << s.tp_unbounded << ", quadratic unbounded " << s.qp_unbounded
      << ", mean ratio ";
  if (s.mean_ratio)
    out << num4(*s.mean_ratio) << " over " << s.ratios_defined << " defined";
  else
    out << "undefined (0 defined)";
  return out.str();
}

}  // namespace popcone
