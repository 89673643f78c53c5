#include "popcone/conic.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

namespace popcone {

double eval_expr(const LinExpr& e, const std::vector<double>& x) {
  double v = 0.0;
  for (const auto& t : e) v += t.coef * x.at(t.var);
  return v;
}

double ConicProgram::objective_value(const std::vector<double>& x) const {
  return eval_expr(objective, x) + objective_constant;
}

void ConicProgram::validate() const {
  if (num_vars <= 0)
    throw std::invalid_argument("ConicProgram: structurally empty (no variables)");
  if (rows.empty() && psd_blocks.empty() && nonneg.empty())
    throw std::invalid_argument("ConicProgram: structurally empty (no constraints)");
  auto check_expr = [&](const LinExpr& e) {
    for (const auto& t : e)
      if (t.var < 0 || t.var >= num_vars)
        throw std::invalid_argument("ConicProgram: variable index out of range");
  };
  check_expr(objective);
  for (const auto& r : rows) check_expr(r.terms);
  for (const auto& e : nonneg) check_expr(e);
  for (const auto& b : psd_blocks) {
    if (b.size <= 0) throw std::invalid_argument("ConicProgram: empty PSD block");
    for (const auto& e : b.entries) {
      if (e.var < 0 || e.var >= num_vars)
        throw std::invalid_argument("ConicProgram: block variable index out of range");
      if (e.i < 0 || e.j < 0 || e.i >= b.size || e.j >= b.size || e.i > e.j)
        throw std::invalid_argument("ConicProgram: block map is not upper-triangular symmetric");
    }
    for (const auto& e : b.const_part)
      if (e.i < 0 || e.j < 0 || e.i >= b.size || e.j >= b.size || e.i > e.j)
        throw std::invalid_argument("ConicProgram: block constant is not upper-triangular symmetric");
  }
}

std::string ConicProgram::to_json() const {
  nlohmann::json j;
  j["vars"] = num_vars;
  j["sense"] = sense == Sense::MIN ? "min" : "max";
  nlohmann::json obj = nlohmann::json::array();
  for (const auto& t : objective) obj.push_back({t.var, t.coef});
  j["objective"] = {{"terms", obj}, {"constant", objective_constant}};
  nlohmann::json rws = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json tr = nlohmann::json::array();
    for (const auto& t : r.terms) tr.push_back({t.var, t.coef});
    rws.push_back({{"terms", tr}, {"rel", r.rel == Relation::LE ? "<=" : "=="}, {"rhs", r.rhs}});
  }
  j["rows"] = rws;
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : psd_blocks) {
    nlohmann::json quad = nlohmann::json::array();
    for (const auto& e : b.entries) quad.push_back({e.var, e.i, e.j, e.coef});
    nlohmann::json cst = nlohmann::json::array();
    for (const auto& e : b.const_part) cst.push_back({e.i, e.j, e.val});
    blocks.push_back({{"size", b.size}, {"entries", quad}, {"const", cst}});
  }
  j["psd_blocks"] = blocks;
  nlohmann::json nn = nlohmann::json::array();
  for (const auto& e : nonneg) {
    nlohmann::json tr = nlohmann::json::array();
    for (const auto& t : e) tr.push_back({t.var, t.coef});
    nn.push_back(tr);
  }
  j["nonneg"] = nn;
  return j.dump(2);
}

}  // namespace popcone
