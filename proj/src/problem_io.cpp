#include "popcone/problem_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace popcone {

namespace {

using json = nlohmann::ordered_json;

// --- Parsing -------------------------------------------------------------

double require_number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ParseError(what + ": expected a number");
  return j.get<double>();
}

Exponent parse_exponent(const json& j, int n, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + ".exp: expected an array");
  if (static_cast<int>(j.size()) != n)
    throw ParseError(what + ".exp: expected " + std::to_string(n) +
                     " entries, got " + std::to_string(j.size()));
  Exponent e(n);
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_number_integer())
      throw ParseError(what + ".exp: entries must be integers");
    long long v = j[i].get<long long>();
    if (v < 0) throw ParseError(what + ".exp: exponents must be nonnegative");
    e[i] = static_cast<int>(v);
  }
  return e;
}

Polynomial parse_polynomial(const json& j, int n, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + ": expected an array of terms");
  Polynomial p(n);
  for (std::size_t t = 0; t < j.size(); ++t) {
    const json& term = j[t];
    std::string where = what + "[" + std::to_string(t) + "]";
    if (!term.is_object()) throw ParseError(where + ": expected an object");
    if (!term.contains("exp")) throw ParseError(where + ": missing \"exp\"");
    if (!term.contains("coef")) throw ParseError(where + ": missing \"coef\"");
    Exponent e = parse_exponent(term["exp"], n, where);
    p.add_term(e, require_number(term["coef"], where + ".coef"));
  }
  return p;
}

// --- Writing -------------------------------------------------------------

json exponent_to_json(const Exponent& e) {
  json a = json::array();
  for (int v : e) a.push_back(v);
  return a;
}

json polynomial_to_json(const Polynomial& p) {
  json terms = json::array();
  // std::map iteration gives the canonical (lexicographic) term order, which
  // is what makes the output deterministic.
  for (const auto& [e, c] : p.terms()) {
    json term;
    term["exp"] = exponent_to_json(e);
    term["coef"] = c;
    terms.push_back(std::move(term));
  }
  return terms;
}

}  // namespace

PopProblem parse_problem(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& ex) {
    throw ParseError(std::string("invalid JSON: ") + ex.what());
  }
  if (!j.is_object()) throw ParseError("top level: expected an object");
  for (const char* field : {"n", "sense", "domain", "objective", "constraints"})
    if (!j.contains(field))
      throw ParseError(std::string("missing field \"") + field + "\"");

  PopProblem pop;
  if (!j["n"].is_number_integer() || j["n"].get<long long>() < 1)
    throw ParseError("\"n\": expected a positive integer");
  pop.n = static_cast<int>(j["n"].get<long long>());

  const json& sense = j["sense"];
  if (sense == "min") pop.sense = Sense::MIN;
  else if (sense == "max") pop.sense = Sense::MAX;
  else throw ParseError("\"sense\": expected \"min\" or \"max\"");

  const json& domain = j["domain"];
  if (domain == "orthant") pop.domain = Domain::ORTHANT;
  else if (domain == "free") pop.domain = Domain::FREE;
  else throw ParseError("\"domain\": expected \"orthant\" or \"free\"");

  pop.objective = parse_polynomial(j["objective"], pop.n, "objective");

  const json& cons = j["constraints"];
  if (!cons.is_array()) throw ParseError("\"constraints\": expected an array");
  for (std::size_t i = 0; i < cons.size(); ++i) {
    const json& c = cons[i];
    std::string where = "constraints[" + std::to_string(i) + "]";
    if (!c.is_object()) throw ParseError(where + ": expected an object");
    for (const char* field : {"poly", "rel", "rhs"})
      if (!c.contains(field))
        throw ParseError(where + ": missing \"" + field + "\"");
    Constraint con;
    con.poly = parse_polynomial(c["poly"], pop.n, where + ".poly");
    if (c["rel"] == "<=") con.rel = Relation::LE;
    else if (c["rel"] == "==") con.rel = Relation::EQ;
    else throw ParseError(where + ".rel: expected \"<=\" or \"==\"");
    con.rhs = require_number(c["rhs"], where + ".rhs");
    pop.constraints.push_back(std::move(con));
  }

  try {
    pop.validate();
  } catch (const std::exception& ex) {
    throw ParseError(std::string("invalid problem: ") + ex.what());
  }
  return pop;
}

PopProblem load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_problem(buf.str());
  } catch (const ParseError& ex) {
    throw ParseError(path + ": " + ex.what());
  }
}

std::string problem_to_json(const PopProblem& pop) {
  json j;
  j["n"] = pop.n;
  j["sense"] = pop.sense == Sense::MIN ? "min" : "max";
  j["domain"] = pop.domain == Domain::ORTHANT ? "orthant" : "free";
  j["objective"] = polynomial_to_json(pop.objective);
  json cons = json::array();
  for (const Constraint& c : pop.constraints) {
    json jc;
    jc["poly"] = polynomial_to_json(c.poly);
    jc["rel"] = c.rel == Relation::LE ? "<=" : "==";
    jc["rhs"] = c.rhs;
    cons.push_back(std::move(jc));
  }
  j["constraints"] = std::move(cons);
  return j.dump(2) + "\n";
}

void save_problem(const PopProblem& pop, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << problem_to_json(pop);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace popcone
