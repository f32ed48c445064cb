#include "lrpop/cp_json.h"

#include <fstream>
#include <set>
#include <sstream>

#include "lrpop/errors.h"

namespace lrpop {

using nlohmann::json;

namespace {

int require_int(const json& doc, const char* key) {
  if (!doc.contains(key)) {
    throw InvalidInput(std::string("missing field \"") + key + "\"");
  }
  const json& v = doc.at(key);
  if (!v.is_number_integer()) {
    throw InvalidInput(std::string("field \"") + key + "\" must be an integer");
  }
  return v.get<int>();
}

}  // namespace

CPPoly cp_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidInput("problem must be a JSON object");
  static const std::set<std::string> kFields = {"n", "r", "basis", "factors"};
  for (const auto& [key, value] : doc.items()) {
    if (!kFields.contains(key)) {
      throw InvalidInput("unknown field \"" + key + "\"");
    }
  }
  const int n = require_int(doc, "n");
  const int r = require_int(doc, "r");
  if (n < 1 || r < 1) throw InvalidInput("n and r must be >= 1");
  if (!doc.contains("basis") || !doc.at("basis").is_string()) {
    throw InvalidInput("field \"basis\" must be a string");
  }
  const std::string basis_str = doc.at("basis").get<std::string>();
  Basis basis;
  if (basis_str == "monomial") {
    basis = Basis::Monomial;
  } else if (basis_str == "bernstein") {
    basis = Basis::Bernstein;
  } else {
    throw InvalidInput("basis must be \"monomial\" or \"bernstein\"");
  }
  if (!doc.contains("factors") || !doc.at("factors").is_array()) {
    throw InvalidInput("field \"factors\" must be an array");
  }
  const json& rows = doc.at("factors");
  if (rows.size() != static_cast<std::size_t>(r)) {
    throw InvalidInput("factors has " + std::to_string(rows.size()) +
                       " rows, expected r = " + std::to_string(r));
  }
  std::vector<UniPoly> factors;
  for (const json& row : rows) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(n)) {
      throw InvalidInput("each factor row must hold n coefficient lists");
    }
    for (const json& coeffs : row) {
      if (!coeffs.is_array() || coeffs.empty()) {
        throw InvalidInput("coefficient list must be a non-empty array");
      }
      std::vector<double> c;
      for (const json& v : coeffs) {
        if (!v.is_number()) throw InvalidInput("coefficients must be numbers");
        c.push_back(v.get<double>());
      }
      factors.emplace_back(basis, std::move(c));
    }
  }
  return CPPoly(n, r, std::move(factors));
}

json cp_to_json(const CPPoly& f) {
  json rows = json::array();
  for (int l = 0; l < f.r(); ++l) {
    json row = json::array();
    for (int i = 0; i < f.n(); ++i) row.push_back(f.factor(l, i).coeffs());
    rows.push_back(std::move(row));
  }
  return json{{"n", f.n()},
              {"r", f.r()},
              {"basis", basis_name(f.basis())},
              {"factors", std::move(rows)}};
}

CPPoly read_cp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput(path + ": " + e.what());
  }
  return cp_from_json(doc);
}

void write_cp_file(const CPPoly& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << cp_to_json(f).dump(2) << "\n";
}

}  // namespace lrpop
