#include "lrpop/block_sdp.h"

#include <algorithm>
#include <cmath>

#include "lrpop/errors.h"

namespace lrpop {

using nlohmann::json;

int LinearEqualities::add_row(const std::vector<std::pair<int, double>>& entries,
                              double b) {
  const int row = num_rows();
  for (const auto& [var, coeff] : entries) {
    if (coeff == 0.0) continue;
    rows.push_back(row);
    cols.push_back(var);
    vals.push_back(coeff);
  }
  rhs.push_back(b);
  return row;
}

int BlockSDP::find_moment(const Monomial& m) const {
  auto it = std::find(y_monomials.begin(), y_monomials.end(), m);
  return it == y_monomials.end() ? -1
                                 : static_cast<int>(it - y_monomials.begin());
}

void validate(const BlockSDP& sdp) {
  const int m = sdp.y_count;
  if (m < 0) throw InvalidInput("negative y_count");
  auto check_var = [m](int v, const std::string& where) {
    if (v < 0 || v >= m) {
      throw InvalidInput(where + " references y_" + std::to_string(v) +
                         " outside [0, " + std::to_string(m) + ")");
    }
  };
  for (const SdpBlock& b : sdp.blocks) {
    if (b.size <= 0) throw InvalidInput("block " + b.label + " has size <= 0");
    for (const BlockTerm& t : b.terms) {
      if (t.row < 0 || t.row > t.col || t.col >= b.size) {
        throw InvalidInput("block " + b.label + " has an entry outside its upper triangle");
      }
      check_var(t.var, "block " + b.label);
      if (!std::isfinite(t.coeff)) throw InvalidInput("non-finite block coefficient");
    }
  }
  const auto& e = sdp.equalities;
  if (e.rows.size() != e.cols.size() || e.rows.size() != e.vals.size()) {
    throw InvalidInput("equality triplet arrays differ in length");
  }
  for (std::size_t k = 0; k < e.rows.size(); ++k) {
    if (e.rows[k] < 0 || e.rows[k] >= e.num_rows()) {
      throw InvalidInput("equality row index out of range");
    }
    check_var(e.cols[k], "equality");
  }
  if (sdp.objective.vars.size() != sdp.objective.coeffs.size()) {
    throw InvalidInput("objective arrays differ in length");
  }
  for (int v : sdp.objective.vars) check_var(v, "objective");
  if (!sdp.y_monomials.empty() && static_cast<int>(sdp.y_monomials.size()) != m) {
    throw InvalidInput("y_monomials must be empty or have y_count entries");
  }
}

json sdp_to_json(const BlockSDP& sdp) {
  json blocks = json::array();
  for (const SdpBlock& b : sdp.blocks) {
    json terms = json::array();
    for (const BlockTerm& t : b.terms) terms.push_back({t.row, t.col, t.var, t.coeff});
    blocks.push_back({{"label", b.label},
                      {"size", b.size},
                      {"kind", b.kind == BlockKind::Moment ? "moment" : "localizing"},
                      {"clique", b.clique},
                      {"terms", std::move(terms)}});
  }
  json doc = {{"y_count", sdp.y_count},
              {"blocks", std::move(blocks)},
              {"equalities",
               {{"rows", sdp.equalities.rows},
                {"cols", sdp.equalities.cols},
                {"vals", sdp.equalities.vals},
                {"rhs", sdp.equalities.rhs}}},
              {"objective",
               {{"vars", sdp.objective.vars},
                {"coeffs", sdp.objective.coeffs},
                {"constant", sdp.objective.constant}}}};
  if (!sdp.y_monomials.empty()) {
    json monos = json::array();
    for (const Monomial& mono : sdp.y_monomials) {
      json factors = json::array();
      for (const auto& f : mono.factors()) factors.push_back({f.var, f.exp});
      monos.push_back(std::move(factors));
    }
    doc["y_monomials"] = std::move(monos);
  }
  return doc;
}

namespace {

void expect_keys(const json& obj, std::initializer_list<const char*> allowed,
                 const std::string& where) {
  if (!obj.is_object()) throw InvalidInput(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw InvalidInput("unknown field \"" + key + "\" in " + where);
    }
  }
}

}  // namespace

BlockSDP sdp_from_json(const json& doc) {
  try {
    expect_keys(doc, {"y_count", "blocks", "equalities", "objective", "y_monomials"}, "BlockSDP");
    BlockSDP sdp;
    sdp.y_count = doc.at("y_count").get<int>();
    for (const json& b : doc.at("blocks")) {
      expect_keys(b, {"label", "size", "kind", "clique", "terms"}, "block");
      SdpBlock block;
      block.label = b.value("label", std::string{});
      block.size = b.at("size").get<int>();
      const std::string kind = b.value("kind", std::string("moment"));
      if (kind != "moment" && kind != "localizing") {
        throw InvalidInput("unknown block kind " + kind);
      }
      block.kind = kind == "moment" ? BlockKind::Moment : BlockKind::Localizing;
      block.clique = b.value("clique", -1);
      for (const json& t : b.at("terms")) {
        block.terms.push_back({t.at(0).get<int>(), t.at(1).get<int>(),
                               t.at(2).get<int>(), t.at(3).get<double>()});
      }
      sdp.blocks.push_back(std::move(block));
    }
    const json& e = doc.at("equalities");
    expect_keys(e, {"rows", "cols", "vals", "rhs"}, "equalities");
    sdp.equalities.rows = e.at("rows").get<std::vector<int>>();
    sdp.equalities.cols = e.at("cols").get<std::vector<int>>();
    sdp.equalities.vals = e.at("vals").get<std::vector<double>>();
    sdp.equalities.rhs = e.at("rhs").get<std::vector<double>>();
    const json& o = doc.at("objective");
    expect_keys(o, {"vars", "coeffs", "constant"}, "objective");
    sdp.objective.vars = o.at("vars").get<std::vector<int>>();
    sdp.objective.coeffs = o.at("coeffs").get<std::vector<double>>();
    sdp.objective.constant = o.value("constant", 0.0);
    if (doc.contains("y_monomials")) {
      for (const json& mono : doc.at("y_monomials")) {
        std::vector<Monomial::Factor> factors;
        for (const json& f : mono) factors.push_back({f.at(0).get<int>(), f.at(1).get<int>()});
        sdp.y_monomials.push_back(Monomial::from_factors(std::move(factors)));
      }
    }
    validate(sdp);
    return sdp;
  } catch (const json::exception& ex) {
    throw InvalidInput(std::string("malformed BlockSDP document: ") + ex.what());
  }
}

}  // namespace lrpop
