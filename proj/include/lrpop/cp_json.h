#pragma once

#include <string>

#include <json.hpp>

#include "lrpop/polyrep.h"

namespace lrpop {

// Problem file schema:
//   {"n": int, "r": int, "basis": "monomial" | "bernstein",
//    "factors": [[[c_0, ..., c_d], ... n entries], ... r entries]}
// Unknown fields are rejected. All errors throw InvalidInput.
CPPoly cp_from_json(const nlohmann::json& doc);
nlohmann::json cp_to_json(const CPPoly& f);

CPPoly read_cp_file(const std::string& path);
void write_cp_file(const CPPoly& f, const std::string& path);

}  // namespace lrpop
