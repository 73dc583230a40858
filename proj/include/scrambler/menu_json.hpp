#pragma once

#include <json.hpp>

#include "scrambler/core.hpp"

namespace scrambler {

// {"intra": {"4": 1.0}, "cross": [{"p": [1,0,0,1], "u": 0.5}]}
CouplingMenu menu_from_json(const nlohmann::json& doc);
nlohmann::json menu_to_json(const CouplingMenu& menu);

// Accepts either {"n": ...} or {"mu": ...}.
Filling filling_from_json(const nlohmann::json& doc);

}  // namespace scrambler
