#pragma once

#include <string>

#include "ppgsmc/ppg.hpp"

namespace ppgsmc {

/// Layout in schemas/ppg.schema.json. Expressions are prefix arrays:
/// ["+", ["x", 0], 1], literals plain numbers or ["lit", "1/3"].
std::string ppg_to_json(const PPG& g, int indent = 2);
/// Throws StructureError on malformed input.
PPG ppg_from_json(const std::string& text);

}  // namespace ppgsmc
