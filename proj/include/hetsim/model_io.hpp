#pragma once

#include <string>
#include <string_view>

#include "hetsim/ir.hpp"

namespace hetsim::ir {

// Parses a model document (JSON). Layers of kind "LstmLayer" are expanded
// into gate MVMs and combine stages; references to an LstmLayer id resolve to
// its combine stage at the matching timestep, or to its last one.
ModelGraph load_model(std::string_view document);
ModelGraph load_model_file(const std::string& path);

// Writes the fully expanded graph; load_model() reads it back unchanged.
std::string serialize_model(const ModelGraph& graph, int indent = 2);

}  // namespace hetsim::ir
