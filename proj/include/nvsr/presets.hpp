#pragma once

#include <string>
#include <vector>

#include "nvsr/models.hpp"

namespace nvsr {

/// Loads a model preset by shipped name ("paper-default-5lvl", ...) or by
/// path to a JSON preset file. Unit-suffixed scalars ("2pi*1 GHz", "172 ns")
/// are normalized on load; see include/nvsr/units.hpp.
ModelSpec load_preset(const std::string& name_or_path);

/// Parses preset JSON text into a validated ModelSpec.
ModelSpec parse_preset_json(const std::string& json_text);

std::vector<std::string> shipped_preset_names();
/// Raw JSON of a shipped preset (for `presets show` and file export).
std::string shipped_preset_text(const std::string& name);

}  // namespace nvsr
