#pragma once

#include <string>
#include <vector>

#include "unruhbec/config.hpp"

namespace unruhbec {

/// One scenario of a preset, stored as config text.
struct PresetJob {
  std::string label;
  std::string config_text;
};

struct Preset {
  std::string name;
  std::string description;
  std::vector<PresetJob> jobs;
};

const std::vector<Preset>& presets();

/// Throws ConfigError listing the known names.
const Preset& find_preset(const std::string& name);

/// Loaded and validated configs of every job, in order.
std::vector<ScenarioConfig> expand_preset(const Preset& preset);

}  // namespace unruhbec
