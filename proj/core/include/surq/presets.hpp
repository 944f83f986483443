#pragma once

#include <string>
#include <vector>

#include "surq/engine.hpp"

namespace surq {

// A named, fully specified benchmark problem: target function, input
// distribution, and engine settings.
struct Preset {
  std::string name;
  TestFunction fn;
  InputDistribution dist;
  SurConfig config;
};

std::vector<std::string> preset_names();
Preset make_preset(const std::string& name);  // ConfigError on unknown name

}  // namespace surq
