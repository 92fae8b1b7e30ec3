#pragma once

#include <string>
#include <vector>

namespace qlimit {

struct Preset {
  std::string name;         // embeds the theorem tag
  std::string description;
  std::string json;         // complete config document
};

// One bundled configuration per theorem tag.
const std::vector<Preset>& presets();

}  // namespace qlimit
