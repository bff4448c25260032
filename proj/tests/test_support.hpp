#pragma once

#include <string>

#include "motobs/core/params.hpp"
#include "motobs/error.hpp"

namespace motobs::test {

inline std::string data_path(const std::string& rel) { return std::string(MOTOBS_DATA_DIR) + "/" + rel; }

inline const ParameterSet& nominal() {
  static const ParameterSet p = load_parameters(data_path("params/gsxr1000.yaml"));
  return p;
}

}  // namespace motobs::test
