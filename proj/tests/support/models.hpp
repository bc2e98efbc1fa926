#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "maxstrat/parser.hpp"

namespace maxstrat::test_support {

inline std::string model_path(const std::string& name) {
  return std::string(MAXSTRAT_MODELS_DIR) + "/" + name + ".ts";
}

inline ModelFile load_model(const std::string& name) {
  std::ifstream in(model_path(name));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_model(text.str());
}

}  // namespace maxstrat::test_support
