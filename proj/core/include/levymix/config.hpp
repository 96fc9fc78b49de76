#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "levymix/spde_model.hpp"

namespace levymix {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat sectioned key=value configuration. Sections: [levy], [spectrum],
// [nonlinearity], [numerics], [verification]. Unknown keys are errors;
// required keys: levy.alpha, levy.D, levy.K, spectrum.N.
class ParsedConfig {
 public:
  static ParsedConfig from_text(const std::string& text);
  static ParsedConfig from_file(const std::filesystem::path& path);

  // "section.key=value", applied on top of the parsed values.
  void apply_override(const std::string& setting);

  // Validates every field, fills defaults, and builds the model. Throws
  // ConfigError on unknown keys, missing required keys, or domain errors.
  ModelConfig build(bool need_contraction = false) const;

  // Effective configuration in canonical order with all defaults filled.
  std::string echo() const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;  // "section.key" -> raw value
};

}  // namespace levymix
