#pragma once

#include "hyrelax/model.hpp"

#include <string>

namespace hyrelax {

/// Parses the JSON system description. Throws ConfigError on schema errors.
HybridSystem parse_system(const std::string& text);

/// Reads and parses a system file. Throws IoError when the file is missing.
HybridSystem load_system(const std::string& path);

/// Serializes affine and double_pendulum systems back to JSON.
std::string system_to_json(const HybridSystem& sys, int indent = 2);

/// Piecewise-constant input table: [{"t": t_i, "u": [...]}, ...].
InputSignal parse_input_table(const std::string& text);

}  // namespace hyrelax
