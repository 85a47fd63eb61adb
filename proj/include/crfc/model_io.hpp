#pragma once

// JSON model files. Node indices are 0-based.

#include <string>

#include "crfc/solver.hpp"

namespace crfc {

/// Throws ParseError (malformed document) or ValidationError (bad field),
/// the message naming the offending field.
Model parse_model(const std::string& text);
Model read_model(const std::string& path);

std::string write_model(const Model& m);
void save_model(const Model& m, const std::string& path);

}  // namespace crfc
