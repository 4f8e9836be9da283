#pragma once

#include <string>
#include <string_view>

#include "ghforge/structure.hpp"

namespace ghforge {

inline constexpr std::string_view kFormatVersion = "1.0";

/// Parses a SpaceDocument (JSON text). Structural problems raise SchemaError
/// and references to unknown points or marks raise DanglingLabel; both carry
/// a JSON pointer to the offending value in the message. Metric-axiom
/// failures are reported as by validate_metric.
StructuredSpace parse_space(std::string_view text);

/// Reads and parses a file; I/O failures raise InvalidArgument.
StructuredSpace load_space(const std::string& path);

/// Canonical SpaceDocument text (matrix form, two-space indentation).
std::string serialize_space(const StructuredSpace& space);

}  // namespace ghforge
