#pragma once

#include <json.hpp>

#include <string>

namespace navishare::canon {

/// Canonical textual form shared by every on-disk format: keys sorted
/// (nlohmann object order), floating-point numbers printed as 9-decimal
/// fixed point, two-space indent, trailing newline. Writing the result
/// of a parse reproduces the canonical bytes exactly.
std::string dump(const nlohmann::json& j);

nlohmann::json parse(const std::string& text);
nlohmann::json parse_file(const std::string& path);

void write_file(const std::string& path, const nlohmann::json& j);

}  // namespace navishare::canon
