#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace siteguard {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// Rounds to 9 significant digits so serialized floats stay stable across
// implementations.
double round_sig9(double x);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// One parsed JSON Lines record with its 1-based line number. Blank lines are
// skipped; parse failures throw MalformedRecord with the line number.
struct JsonLine {
  std::size_t line = 0;
  Json value;
};
std::vector<JsonLine> parse_json_lines(const std::string& text);

}  // namespace siteguard
