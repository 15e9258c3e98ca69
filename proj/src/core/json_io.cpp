#include "labflow/core/json_io.hpp"

#include <fstream>
#include <sstream>

#include "labflow/core/errors.hpp"

namespace labflow {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) fail(ErrorCode::kIo, "failed reading " + path.string());
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::kIo, "failed writing " + path.string());
}

Json read_json_file(const std::filesystem::path& path) {
  auto text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kSchema, path.string() + ": " + e.what());
  }
}

const Json& require(const Json& j, const char* field, const std::string& where) {
  if (!j.is_object() || !j.contains(field)) fail(ErrorCode::kSchema, where + ": missing field '" + field + "'");
  return j[field];
}

std::string require_string(const Json& j, const char* field, const std::string& where) {
  const auto& v = require(j, field, where);
  if (!v.is_string()) fail(ErrorCode::kSchema, where + ": field '" + field + "' must be a string");
  return v.get<std::string>();
}

}  // namespace labflow
