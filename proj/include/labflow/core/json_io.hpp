#pragma once

#include <filesystem>
#include <string>

#include "labflow/core/vocabulary.hpp"

namespace labflow {

// IoError when unreadable, SchemaError when not valid JSON.
Json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Typed field access raising SchemaError with the field path in the message.
const Json& require(const Json& j, const char* field, const std::string& where);
std::string require_string(const Json& j, const char* field, const std::string& where);

}  // namespace labflow
