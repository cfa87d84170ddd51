#pragma once

#include <string>
#include <vector>

namespace hermest {

inline constexpr const char* kToolName = "hermest";
inline constexpr const char* kToolVersion = "1.0.0";

// Writes <out>.manifest.json with the verbatim argv (decimal-exact echo of all
// numeric inputs), tool name/version and output list. Deterministic bytes.
void write_manifest(const std::string& out_file, const std::vector<std::string>& argv,
                    const std::vector<std::string>& outputs);

// Reads the argv vector back from a manifest.
std::vector<std::string> read_manifest_argv(const std::string& manifest_file);

void write_text_file(const std::string& file, const std::string& content);
std::string read_text_file(const std::string& file);

}  // namespace hermest
