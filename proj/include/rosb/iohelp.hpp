#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace rosb {

// Shortest round-trip decimal form; the same binary always prints the same
// text, which keeps CSV/JSON outputs byte-reproducible.
std::string fmt_double(double v);

// Flat "dotted.key = value" config files; '#' starts a comment.
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);
std::map<std::string, std::string> parse_config_text(const std::string& text);

double to_double(const std::string& key, const std::string& value);
long to_long(const std::string& key, const std::string& value);
int to_int(const std::string& key, const std::string& value);
bool to_bool(const std::string& key, const std::string& value);

struct RunManifest {
  std::string command;
  std::string version;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config;  // effective dotted-key config
  std::vector<std::string> outputs;
  std::string created_at;  // informational only, excluded from reproducibility
};

void write_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rosb
