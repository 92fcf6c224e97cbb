#include "rosb/iohelp.hpp"

#include <charconv>
#include <chrono>
#include <climits>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rosb/env.hpp"  // ConfigError

namespace rosb {

std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

static std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream iss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(iss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    out[key] = value;
  }
  return out;
}

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: " + value);
  }
}

long to_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: " + value);
  }
}

int to_int(const std::string& key, const std::string& value) {
  const long v = to_long(key, value);
  if (v < INT_MIN || v > INT_MAX) throw ConfigError("config key '" + key + "': out of range");
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config key '" + key + "': not a boolean: " + value);
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["version"] = m.version;
  j["seed"] = m.seed;
  j["config"] = m.config;
  j["outputs"] = m.outputs;
  j["created_at"] = m.created_at;
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad manifest " + path.string() + ": " + e.what());
  }
  RunManifest m;
  m.command = j.value("command", "");
  m.version = j.value("version", "");
  m.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("config"))
    for (const auto& [k, v] : j["config"].items()) m.config[k] = v.get<std::string>();
  if (j.contains("outputs"))
    for (const auto& v : j["outputs"]) m.outputs.push_back(v.get<std::string>());
  m.created_at = j.value("created_at", "");
  return m;
}

}  // namespace rosb
