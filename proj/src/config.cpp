#include "affect/config.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "affect/errors.hpp"

namespace affect {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* kind) {
  throw ConfigError("config key '" + key + "': cannot parse '" + value +
                    "' as " + kind);
}

}  // namespace

JobConfig JobConfig::from_file(const std::string& path,
                               const std::vector<std::string>& allowed) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file '" + path + "'");

  JobConfig cfg;
  cfg.dir_ = std::filesystem::path(path).parent_path().string();

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value', got '" + stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    }
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": unknown key '" + key + "'");
    }
    if (!cfg.entries_.emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    }
  }
  if (f.bad()) throw IoError("read from '" + path + "' failed");
  return cfg;
}

bool JobConfig::has(const std::string& key) const {
  return entries_.count(key) != 0;
}

std::string JobConfig::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw ConfigError("config is missing required key '" + key + "'");
  }
  return it->second;
}

std::string JobConfig::get_or(const std::string& key,
                              const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double JobConfig::get_double(const std::string& key, double fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    bad_value(key, it->second, "a number");
  }
}

std::size_t JobConfig::get_size(const std::string& key,
                                std::size_t fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(it->second, &used);
    if (used != it->second.size() || it->second[0] == '-') {
      throw std::invalid_argument("trailing");
    }
    return std::size_t(v);
  } catch (const std::exception&) {
    bad_value(key, it->second, "a non-negative integer");
  }
}

std::uint64_t JobConfig::get_u64(const std::string& key,
                                 std::uint64_t fallback) const {
  return get_size(key, std::size_t(fallback));
}

bool JobConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, v, "a boolean (true/false/1/0)");
}

std::string JobConfig::get_path(const std::string& key) const {
  return resolve_path(dir_, get(key));
}

std::string JobConfig::get_path_or(const std::string& key,
                                   const std::string& fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  return resolve_path(dir_, it->second);
}

void JobConfig::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

std::string resolve_path(const std::string& base, const std::string& rel) {
  const std::filesystem::path p(rel);
  if (p.is_absolute() || base.empty()) return rel;
  return (std::filesystem::path(base) / p).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create directory '" + dir + "': " + ec.message());
  }
}

void echo_resolved_config(const std::map<std::string, std::string>& resolved,
                          const std::string& out_dir) {
  ensure_dir(out_dir);
  const std::string path =
      (std::filesystem::path(out_dir) / "resolved_config.txt").string();
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& [k, v] : resolved) f << k << " = " << v << "\n";
  f.flush();
  if (!f.good()) throw IoError("write to '" + path + "' failed");
}

}  // namespace affect
