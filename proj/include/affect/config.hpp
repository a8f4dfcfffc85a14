#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace affect {

// Line-oriented job configuration: one `key = value` per line, `#` starts a
// comment line, blank lines are skipped. Keys are validated against the
// caller's allow-list so a typo fails loudly instead of silently using a
// default; duplicate keys are also errors.
class JobConfig {
 public:
  JobConfig() = default;

  // `allowed` is the complete key set for the job; a file mentioning anything
  // else raises ConfigError naming the key and line.
  static JobConfig from_file(const std::string& path,
                             const std::vector<std::string>& allowed);

  bool has(const std::string& key) const;

  // Missing key raises ConfigError; the typed variants also raise ConfigError
  // on unparsable values, naming the key.
  std::string get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Paths in config files resolve relative to the file's directory so a job
  // directory can be moved or archived as a unit.
  std::string get_path(const std::string& key) const;
  std::string get_path_or(const std::string& key,
                          const std::string& fallback) const;

  void set(const std::string& key, const std::string& value);

  const std::map<std::string, std::string>& entries() const { return entries_; }
  const std::string& dir() const { return dir_; }

 private:
  std::map<std::string, std::string> entries_;  // sorted for the echo
  std::string dir_;
};

// `base` is a directory; relative paths are joined onto it, absolute paths
// pass through.
std::string resolve_path(const std::string& base, const std::string& rel);

// Creates `dir` (and parents) if needed; errors become IoError.
void ensure_dir(const std::string& dir);

// Writes the fully resolved configuration (defaults applied, overrides
// folded in) as sorted `key = value` lines to <out_dir>/resolved_config.txt
// so every job records exactly what it ran with.
void echo_resolved_config(const std::map<std::string, std::string>& resolved,
                          const std::string& out_dir);

}  // namespace affect
