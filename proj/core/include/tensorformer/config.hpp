#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tensorformer/common.hpp"

namespace tensorformer {

// Flat "key = value" run configuration. Lines starting with '#' are
// comments. Keys are unique; unknown keys are rejected against a command's
// allow-list so typos fail loudly. to_text() emits keys sorted, which makes
// resolved configs canonical and diffable.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_text(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  double get_double(const std::string& key) const;
  int64_t get_int(const std::string& key, int64_t fallback) const;
  int64_t get_int(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<int64_t> get_int_list(const std::string& key,
                                    const std::vector<int64_t>& fallback) const;

  // Throws ConfigError naming the first key that is not in `allowed`.
  void require_known_keys(std::span<const std::string> allowed) const;

  std::string to_text() const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  const std::string* find(const std::string& key) const;
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace tensorformer
