#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace grokbench {

/// Flat key=value experiment configuration: one pair per line, '#' comments.
/// Keys keep insertion order when serialized so that a run's recorded config
/// round-trips byte-for-byte.
class Config {
 public:
  void set(const std::string& key, const std::string& value);
  void set_default(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;  // throws on missing key
  int get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  std::string serialize() const;
  static Config parse(const std::string& text);
  static Config load(const std::string& path);
  void save(const std::string& path) const;

  bool operator==(const Config& other) const { return entries_ == other.entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace grokbench
