#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace degenid::app {

// Flat key = value configuration. Keys are ordered so serialization is
// deterministic; doubles round-trip through 17 significant digits.
class Config {
 public:
  Config() = default;

  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  std::string serialize() const;
  void save(const std::string& path) const;

  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  void set(const std::string& key, std::string value);
  void set(const std::string& key, double value);
  void set(const std::string& key, int value);
  void erase(const std::string& key) { kv_.erase(key); }

  // throws std::out_of_range when the key is absent and no default is given
  std::string get(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

  // comma separated lists
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::uint64_t> get_u64s(const std::string& key) const;

  // later entries win; used for --key value command line overrides
  void merge(const Config& overrides);

  const std::map<std::string, std::string>& entries() const { return kv_; }

  bool operator==(const Config& other) const { return kv_ == other.kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

std::string format_double(double v);  // %.17g, the round-trip format

}  // namespace degenid::app
