#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace degenid::app {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad_value(const std::string& key, const char* kind, const std::string& v) {
  throw std::invalid_argument("config: '" + key + "' is not " + kind + ": '" + v + "'");
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos == v.size()) return x;
  } catch (const std::logic_error&) {
  }
  bad_value(key, "a number", v);
}

int parse_int(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos == v.size()) return x;
  } catch (const std::logic_error&) {
  }
  bad_value(key, "an integer", v);
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const std::uint64_t x = std::stoull(v, &pos);
    if (pos == v.size()) return x;
  } catch (const std::logic_error&) {
  }
  bad_value(key, "an unsigned integer", v);
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty())
      throw std::invalid_argument("config: line " + std::to_string(lineno) + " has an empty key");
    c.kv_[key] = trim(t.substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string Config::serialize() const {
  std::string out;
  for (const auto& [k, v] : kv_) {
    out += k;
    out += " = ";
    out += v;
    out += "\n";
  }
  return out;
}

void Config::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("config: cannot write " + path);
  out << serialize();
}

void Config::set(const std::string& key, std::string value) { kv_[key] = std::move(value); }
void Config::set(const std::string& key, double value) { kv_[key] = format_double(value); }
void Config::set(const std::string& key, int value) { kv_[key] = std::to_string(value); }

std::string Config::get(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) throw std::out_of_range("config: missing key '" + key + "'");
  return it->second;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const { return parse_double(get(key), key); }

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int Config::get_int(const std::string& key) const { return parse_int(get(key), key); }

int Config::get_int(const std::string& key, int fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  return parse_u64(get(key), key);
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  std::istringstream in(get(key));
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_double(trim(item), key));
  return out;
}

std::vector<std::uint64_t> Config::get_u64s(const std::string& key) const {
  std::vector<std::uint64_t> out;
  std::istringstream in(get(key));
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_u64(trim(item), key));
  return out;
}

void Config::merge(const Config& overrides) {
  for (const auto& [k, v] : overrides.kv_) kv_[k] = v;
}

}  // namespace degenid::app
