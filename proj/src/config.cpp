#include "grokbench/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace grokbench {

void Config::set(const std::string& key, const std::string& value) {
  auto it = index_.find(key);
  if (it == index_.end()) {
    index_[key] = entries_.size();
    entries_.emplace_back(key, value);
  } else {
    entries_[it->second].second = value;
  }
}

void Config::set_default(const std::string& key, const std::string& value) {
  if (!has(key)) set(key, value);
}

bool Config::has(const std::string& key) const { return index_.count(key) > 0; }

std::string Config::get(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) throw std::invalid_argument("config: missing key '" + key + "'");
  return entries_[it->second].second;
}

int Config::get_int(const std::string& key) const {
  try {
    return std::stoi(get(key));
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("config: key '" + key + "' is not an integer");
  }
}

double Config::get_double(const std::string& key) const {
  try {
    return std::stod(get(key));
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("config: key '" + key + "' is not a number");
  }
}

std::uint64_t Config::get_u64(const std::string& key) const {
  try {
    return std::stoull(get(key));
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("config: key '" + key + "' is not an unsigned integer");
  }
}

bool Config::get_bool(const std::string& key) const {
  const std::string v = get(key);
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw std::invalid_argument("config: key '" + key + "' is not a boolean");
}

std::string Config::serialize() const {
  std::ostringstream out;
  for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
  return out.str();
}

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    // trim
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) + " has no '='");
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    const auto ke = key.find_last_not_of(" \t");
    key = key.substr(0, ke + 1);
    const auto vb = val.find_first_not_of(" \t");
    val = vb == std::string::npos ? "" : val.substr(vb);
    cfg.set(key, val);
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Config::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << serialize();
}

}  // namespace grokbench
