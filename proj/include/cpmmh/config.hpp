// Flat key = value experiment configuration. Lines hold one `key = value`
// pair, # starts a comment, keys are unique. Values are typed at access
// time; grids accept comma lists and start:step:stop ranges (inclusive,
// with the endpoint snapped onto the grid). Reads are tracked so an
// experiment can reject keys it does not understand.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpmmh {

class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": expected key = value");
      }
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty()) {
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": empty key");
      }
      if (cfg.values_.count(key) != 0) {
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": duplicate key '" + key + "'");
      }
      cfg.values_[key] = value;
    }
    return cfg;
  }

  static KeyValueConfig parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
      throw std::invalid_argument("config file not readable: " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str());
  }

  std::string serialize() const {
    std::ostringstream out;
    for (const auto& [key, value] : values_) out << key << " = " << value << "\n";
    return out.str();
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    touch(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::string require_string(const std::string& key) const {
    touch(key);
    const auto it = values_.find(key);
    if (it == values_.end()) {
      throw std::invalid_argument("config: missing required key '" + key + "'");
    }
    return it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    touch(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : to_double(it->second, key);
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
    touch(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      std::size_t pos = 0;
      const std::uint64_t v = std::stoull(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw std::invalid_argument("config: key '" + key + "' is not an unsigned integer");
    }
  }

  bool get_bool(const std::string& key, bool fallback) const {
    touch(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw std::invalid_argument("config: key '" + key + "' is not a boolean");
  }

  // Comma list of doubles.
  std::vector<double> get_vector(const std::string& key,
                                 const std::string& fallback) const {
    touch(key);
    const auto it = values_.find(key);
    return parse_list(it == values_.end() ? fallback : it->second, key);
  }

  // Comma list whose elements may be start:step:stop ranges.
  std::vector<double> get_grid(const std::string& key, const std::string& fallback) const {
    touch(key);
    const auto it = values_.find(key);
    const std::string text = it == values_.end() ? fallback : it->second;
    std::vector<double> out;
    for (const std::string& piece : split(text, ',')) {
      const auto parts = split(piece, ':');
      if (parts.size() == 1) {
        out.push_back(to_double(parts[0], key));
      } else if (parts.size() == 3) {
        const double start = to_double(parts[0], key);
        const double step = to_double(parts[1], key);
        const double stop = to_double(parts[2], key);
        if (!(step > 0.0) || stop < start) {
          throw std::invalid_argument("config: bad range in key '" + key + "'");
        }
        const auto count = static_cast<std::size_t>(std::llround((stop - start) / step));
        for (std::size_t i = 0; i <= count; ++i) {
          double v = start + step * static_cast<double>(i);
          if (std::fabs(v - stop) < step * 1e-9) v = stop;  // snap the endpoint
          if (v > stop + step * 1e-9) break;
          out.push_back(v);
        }
      } else {
        throw std::invalid_argument("config: bad grid element in key '" + key + "'");
      }
    }
    if (out.empty()) throw std::invalid_argument("config: empty grid for key '" + key + "'");
    return out;
  }

  // Keys present in the file but never read by the experiment.
  std::vector<std::string> unread_keys() const {
    std::vector<std::string> out;
    for (const auto& [key, value] : values_) {
      if (read_.count(key) == 0) out.push_back(key);
    }
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
  }

  static std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string current;
    std::istringstream in(s);
    while (std::getline(in, current, sep)) out.push_back(trim(current));
    return out;
  }

  static double to_double(const std::string& s, const std::string& key) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw std::invalid_argument("config: key '" + key + "' has non-numeric value '" + s +
                                  "'");
    }
  }

  static std::vector<double> parse_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    for (const std::string& piece : split(text, ',')) out.push_back(to_double(piece, key));
    return out;
  }

  void touch(const std::string& key) const { read_.insert(key); }

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> read_;
};

}  // namespace cpmmh
