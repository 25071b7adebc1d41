#pragma once

// Flat key=value configuration files with dotted sections:
//
//   # comment
//   scenario = breiman
//   x_law.kind = uniform01
//   y_law.beta = 0.5

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "selfnorm/distributions.hpp"
#include "selfnorm/errors.hpp"

namespace selfnorm {

/// Invalid or unreadable configuration content (exit code 3).
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File-system failure while reading inputs or writing results (exit code 2).
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

class FlatConfig {
 public:
  static FlatConfig parse(std::istream& in, const std::string& origin = "<config>") {
    FlatConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw config_error(origin + ":" + std::to_string(lineno) + ": expected key = value");
      }
      const std::string key = detail::trim(line.substr(0, eq));
      const std::string value = detail::trim(line.substr(eq + 1));
      if (key.empty()) throw config_error(origin + ":" + std::to_string(lineno) + ": empty key");
      if (c.values_.count(key)) throw config_error(origin + ":" + std::to_string(lineno) + ": duplicate key " + key);
      c.values_[key] = value;
    }
    return c;
  }

  static FlatConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file " + path);
    return parse(in, path);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return to_double(key, it->second);
  }

  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return to_uint(key, it->second);
  }

  /// Signed integer field; a negative value is reported against the key.
  long long get_int(const std::string& key, long long fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const auto& s = it->second;
    long long v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw config_error(key + ": expected an integer, got '" + s + "'");
    return v;
  }

  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = detail::trim(item);
      if (!item.empty()) out.push_back(to_double(key, item));
    }
    if (out.empty()) throw config_error(key + ": empty list");
    return out;
  }

  /// Keys present in the file but not in `known`.
  std::vector<std::string> unknown_keys(const std::set<std::string>& known) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_) {
      if (!known.count(k)) out.push_back(k);
    }
    return out;
  }

 private:
  static double to_double(const std::string& key, const std::string& s) {
    const char* b = s.c_str();
    char* e = nullptr;
    errno = 0;
    const double v = std::strtod(b, &e);
    if (e == b || *e != '\0' || errno == ERANGE) throw config_error(key + ": expected a number, got '" + s + "'");
    return v;
  }

  static std::uint64_t to_uint(const std::string& key, const std::string& s) {
    // Accept 1e4-style literals when they are exact integers.
    if (!s.empty() && s[0] == '-') throw config_error(key + ": must be non-negative, got '" + s + "'");
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size()) return v;
    const double d = to_double(key, s);
    if (!(d >= 0.0) || d != std::floor(d) || d > 9.0e15) {
      throw config_error(key + ": expected a non-negative integer, got '" + s + "'");
    }
    return static_cast<std::uint64_t>(d);
  }

  std::map<std::string, std::string> values_;
};

// ---------------------------------------------------------------------------
// Law specifications
// ---------------------------------------------------------------------------

inline WeightSpec parse_weight_spec(const FlatConfig& c, const std::string& prefix = "x_law") {
  const std::string kind = c.get_string(prefix + ".kind", "");
  using K = WeightSpec::Kind;
  static const std::map<std::string, K> kinds{{"uniform01", K::uniform01},
                                              {"standard_gaussian", K::standard_gaussian},
                                              {"rademacher", K::rademacher},
                                              {"point_mass", K::point_mass},
                                              {"bernoulli", K::bernoulli},
                                              {"symmetric_pareto", K::symmetric_pareto},
                                              {"pareto_abs", K::pareto_abs}};
  const auto it = kinds.find(kind);
  if (it == kinds.end()) throw config_error(prefix + ".kind: unknown weight law '" + kind + "'");
  WeightSpec s;
  s.kind = it->second;
  s.c = c.get_double(prefix + ".c", s.c);
  s.p = c.get_double(prefix + ".p", s.p);
  s.x0 = c.get_double(prefix + ".x0", s.x0);
  s.x1 = c.get_double(prefix + ".x1", s.x1);
  s.gamma = c.get_double(prefix + ".gamma", s.gamma);
  return s;
}

struct MultiplierSpec {
  enum class Kind { pareto, slowly_varying, exponential, uniform01 };
  Kind kind = Kind::pareto;
  double beta = 0.5;
  double rate = 1.0;
  double scale = 1.0;
};

inline MultiplierSpec parse_multiplier_spec(const FlatConfig& c, const std::string& prefix = "y_law") {
  const std::string kind = c.get_string(prefix + ".kind", "");
  using K = MultiplierSpec::Kind;
  static const std::map<std::string, K> kinds{
      {"pareto", K::pareto}, {"slowly_varying", K::slowly_varying}, {"exponential", K::exponential}, {"uniform01", K::uniform01}};
  const auto it = kinds.find(kind);
  if (it == kinds.end()) throw config_error(prefix + ".kind: unknown multiplier law '" + kind + "'");
  MultiplierSpec s;
  s.kind = it->second;
  s.beta = c.get_double(prefix + ".beta", s.beta);
  s.rate = c.get_double(prefix + ".rate", s.rate);
  s.scale = c.get_double(prefix + ".scale", s.scale);
  return s;
}

inline MultiplierLawPtr make_multiplier_law(const MultiplierSpec& s) {
  MultiplierLawPtr base;
  switch (s.kind) {
    case MultiplierSpec::Kind::pareto: base = make_pareto_multiplier(s.beta); break;
    case MultiplierSpec::Kind::slowly_varying: base = make_slowly_varying_multiplier(); break;
    case MultiplierSpec::Kind::exponential:
      base = make_finite_mean_multiplier({FiniteMeanKind::Kind::exponential, s.rate});
      break;
    case MultiplierSpec::Kind::uniform01: base = make_finite_mean_multiplier({FiniteMeanKind::Kind::uniform01, 1.0}); break;
  }
  if (s.scale == 1.0) return base;
  return std::make_shared<ScaledMultiplier>(base, s.scale);
}

}  // namespace selfnorm
