#ifndef CZQ_CLI_CONFIG_HPP
#define CZQ_CLI_CONFIG_HPP

// Flat key-value experiment configuration with dotted keys.

#include <cctype>
#include <cmath>
#include <charconv>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "czq/error.hpp"

namespace czq::cli {

using cplx = std::complex<double>;

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<std::string> split_list(const std::string& s, const std::string& seps = ", \t") {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (seps.find(c) != std::string::npos) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* end = t.data() + t.size();
  auto [p, ec] = std::from_chars(t.data() + (t[0] == '+' ? 1 : 0), end, out);
  return ec == std::errc() && p == end;
}

}  // namespace detail

inline double parse_double(const std::string& s, const std::string& what) {
  double v;
  if (!detail::parse_double(s, v)) throw Error(Errc::config, what + ": not a number: '" + s + "'");
  return v;
}

// Accepts "a", "bi", "a+bi", "a-bi" and "(a,b)".
inline cplx parse_complex(const std::string& text, const std::string& what) {
  const std::string s = detail::trim(text);
  auto fail = [&] { return Error(Errc::config, what + ": not a complex number: '" + text + "'"); };
  if (s.empty()) throw fail();
  if (s.front() == '(' && s.back() == ')') {
    const auto parts = detail::split_list(s.substr(1, s.size() - 2), ",");
    if (parts.size() != 2) throw fail();
    return {parse_double(parts[0], what), parse_double(parts[1], what)};
  }
  if (s.back() != 'i' && s.back() != 'j') return parse_double(s, what);
  const std::string body = s.substr(0, s.size() - 1);
  // The split is at the last sign that does not belong to an exponent.
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      const std::string im = body.substr(k);
      return {parse_double(body.substr(0, k), what), im.size() == 1 ? (im == "-" ? -1.0 : 1.0) : parse_double(im, what)};
    }
  }
  if (body.empty() || body == "+") return {0.0, 1.0};
  if (body == "-") return {0.0, -1.0};
  return {0.0, parse_double(body, what)};
}

// Shortest text that reads back to the same double.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

class Config {
 public:
  static Config parse(std::istream& in) {
    Config c;
    std::vector<CLI::ConfigItem> items;
    try {
      items = CLI::ConfigINI().from_config(in);
    } catch (const std::exception& e) {
      throw Error(Errc::config, std::string("cannot parse config: ") + e.what());
    }
    for (const auto& it : items) {
      if (it.name == "++" || it.name == "--") continue;  // section markers
      std::string value;
      for (std::size_t k = 0; k < it.inputs.size(); ++k) value += (k ? "," : "") + it.inputs[k];
      c.values_[it.fullname()] = value;
    }
    return c;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::config, "cannot open config file '" + path + "'");
    return parse(in);
  }

  static Config from_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get(const std::string& key, const std::string& fallback) const {
    used_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }
  double get(const std::string& key, double fallback) const {
    return has(key) ? parse_double(get(key, std::string()), key) : (used_.insert(key), fallback);
  }
  int get(const std::string& key, int fallback) const {
    const double v = get(key, double(fallback));
    if (v != static_cast<int>(v)) throw Error(Errc::config, key + ": expected an integer");
    return static_cast<int>(v);
  }
  bool get(const std::string& key, bool fallback) const {
    if (!has(key)) return used_.insert(key), fallback;
    const std::string v = get(key, std::string());
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error(Errc::config, key + ": expected a boolean, got '" + v + "'");
  }
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const {
    if (!has(key)) return used_.insert(key), fallback;
    std::vector<double> out;
    for (const auto& t : detail::split_list(get(key, std::string()))) out.push_back(parse_double(t, key));
    if (out.empty()) throw Error(Errc::config, key + ": empty list");
    return out;
  }
  std::vector<cplx> get_complex_list(const std::string& key) const {
    std::vector<cplx> out;
    for (const auto& t : detail::split_list(get(key, std::string()))) out.push_back(parse_complex(t, key));
    return out;
  }
  // Keys below `prefix.`, in sorted order.
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
      if (k.rfind(prefix + ".", 0) == 0) out.push_back(k);
    return out;
  }

  // Rejects keys that no experiment looked at, which catches typos.
  void require_all_used() const {
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) throw Error(Errc::config, "unknown config key '" + k + "'");
  }

  const std::map<std::string, std::string>& values() const { return values_; }

  // Everything except the output location, which does not change results.
  std::map<std::string, std::string> result_keys() const {
    auto m = values_;
    m.erase("output.path");
    return m;
  }

  std::string canonical() const {
    std::string out;
    for (const auto& [k, v] : result_keys()) out += k + "=" + v + "\n";
    return out;
  }

  // FNV-1a over the canonical text.
  std::string hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical()) {
      h ^= c;
      h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace czq::cli

#endif
