#include "oldroyd/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "oldroyd/csv.hpp"
#include "oldroyd/errors.hpp"

namespace oldroyd {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto* end = t.data() + t.size();
  auto [p, ec] = std::from_chars(t.data(), end, v);
  if (ec != std::errc{} || p != end || t.empty() || !std::isfinite(v))
    throw ConfigError(key + ": not a finite number: '" + text + "'");
  return v;
}

long long parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto* end = t.data() + t.size();
  auto [p, ec] = std::from_chars(t.data(), end, v);
  if (ec != std::errc{} || p != end || t.empty())
    throw ConfigError(key + ": not an integer: '" + text + "'");
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::string canonicalize(const std::string& key, Config::Type type,
                         const std::string& text) {
  switch (type) {
    case Config::Type::Double:
      return fmt17(parse_double(key, text));
    case Config::Type::Int:
      return std::to_string(parse_int(key, text));
    case Config::Type::Bool: {
      const std::string t = trim(text);
      if (t == "true" || t == "1" || t == "yes") return "true";
      if (t == "false" || t == "0" || t == "no") return "false";
      throw ConfigError(key + ": not a boolean: '" + text + "'");
    }
    case Config::Type::String:
      return trim(text);
    case Config::Type::DoubleList: {
      std::string out;
      for (double v : parse_list(key, text)) {
        if (!out.empty()) out += ",";
        out += fmt17(v);
      }
      return out;
    }
  }
  return {};
}

}  // namespace

Config::Config() {
  using T = Type;
  const auto add = [this](const std::string& k, T t, const std::string& v) {
    entries_[k] = Entry{t, canonicalize(k, t, v)};
  };
  add("physics.alpha", T::Double, "1");
  add("physics.beta", T::Double, "1");
  add("physics.K", T::Double, "1");
  add("physics.mu", T::Double, "0");

  add("grid.n", T::Int, "128");
  add("grid.L", T::Double, fmt17(2.0 * std::numbers::pi * 64.0));

  add("solver.dt", T::Double, "0.001");
  add("solver.dealias_fraction", T::Double, fmt17(2.0 / 3.0));
  add("solver.scheme", T::Int, "4");
  add("solver.nonlinear", T::Bool, "true");
  add("solver.T", T::Double, "50");
  add("solver.sample_every", T::Double, "0.1");
  add("solver.balance_every", T::Double, "0.001");
  add("solver.checkpoint_every", T::Double, "0");

  add("init.kind", T::String, "random");
  add("init.seed", T::Int, "1");
  add("init.h3_norm", T::Double, "0.01");
  add("init.band_lo", T::Int, "1");
  add("init.band_hi", T::Int, "16");
  add("init.tg_mode", T::Int, "4");
  add("init.tg_u_amp", T::Double, "0.001");
  add("init.tg_tau_amp", T::Double, "0.001");
  add("init.file", T::String, "");

  add("monitor.eta1", T::Double, "0.01");
  add("monitor.h3_growth_bound", T::Double, "2");
  add("monitor.monotone_tol", T::Double, "1e-10");
  add("monitor.ratio_after", T::Double, "5");
  add("monitor.balance_tolerance", T::Double, "1e-6");

  add("green.xi_points", T::Int, "65");
  add("green.times", T::DoubleList, "0.1,1,5,10,50");
  add("green.tolerance", T::Double, "1e-8");
  add("green.oracle_dt_fraction", T::Double, "0.1");

  add("decay.t_lo", T::Double, "100");
  add("decay.t_hi", T::Double, "10000");
  add("decay.samples", T::Int, "41");
  add("decay.ratio_start", T::String, "auto");
  add("decay.u_amplitude", T::Double, "1");
  add("decay.u_width", T::Double, "1");
  add("decay.sigma_amplitude", T::Double, "1");
  add("decay.sigma_width", T::Double, "1");
  add("decay.slope_tolerance", T::Double, "0.05");
  add("decay.ratio_bound", T::Double, "10");
  add("decay.lower_bound", T::Bool, "true");
  add("decay.rel_tol", T::Double, "1e-9");

  add("sweep.mus", T::DoubleList, "0.1,0.01,0.001,0.0001,0");
  add("sweep.T", T::Double, "20");
  add("sweep.spread_tolerance", T::Double, "0.1");
}

Config Config::parse(std::string_view text) {
  Config c;
  c.merge(text);
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Config::merge(std::string_view text) {
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const auto& [k, e] : entries_)
        if (k.compare(0, section.size() + 1, section + ".") == 0) known = true;
      if (!known) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "key outside of any section");
    set(section + "." + trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

void Config::set(const std::string& dotted_key, const std::string& value) {
  auto it = entries_.find(dotted_key);
  if (it == entries_.end()) throw ConfigError("unknown key: " + dotted_key);
  it->second.value = canonicalize(dotted_key, it->second.type, value);
}

const Config::Entry& Config::entry(const std::string& dotted_key, Type expected) const {
  auto it = entries_.find(dotted_key);
  if (it == entries_.end()) throw ConfigError("unknown key: " + dotted_key);
  if (it->second.type != expected) throw ConfigError("wrong type requested for " + dotted_key);
  return it->second;
}

double Config::get_double(const std::string& k) const {
  return parse_double(k, entry(k, Type::Double).value);
}
long long Config::get_int(const std::string& k) const {
  return parse_int(k, entry(k, Type::Int).value);
}
bool Config::get_bool(const std::string& k) const {
  return entry(k, Type::Bool).value == "true";
}
std::string Config::get_string(const std::string& k) const {
  return entry(k, Type::String).value;
}
std::vector<double> Config::get_list(const std::string& k) const {
  return parse_list(k, entry(k, Type::DoubleList).value);
}

std::string Config::canonical() const {
  std::string out, section;
  for (const auto& [k, e] : entries_) {
    const auto dot = k.find('.');
    const std::string s = k.substr(0, dot);
    if (s != section) {
      if (!section.empty()) out += "\n";
      out += "[" + s + "]\n";
      section = s;
    }
    out += k.substr(dot + 1) + " = " + e.value + "\n";
  }
  return out;
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace oldroyd
