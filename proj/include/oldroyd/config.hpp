#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace oldroyd {

/// Line-based experiment configuration.
///
///   # comment
///   [section]
///   key = value
///
/// Every key has a registered type and default; unknown sections or keys and
/// malformed values raise ConfigError. The resolved configuration (all keys,
/// sorted, numbers re-printed canonically) is itself a valid config file and is
/// what the run id hashes.
class Config {
 public:
  enum class Type { Double, Int, Bool, String, DoubleList };

  /// All keys at their defaults.
  Config();

  static Config parse(std::string_view text);
  static Config load(const std::filesystem::path& path);

  /// Overlay settings from text onto this config.
  void merge(std::string_view text);
  /// Set "section.key" from its textual form (validated and canonicalized).
  void set(const std::string& dotted_key, const std::string& value);

  double get_double(const std::string& dotted_key) const;
  long long get_int(const std::string& dotted_key) const;
  bool get_bool(const std::string& dotted_key) const;
  std::string get_string(const std::string& dotted_key) const;
  std::vector<double> get_list(const std::string& dotted_key) const;

  /// Sorted "[section]\nkey = value" dump of every key.
  std::string canonical() const;

 private:
  struct Entry {
    Type type;
    std::string value;
  };
  const Entry& entry(const std::string& dotted_key, Type expected) const;

  std::map<std::string, Entry> entries_;
};

/// 64-bit FNV-1a hash as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace oldroyd
