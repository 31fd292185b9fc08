#pragma once

#include <algorithm>
#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "icntsch/common.hpp"

namespace icntsch::icn {

// Hierarchical content name, e.g. /iotlab/fw/17.
class Name {
 public:
  Name() = default;
  explicit Name(std::vector<std::string> components) : components_(std::move(components)) {
    for (const auto& c : components_) {
      if (c.empty()) throw ConfigError("empty name component");
      if (c == "*") throw ConfigError("wildcard is only allowed at the end of a FIB prefix");
    }
  }

  // Parses "/a/b/c". "/" is the empty name.
  static Name parse(std::string_view text) {
    if (text.empty() || text.front() != '/') {
      throw ConfigError("name must start with '/': " + std::string(text));
    }
    std::vector<std::string> parts;
    std::size_t pos = 1;
    while (pos < text.size()) {
      std::size_t next = text.find('/', pos);
      if (next == std::string_view::npos) next = text.size();
      parts.emplace_back(text.substr(pos, next - pos));
      pos = next + 1;
    }
    if (!text.empty() && text.size() > 1 && text.back() == '/') {
      throw ConfigError("empty name component in " + std::string(text));
    }
    return Name(std::move(parts));
  }

  Name append(std::string component) const {
    auto parts = components_;
    parts.push_back(std::move(component));
    return Name(std::move(parts));
  }

  bool is_prefix_of(const Name& other) const {
    return components_.size() <= other.components_.size() &&
           std::equal(components_.begin(), components_.end(), other.components_.begin());
  }

  std::size_t size() const { return components_.size(); }
  bool empty() const { return components_.empty(); }
  const std::vector<std::string>& components() const { return components_; }
  const std::string& back() const { return components_.back(); }

  std::string to_string() const {
    if (components_.empty()) return "/";
    std::string out;
    for (const auto& c : components_) {
      out += '/';
      out += c;
    }
    return out;
  }

  friend auto operator<=>(const Name&, const Name&) = default;
  friend bool operator==(const Name&, const Name&) = default;

 private:
  std::vector<std::string> components_;
};

// FIB prefix text: a name optionally ending in "*", which matches any
// (possibly empty) suffix. Prefix matching is the same with or without the
// trailing wildcard, so the canonical form drops it.
inline Name parse_prefix(std::string_view text) {
  if (text == "*" || text == "/*") return Name{};
  if (text.size() >= 2 && text.substr(text.size() - 2) == "/*") {
    return Name::parse(text.substr(0, text.size() - 2));
  }
  return Name::parse(text);
}

inline std::string prefix_to_string(const Name& prefix) {
  return prefix.empty() ? std::string("*") : prefix.to_string() + "/*";
}

}  // namespace icntsch::icn
