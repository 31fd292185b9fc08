#pragma once

// Slow, obviously-correct counterparts used as test oracles.

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "icntsch/icn/fib.hpp"

namespace reference {

using icntsch::icn::FibMode;
namespace icn = icntsch::icn;

// Reference matcher over plain strings. Walks the name's prefixes from the
// longest down and takes the first hit per face.
struct NaiveFib {
  std::map<std::pair<std::string, icn::FaceId>, FibMode> table;  // "" is the root prefix

  static std::vector<std::string> prefixes_longest_first(const std::string& name) {
    std::vector<std::string> out{name};
    std::string cur = name;
    while (!cur.empty()) {
      cur.erase(cur.rfind('/'));
      out.push_back(cur);
    }
    return out;
  }

  std::vector<icn::FaceId> lookup(const std::string& name, const std::vector<icn::FaceId>& faces) const {
    std::set<icn::FaceId> inc, exc;
    for (auto f : faces) {
      for (const auto& p : prefixes_longest_first(name)) {
        auto it = table.find({p, f});
        if (it == table.end()) continue;
        (it->second == FibMode::kInclude ? inc : exc).insert(f);
        break;
      }
    }
    std::vector<icn::FaceId> out;
    for (auto f : faces) {
      if (!inc.empty() ? inc.count(f) : !exc.count(f)) out.push_back(f);
    }
    return out;
  }
};

// Random "/a/b/..." path of the given depth range over three components.
inline std::string random_path(std::mt19937& g, int min_depth, int max_depth) {
  static const char* kParts[] = {"a", "b", "c"};
  std::uniform_int_distribution<int> depth(min_depth, max_depth), part(0, 2);
  std::string s;
  for (int i = depth(g); i > 0; --i) s += std::string("/") + kParts[part(g)];
  return s;
}

// Every growth history of an N-node recursive tree, each with weight
// 1/(N-1)!. Returns counts[k][j] = histories in which node k has j
// descendants.
inline std::vector<std::vector<std::uint64_t>> enumerate_histories(std::uint32_t n, std::uint64_t& histories) {
  std::vector<std::vector<std::uint64_t>> counts(n + 1, std::vector<std::uint64_t>(n, 0));
  std::vector<std::uint32_t> parent(n + 1, 0);
  histories = 0;
  std::function<void(std::uint32_t)> grow = [&](std::uint32_t i) {
    if (i > n) {
      ++histories;
      std::vector<std::uint32_t> desc(n + 1, 0);
      for (std::uint32_t v = 2; v <= n; ++v)
        for (std::uint32_t a = parent[v]; a != 0; a = parent[a]) ++desc[a];
      for (std::uint32_t k = 1; k <= n; ++k) ++counts[k][desc[k]];
      return;
    }
    for (std::uint32_t p = 1; p < i; ++p) {
      parent[i] = p;
      grow(i + 1);
    }
  };
  grow(2);
  return counts;
}

}  // namespace reference
