#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "icntsch/common.hpp"
#include "icntsch/sim/kernel.hpp"

namespace icntsch::urt {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Index j holds P(j descendants).
template <typename T>
using Pmf = std::vector<T>;

inline BigInt rising_factorial(std::int64_t n, std::uint32_t j) {
  BigInt r = 1;
  for (std::uint32_t i = 0; i < j; ++i) r *= n + static_cast<std::int64_t>(i);
  return r;
}

inline BigInt falling_factorial(std::int64_t n, std::uint32_t j) {
  BigInt r = 1;
  for (std::uint32_t i = 0; i < j; ++i) r *= n - static_cast<std::int64_t>(i);
  return r;
}

namespace detail {
inline void check_args(std::uint32_t n, std::uint32_t k) {
  if (n < 2) throw std::domain_error("tree size must be >= 2");
  if (k < 2 || k > n) throw std::domain_error("node index must lie in 2..N");
}
}  // namespace detail

// Descendant count of node k in a uniform recursive tree on N nodes:
// P(j) = (k-1) (N-k-j+1)^(rising j) / ((N-j-1) (N-1)^(falling j)), j = 0..N-k.
// Exact in Rational; the floating variant walks the term ratio
// P(j+1)/P(j) = (N-k-j)/(N-j-2) to stay in range.
template <typename T>
Pmf<T> descendants_pmf(std::uint32_t n, std::uint32_t k) {
  detail::check_args(n, k);
  const std::uint32_t top = n - k;
  Pmf<T> pmf(n, T(0));
  if constexpr (std::is_same_v<T, Rational>) {
    for (std::uint32_t j = 0; j <= top; ++j) {
      BigInt num = BigInt(k - 1) * rising_factorial(std::int64_t(n) - k - j + 1, j);
      BigInt den = BigInt(n - j - 1) * falling_factorial(std::int64_t(n) - 1, j);
      pmf[j] = Rational(num, den);
    }
  } else {
    T p = T(k - 1) / T(n - 1);
    pmf[0] = p;
    for (std::uint32_t j = 0; j < top; ++j) {
      p = p * T(n - k - j) / T(n - j - 2);
      pmf[j + 1] = p;
    }
  }
  return pmf;
}

// Descendant count of a uniformly chosen node. With the root included it
// contributes a point mass at N-1.
template <typename T>
Pmf<T> subtree_size_distribution(std::uint32_t n, bool include_root = true) {
  if (n < 2) throw std::domain_error("tree size must be >= 2");
  Pmf<T> out(n, T(0));
  for (std::uint32_t k = 2; k <= n; ++k) {
    auto p = descendants_pmf<T>(n, k);
    for (std::uint32_t j = 0; j < n; ++j) out[j] += p[j];
  }
  if (include_root) out[n - 1] += T(1);
  const T weight = include_root ? T(n) : T(n - 1);
  for (auto& v : out) v /= weight;
  return out;
}

template <typename T>
T tail_probability(const Pmf<T>& pmf, std::uint32_t threshold) {
  T s(0);
  for (std::size_t j = threshold + 1; j < pmf.size(); ++j) s += pmf[j];
  return s;
}

template <typename T>
T pmf_sum(const Pmf<T>& pmf) {
  T s(0);
  for (const auto& v : pmf) s += v;
  return s;
}

inline Pmf<double> to_double(const Pmf<Rational>& p) {
  Pmf<double> out;
  out.reserve(p.size());
  for (const auto& v : p) out.push_back(static_cast<double>(v));
  return out;
}

// parent[i] for nodes 1..n (1-based; parent[0] and parent[1] are 0).
inline std::vector<std::uint32_t> sample_urt(std::uint32_t n, sim::Rng& rng) {
  std::vector<std::uint32_t> parent(n + 1, 0);
  for (std::uint32_t i = 2; i <= n; ++i) parent[i] = 1 + static_cast<std::uint32_t>(rng.below(i - 1));
  return parent;
}

// Descendants of every node; parents always precede children.
inline std::vector<std::uint32_t> descendant_counts(const std::vector<std::uint32_t>& parent) {
  const auto n = static_cast<std::uint32_t>(parent.size() - 1);
  std::vector<std::uint32_t> d(n + 1, 0);
  for (std::uint32_t i = n; i >= 2; --i) d[parent[i]] += d[i] + 1;
  return d;
}

// Empirical descendant-count distribution. Every iteration grows one tree
// and records all of its (eligible) nodes, which weights nodes uniformly.
inline Pmf<double> monte_carlo_distribution(std::uint32_t n, std::uint32_t iterations, std::uint64_t seed,
                                            bool include_root = true) {
  if (n < 1) throw std::domain_error("tree size must be >= 1");
  std::vector<std::uint64_t> counts(n, 0);
  std::uint64_t total = 0;
  for (std::uint32_t it = 0; it < iterations; ++it) {
    sim::Rng rng(seed, it, 0x7572u);
    auto d = descendant_counts(sample_urt(n, rng));
    for (std::uint32_t v = include_root ? 1 : 2; v <= n; ++v) {
      ++counts[d[v]];
      ++total;
    }
  }
  Pmf<double> out(n, 0.0);
  if (total == 0) return out;
  for (std::uint32_t j = 0; j < n; ++j) out[j] = static_cast<double>(counts[j]) / static_cast<double>(total);
  return out;
}

inline double total_variation(const Pmf<double>& a, const Pmf<double>& b) {
  const auto m = std::max(a.size(), b.size());
  double s = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double x = j < a.size() ? a[j] : 0.0;
    const double y = j < b.size() ? b[j] : 0.0;
    s += std::abs(x - y);
  }
  return 0.5 * s;
}

}  // namespace icntsch::urt
