#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace percolab {

/// A site of Z^(k+d), split into the k short directions u0 and the d long
/// directions u1. Long-range bonds live inside a fiber (fixed u0); short
/// bonds are nearest-neighbor steps in u0.
struct SplitPoint {
  std::vector<std::int64_t> u0;
  std::vector<std::int64_t> u1;

  bool operator==(const SplitPoint&) const = default;
};

/// Lexicographic order on (u0, u1); used to pick the canonical endpoint
/// order of an edge.
bool lex_less(const SplitPoint& a, const SplitPoint& b);

SplitPoint origin_point(int k, int d);
std::string to_string(const SplitPoint& p);

/// Model parameters. The coupling between u and v is
///   J_uv = 2 / (1 + ||u1-v1||^(d+epsilon))   if u0 == v0 and u1 != v1,
///   J_uv = 1                                 if u1 == v1 and ||u0-v0|| == 1,
///   J_uv = 0                                 otherwise,
/// and the bond probability is p_uv = beta * J_uv.
struct ModelParams {
  int k = 0;            ///< short dimensions, >= 0
  int d = 1;            ///< long dimensions, >= 1
  double epsilon = 1.0; ///< decay exponent, > 0
  double beta = 0.0;    ///< bond density, in [0,1]

  double exponent() const { return static_cast<double>(d) + epsilon; }

  /// Throws std::invalid_argument if any constraint is violated.
  void validate() const;
};

/// Closed coordinate box [lo0,hi0]^k x [lo1,hi1]^d with free boundary:
/// edges leaving the box do not exist. Sites are indexed row-major with the
/// u0 axes outermost, so each fiber occupies a contiguous index range and
/// index order equals lexicographic order on (u0, u1).
struct Box {
  std::vector<std::int64_t> lo0, hi0;
  std::vector<std::int64_t> lo1, hi1;

  int k() const { return static_cast<int>(lo0.size()); }
  int d() const { return static_cast<int>(lo1.size()); }

  void validate() const;

  std::uint64_t site_count() const;
  std::uint64_t fiber_size() const;

  bool contains(const SplitPoint& p) const;
  std::uint32_t index_of(const SplitPoint& p) const;  ///< throws if outside
  SplitPoint site_at(std::uint32_t index) const;

  /// Symmetric box [-r0,r0]^k x [-r1,r1]^d.
  static Box centered(int k, int d, std::int64_t r0, std::int64_t r1);

  bool operator==(const Box&) const = default;
};

/// Unordered candidate edge with its bond probability. Endpoints are stored
/// in canonical (lexicographic) order.
struct Edge {
  SplitPoint u, v;
  double probability = 0.0;
};

/// Same edge, endpoints as site indices of the enclosing box. a < b.
struct IndexedEdge {
  std::uint32_t a = 0, b = 0;
  double probability = 0.0;
};

/// L1 norm.
std::uint64_t l1_norm(std::span<const std::int64_t> x);
std::uint64_t l1_dist(std::span<const std::int64_t> a, std::span<const std::int64_t> b);

/// J_uv as defined above. Throws on (k,d) mismatch with the params.
double coupling(const SplitPoint& u, const SplitPoint& v, const ModelParams& p);

/// p_uv = beta * J_uv.
double bond_probability(const SplitPoint& u, const SplitPoint& v, const ModelParams& p);

/// All candidate edges (positive probability) inside the box, in canonical
/// order: ascending first endpoint index, then second. No duplicates.
std::vector<IndexedEdge> enumerate_edges_indexed(const Box& box, const ModelParams& p);
std::vector<Edge> enumerate_edges(const Box& box, const ModelParams& p);

}  // namespace percolab
