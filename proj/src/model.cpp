#include "percolab/model.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace percolab {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_dims(const SplitPoint& p, const ModelParams& mp) {
  require(static_cast<int>(p.u0.size()) == mp.k && static_cast<int>(p.u1.size()) == mp.d,
          "point dimensions do not match (k,d)");
}

}  // namespace

bool lex_less(const SplitPoint& a, const SplitPoint& b) {
  if (a.u0 != b.u0) return a.u0 < b.u0;
  return a.u1 < b.u1;
}

SplitPoint origin_point(int k, int d) {
  return SplitPoint{std::vector<std::int64_t>(static_cast<std::size_t>(k), 0),
                    std::vector<std::int64_t>(static_cast<std::size_t>(d), 0)};
}

std::string to_string(const SplitPoint& p) {
  std::ostringstream os;
  for (std::size_t i = 0; i < p.u0.size(); ++i) os << (i ? " " : "") << p.u0[i];
  os << "|";
  for (std::size_t i = 0; i < p.u1.size(); ++i) os << (i ? " " : "") << p.u1[i];
  return os.str();
}

void ModelParams::validate() const {
  require(k >= 0, "k must be >= 0");
  require(d >= 1, "d must be >= 1");
  require(epsilon > 0.0, "epsilon must be > 0");
  require(beta >= 0.0 && beta <= 1.0, "beta must be in [0,1]");
}

void Box::validate() const {
  require(lo0.size() == hi0.size() && lo1.size() == hi1.size(), "box bound lengths differ");
  require(!lo1.empty(), "box needs at least one long direction");
  for (std::size_t i = 0; i < lo0.size(); ++i) require(lo0[i] <= hi0[i], "box has lo > hi");
  for (std::size_t i = 0; i < lo1.size(); ++i) require(lo1[i] <= hi1[i], "box has lo > hi");
  // Guard the uint32 site indexing.
  require(site_count() <= (1ull << 31), "box too large");
}

std::uint64_t Box::site_count() const {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < lo0.size(); ++i)
    n *= static_cast<std::uint64_t>(hi0[i] - lo0[i] + 1);
  return n * fiber_size();
}

std::uint64_t Box::fiber_size() const {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < lo1.size(); ++i)
    n *= static_cast<std::uint64_t>(hi1[i] - lo1[i] + 1);
  return n;
}

bool Box::contains(const SplitPoint& p) const {
  if (p.u0.size() != lo0.size() || p.u1.size() != lo1.size()) return false;
  for (std::size_t i = 0; i < lo0.size(); ++i)
    if (p.u0[i] < lo0[i] || p.u0[i] > hi0[i]) return false;
  for (std::size_t i = 0; i < lo1.size(); ++i)
    if (p.u1[i] < lo1[i] || p.u1[i] > hi1[i]) return false;
  return true;
}

std::uint32_t Box::index_of(const SplitPoint& p) const {
  require(contains(p), "site outside box");
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < lo0.size(); ++i)
    idx = idx * static_cast<std::uint64_t>(hi0[i] - lo0[i] + 1) +
          static_cast<std::uint64_t>(p.u0[i] - lo0[i]);
  for (std::size_t i = 0; i < lo1.size(); ++i)
    idx = idx * static_cast<std::uint64_t>(hi1[i] - lo1[i] + 1) +
          static_cast<std::uint64_t>(p.u1[i] - lo1[i]);
  return static_cast<std::uint32_t>(idx);
}

SplitPoint Box::site_at(std::uint32_t index) const {
  SplitPoint p = origin_point(k(), d());
  std::uint64_t rest = index;
  for (std::size_t i = lo1.size(); i-- > 0;) {
    const std::uint64_t e = static_cast<std::uint64_t>(hi1[i] - lo1[i] + 1);
    p.u1[i] = lo1[i] + static_cast<std::int64_t>(rest % e);
    rest /= e;
  }
  for (std::size_t i = lo0.size(); i-- > 0;) {
    const std::uint64_t e = static_cast<std::uint64_t>(hi0[i] - lo0[i] + 1);
    p.u0[i] = lo0[i] + static_cast<std::int64_t>(rest % e);
    rest /= e;
  }
  return p;
}

Box Box::centered(int k, int d, std::int64_t r0, std::int64_t r1) {
  Box b;
  b.lo0.assign(static_cast<std::size_t>(k), -r0);
  b.hi0.assign(static_cast<std::size_t>(k), r0);
  b.lo1.assign(static_cast<std::size_t>(d), -r1);
  b.hi1.assign(static_cast<std::size_t>(d), r1);
  return b;
}

std::uint64_t l1_norm(std::span<const std::int64_t> x) {
  std::uint64_t s = 0;
  for (std::int64_t c : x) s += static_cast<std::uint64_t>(c < 0 ? -c : c);
  return s;
}

std::uint64_t l1_dist(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
  require(a.size() == b.size(), "vector lengths differ");
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::int64_t c = a[i] - b[i];
    s += static_cast<std::uint64_t>(c < 0 ? -c : c);
  }
  return s;
}

double coupling(const SplitPoint& u, const SplitPoint& v, const ModelParams& p) {
  p.validate();
  check_dims(u, p);
  check_dims(v, p);
  if (u.u0 == v.u0) {
    if (u.u1 == v.u1) return 0.0;  // no self-loops
    const double r = static_cast<double>(l1_dist(u.u1, v.u1));
    return 2.0 / (1.0 + std::pow(r, p.exponent()));
  }
  if (u.u1 == v.u1 && l1_dist(u.u0, v.u0) == 1) return 1.0;
  return 0.0;
}

double bond_probability(const SplitPoint& u, const SplitPoint& v, const ModelParams& p) {
  return p.beta * coupling(u, v, p);
}

std::vector<IndexedEdge> enumerate_edges_indexed(const Box& box, const ModelParams& p) {
  p.validate();
  box.validate();
  require(box.k() == p.k && box.d() == p.d, "box dimensions do not match (k,d)");

  const std::uint32_t n_sites = static_cast<std::uint32_t>(box.site_count());
  const std::uint32_t fiber = static_cast<std::uint32_t>(box.fiber_size());
  const std::uint32_t n_fibers = n_sites / fiber;

  // Long-range distances between fiber offsets.
  std::vector<std::uint64_t> fiber_l1(static_cast<std::size_t>(fiber) * fiber);
  {
    std::vector<SplitPoint> pts(fiber);
    for (std::uint32_t i = 0; i < fiber; ++i) pts[i] = box.site_at(i);
    for (std::uint32_t i = 0; i < fiber; ++i)
      for (std::uint32_t j = 0; j < fiber; ++j)
        fiber_l1[static_cast<std::size_t>(i) * fiber + j] = l1_dist(pts[i].u1, pts[j].u1);
  }
  std::uint64_t max_r = 0;
  for (std::uint64_t r : fiber_l1) max_r = std::max(max_r, r);
  std::vector<double> p_long(max_r + 1, 0.0);
  for (std::uint64_t r = 1; r <= max_r; ++r)
    p_long[r] = p.beta * 2.0 / (1.0 + std::pow(static_cast<double>(r), p.exponent()));

  // Strides of the u0 axes in units of sites.
  std::vector<std::uint64_t> stride0(static_cast<std::size_t>(box.k()), fiber);
  for (std::size_t i = box.lo0.size(); i-- > 1;)
    stride0[i - 1] = stride0[i] * static_cast<std::uint64_t>(box.hi0[i] - box.lo0[i] + 1);

  std::vector<IndexedEdge> edges;
  edges.reserve(static_cast<std::size_t>(n_fibers) * fiber * (fiber - 1) / 2);
  for (std::uint32_t a = 0; a < n_sites; ++a) {
    const std::uint32_t fa = a / fiber;
    const std::uint32_t oa = a % fiber;
    // Intra-fiber long-range partners after a.
    for (std::uint32_t ob = oa + 1; ob < fiber; ++ob) {
      const std::uint64_t r = fiber_l1[static_cast<std::size_t>(oa) * fiber + ob];
      edges.push_back({a, fa * fiber + ob, p_long[r]});
    }
    // Nearest-neighbor short partners with larger index. Iterate axes from
    // the innermost out so the b indices come out ascending.
    const SplitPoint pa = box.site_at(a);
    for (int j = box.k(); j-- > 0;) {
      if (pa.u0[static_cast<std::size_t>(j)] + 1 <= box.hi0[static_cast<std::size_t>(j)])
        edges.push_back({a, a + static_cast<std::uint32_t>(stride0[static_cast<std::size_t>(j)]),
                         p.beta});
    }
  }

  return edges;
}

std::vector<Edge> enumerate_edges(const Box& box, const ModelParams& p) {
  std::vector<Edge> out;
  const auto indexed = enumerate_edges_indexed(box, p);
  out.reserve(indexed.size());
  // Site index order equals lexicographic order on (u0,u1), so a < b is
  // already the canonical endpoint order.
  for (const auto& e : indexed)
    out.push_back({box.site_at(e.a), box.site_at(e.b), e.probability});
  return out;
}

}  // namespace percolab
