#pragma once

#include <algorithm>
#include <climits>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "morstone/errors.hpp"
#include "morstone/lmodel.hpp"
#include "morstone/rational.hpp"

namespace morstone::balg {

/// Relational presentation of a Boolean algebra: generators named by
/// integer ids, order pairs, disjointness pairs, and an optional block
/// partition. The algebra itself is "free except for the relations"; it is
/// handled entirely through its satisfying 0/1 assignments.
struct BoolPresentation {
  std::vector<int> gens;  // sorted, unique
  std::set<std::pair<int, int>> leq;
  std::set<std::pair<int, int>> dis;
  std::map<int, int> block;
  bool uses_blocks = false;

  bool has_gen(int g) const {
    return std::binary_search(gens.begin(), gens.end(), g);
  }
  int position(int g) const {
    const auto it = std::lower_bound(gens.begin(), gens.end(), g);
    if (it == gens.end() || *it != g)
      throw std::invalid_argument("unknown generator " + std::to_string(g));
    return static_cast<int>(it - gens.begin());
  }

  void validate() const {
    for (std::size_t i = 1; i < gens.size(); ++i)
      if (gens[i - 1] >= gens[i])
        throw std::invalid_argument("generator list not sorted/unique");
    for (const auto& [x, y] : leq) {
      if (!has_gen(x) || !has_gen(y))
        throw std::invalid_argument("order pair over unknown generator");
      if (x == y) throw std::invalid_argument("reflexive order pair stored");
      if (leq.contains({y, x}))
        throw std::invalid_argument("order stored in both directions");
    }
    for (const auto& [x, y] : dis) {
      if (!has_gen(x) || !has_gen(y))
        throw std::invalid_argument("disjointness pair over unknown generator");
      if (x >= y) throw std::invalid_argument("disjointness pair not normalized");
      if (leq.contains({x, y}) || leq.contains({y, x}))
        throw std::invalid_argument("pair both ordered and disjoint");
    }
    for (const auto& [p, b] : block) {
      (void)b;
      if (!has_gen(p))
        throw std::invalid_argument("block label on unknown generator");
    }
  }

  /// Transitively closes the order part. Throws when closure runs into a
  /// disjointness pair or a cycle.
  void close_order() {
    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<std::pair<int, int>> add;
      for (const auto& [x, y] : leq) {
        const auto lo = leq.lower_bound({y, INT_MIN});
        const auto hi = leq.lower_bound({y + 1, INT_MIN});
        for (auto it = lo; it != hi; ++it)
          if (!leq.contains({x, it->second})) add.push_back({x, it->second});
      }
      for (const auto& [x, y] : add) {
        if (x == y) throw std::invalid_argument("order closure found a cycle");
        if (dis.contains({std::min(x, y), std::max(x, y)}))
          throw std::invalid_argument(
              "order closure runs into a disjointness pair");
        changed |= leq.insert({x, y}).second;
      }
    }
  }

  friend bool operator==(const BoolPresentation& a, const BoolPresentation& b) {
    return a.gens == b.gens && a.leq == b.leq && a.dis == b.dis &&
           a.block == b.block && a.uses_blocks == b.uses_blocks;
  }
};

inline BoolPresentation presentation_from_model(const lmodel::GenModel& m) {
  BoolPresentation p;
  p.gens.resize(m.universe);
  for (int i = 0; i < m.universe; ++i) p.gens[i] = i;
  p.leq = m.leq;
  p.dis = m.dis;
  p.block = m.block;
  p.uses_blocks = !m.block.empty();
  return p;
}

/// A point of the Stone space, as the 0/1 values of the generators in
/// `gens` order. Valid assignments respect order (a 1 forces 1 upward) and
/// never set both ends of a disjointness pair.
using Assignment = std::vector<std::uint8_t>;

enum class Backend { Enumeration, Propagation };

inline std::size_t default_budget() {
  if (const char* env = std::getenv("MORSTONE_SOLVER_BUDGET")) {
    const long v = std::atol(env);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return 20;
}

namespace detail {

/// Position-indexed adjacency built once per presentation.
struct PropIndex {
  std::vector<std::vector<int>> up;       // x -> {y : x below y}
  std::vector<std::vector<int>> down;     // y -> {x : x below y}
  std::vector<std::vector<int>> dis_adj;  // symmetric

  explicit PropIndex(const BoolPresentation& p) {
    const int n = static_cast<int>(p.gens.size());
    up.resize(n);
    down.resize(n);
    dis_adj.resize(n);
    for (const auto& [x, y] : p.leq) {
      up[p.position(x)].push_back(p.position(y));
      down[p.position(y)].push_back(p.position(x));
    }
    for (const auto& [x, y] : p.dis) {
      dis_adj[p.position(x)].push_back(p.position(y));
      dis_adj[p.position(y)].push_back(p.position(x));
    }
    for (auto& adj : dis_adj) std::sort(adj.begin(), adj.end());
  }
  int size() const { return static_cast<int>(up.size()); }
  bool dis_between(int a, int b) const {
    return std::binary_search(dis_adj[a].begin(), dis_adj[a].end(), b);
  }
};

constexpr std::uint8_t kUnset = 2;

/// Forces `pos = value` and everything that follows. Returns false on
/// contradiction; `trail` records every newly set position for undo.
inline bool propagate(const PropIndex& idx, std::vector<std::uint8_t>& state,
                      int pos, std::uint8_t value, std::vector<int>& trail) {
  std::vector<int> queue{pos};
  auto set = [&](int q, std::uint8_t v) {
    if (state[q] == v) return true;
    if (state[q] != kUnset) return false;
    state[q] = v;
    trail.push_back(q);
    queue.push_back(q);
    return true;
  };
  if (!set(pos, value)) return false;
  while (!queue.empty()) {
    const int q = queue.back();
    queue.pop_back();
    if (state[q] == 1) {
      for (int y : idx.up[q])
        if (!set(y, 1)) return false;
      for (int y : idx.dis_adj[q])
        if (!set(y, 0)) return false;
    } else {
      for (int x : idx.down[q])
        if (!set(x, 0)) return false;
    }
  }
  return true;
}

inline void undo(std::vector<std::uint8_t>& state, std::vector<int>& trail,
                 std::size_t mark) {
  while (trail.size() > mark) {
    state[trail.back()] = kUnset;
    trail.pop_back();
  }
}

inline bool satisfies(const BoolPresentation& p, const Assignment& a) {
  for (const auto& [x, y] : p.leq)
    if (a[p.position(x)] == 1 && a[p.position(y)] == 0) return false;
  for (const auto& [x, y] : p.dis)
    if (a[p.position(x)] == 1 && a[p.position(y)] == 1) return false;
  return true;
}

}  // namespace detail

/// All satisfying assignments, in lexicographic order with the first
/// generator most significant. The enumeration backend walks the full cube;
/// the propagation backend branches with forcing. Both refuse presentations
/// beyond the budget.
inline std::vector<Assignment> stone_points(const BoolPresentation& p,
                                            Backend backend = Backend::Enumeration,
                                            std::size_t budget = default_budget()) {
  const std::size_t n = p.gens.size();
  if (n > budget)
    throw TooLargeError("presentation has " + std::to_string(n) +
                        " generators, budget " + std::to_string(budget));
  std::vector<Assignment> out;
  if (backend == Backend::Enumeration) {
    std::vector<std::pair<int, int>> leq_pos, dis_pos;
    for (const auto& [x, y] : p.leq)
      leq_pos.push_back({p.position(x), p.position(y)});
    for (const auto& [x, y] : p.dis)
      dis_pos.push_back({p.position(x), p.position(y)});
    Assignment a(n, 0);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      for (std::size_t i = 0; i < n; ++i)
        a[i] = static_cast<std::uint8_t>((mask >> (n - 1 - i)) & 1);
      bool ok = true;
      for (const auto& [x, y] : leq_pos)
        if (a[x] == 1 && a[y] == 0) {
          ok = false;
          break;
        }
      if (ok)
        for (const auto& [x, y] : dis_pos)
          if (a[x] == 1 && a[y] == 1) {
            ok = false;
            break;
          }
      if (ok) out.push_back(a);
    }
    return out;
  }
  const detail::PropIndex idx(p);
  std::vector<std::uint8_t> state(n, detail::kUnset);
  std::vector<int> trail;
  std::function<void(int)> dfs = [&](int pos) {
    while (pos < static_cast<int>(n) && state[pos] != detail::kUnset) ++pos;
    if (pos == static_cast<int>(n)) {
      out.emplace_back(state.begin(), state.end());
      return;
    }
    for (std::uint8_t v : {std::uint8_t{0}, std::uint8_t{1}}) {
      const std::size_t mark = trail.size();
      if (detail::propagate(idx, state, pos, v, trail)) dfs(pos + 1);
      detail::undo(state, trail, mark);
    }
  };
  dfs(0);
  return out;
}

/// The algebra of elements over an enumerated Stone space. Elements are
/// subsets of the point list; the generator i denotes the points setting it
/// to 1.
class ElementAlgebra {
 public:
  using Element = std::vector<std::uint8_t>;  // mask over points

  explicit ElementAlgebra(BoolPresentation pres,
                          Backend backend = Backend::Enumeration,
                          std::size_t budget = default_budget())
      : pres_(std::move(pres)), points_(stone_points(pres_, backend, budget)) {}

  const BoolPresentation& presentation() const { return pres_; }
  const std::vector<Assignment>& points() const { return points_; }

  Element zero() const { return Element(points_.size(), 0); }
  Element one() const { return Element(points_.size(), 1); }
  Element generator(int g) const {
    const int pos = pres_.position(g);
    Element e(points_.size(), 0);
    for (std::size_t i = 0; i < points_.size(); ++i) e[i] = points_[i][pos];
    return e;
  }
  Element meet(const Element& a, const Element& b) const {
    Element e(points_.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = a[i] & b[i];
    return e;
  }
  Element join(const Element& a, const Element& b) const {
    Element e(points_.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = a[i] | b[i];
    return e;
  }
  Element complement(const Element& a) const {
    Element e(points_.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = a[i] ^ 1;
    return e;
  }
  bool leq(const Element& a, const Element& b) const {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] && !b[i]) return false;
    return true;
  }
  bool disjoint(const Element& a, const Element& b) const {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] && b[i]) return false;
    return true;
  }
  bool is_zero(const Element& a) const {
    return std::all_of(a.begin(), a.end(), [](std::uint8_t v) { return !v; });
  }
  bool is_one(const Element& a) const {
    return std::all_of(a.begin(), a.end(), [](std::uint8_t v) { return v; });
  }

 private:
  BoolPresentation pres_;
  std::vector<Assignment> points_;
};

namespace detail {

inline bool generator_nonzero_at(const PropIndex& idx, int pos) {
  std::vector<std::uint8_t> state(idx.size(), kUnset);
  std::vector<int> trail;
  return propagate(idx, state, pos, 1, trail);
}

inline bool generators_disjoint_at(const PropIndex& idx, int pos1, int pos2) {
  std::vector<std::uint8_t> state(idx.size(), kUnset);
  std::vector<int> trail;
  if (!propagate(idx, state, pos1, 1, trail)) return true;
  return !propagate(idx, state, pos2, 1, trail);
}

}  // namespace detail

/// True when some assignment raises the generator: seeds it to 1 and checks
/// that forcing reaches no contradiction. Runs on the full presentation, so
/// the answer accounts for relations outside the generator's neighbourhood.
inline bool generator_nonzero(const BoolPresentation& p, int g) {
  return detail::generator_nonzero_at(detail::PropIndex(p), p.position(g));
}

/// True when no assignment raises both generators.
inline bool generators_disjoint(const BoolPresentation& p, int g1, int g2) {
  return detail::generators_disjoint_at(detail::PropIndex(p), p.position(g1),
                                        p.position(g2));
}

/// Sum of rational coefficients over generators; a simple function on the
/// Stone space.
struct SimpleTerm {
  Rational coef;
  int gen = 0;
};
using SimpleFunction = std::vector<SimpleTerm>;

/// Supremum norm of a simple function over the Stone space, as an exact
/// rational. The enumeration backend evaluates every point. The propagation
/// backend branches only over the generators appearing in the terms and
/// accepts a branch when forcing stays consistent (any consistent forced
/// state extends to a point by zeroing the rest), so it answers relative to
/// the full presentation.
inline Rational norm_simple(const BoolPresentation& p, const SimpleFunction& f,
                            Backend backend = Backend::Propagation,
                            std::size_t budget = default_budget()) {
  if (backend == Backend::Enumeration) {
    Rational best(0);
    for (const Assignment& a : stone_points(p, Backend::Enumeration, budget)) {
      Rational sum(0);
      for (const SimpleTerm& t : f)
        if (a[p.position(t.gen)]) sum += t.coef;
      best = max(best, sum.abs());
    }
    return best;
  }
  std::vector<int> scope;
  for (const SimpleTerm& t : f) scope.push_back(p.position(t.gen));
  std::sort(scope.begin(), scope.end());
  scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
  if (scope.size() > budget)
    throw TooLargeError("norm scope has " + std::to_string(scope.size()) +
                        " generators, budget " + std::to_string(budget));
  const detail::PropIndex idx(p);
  std::vector<std::uint8_t> state(p.gens.size(), detail::kUnset);
  std::vector<int> trail;
  Rational best(0);
  std::function<void(std::size_t)> dfs = [&](std::size_t k) {
    while (k < scope.size() && state[scope[k]] != detail::kUnset) ++k;
    if (k == scope.size()) {
      Rational sum(0);
      for (const SimpleTerm& t : f)
        if (state[p.position(t.gen)] == 1) sum += t.coef;
      best = max(best, sum.abs());
      return;
    }
    for (std::uint8_t v : {std::uint8_t{0}, std::uint8_t{1}}) {
      const std::size_t mark = trail.size();
      if (detail::propagate(idx, state, scope[k], v, trail)) dfs(k + 1);
      detail::undo(state, trail, mark);
    }
  };
  dfs(0);
  return best;
}

/// Assignment avoiding every element of F, or nothing when the F's join to
/// the top of the algebra. F is given extensionally as element masks over
/// the algebra's point list.
inline std::optional<Assignment> nice_property(
    const ElementAlgebra& alg, const std::vector<ElementAlgebra::Element>& F) {
  for (std::size_t i = 0; i < alg.points().size(); ++i) {
    bool inside = false;
    for (const auto& e : F)
      if (e[i]) {
        inside = true;
        break;
      }
    if (!inside) return alg.points()[i];
  }
  return std::nullopt;
}

namespace detail {

inline Assignment nice_property_at(const PropIndex& idx,
                                   const std::vector<int>& fpos) {
  const int n = idx.size();
  std::vector<char> in_f(n, 0);
  for (int q : fpos) in_f[q] = 1;
  // scan candidates adjacent to the smallest family member only
  const int anchor = fpos.empty() ? -1 : fpos.front();
  const std::vector<int> everything = [&] {
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    return all;
  }();
  const std::vector<int>& candidates =
      anchor >= 0 ? idx.dis_adj[anchor] : everything;
  for (int w : candidates) {
    if (in_f[w]) continue;
    bool covers = true;
    for (int q : fpos)
      if (!idx.dis_between(w, q)) {
        covers = false;
        break;
      }
    if (!covers) continue;
    std::vector<std::uint8_t> state(n, kUnset);
    std::vector<int> trail;
    bool ok = propagate(idx, state, w, 1, trail);
    for (int q : fpos)
      if (ok) ok = propagate(idx, state, q, 0, trail);
    if (!ok) continue;
    Assignment a(n, 0);
    for (int i = 0; i < n; ++i) a[i] = state[i] == 1 ? 1 : 0;
    return a;
  }
  return Assignment(n, 0);  // always valid: nothing is raised
}

}  // namespace detail

/// Witness for a set of generator ids: an assignment setting all of F to 0.
/// Prefers a point disjoint from everything in F raised to 1 (the shape the
/// construction provides through its per-stage extra points); the all-zero
/// assignment covers the rest.
inline Assignment nice_property_generators(const BoolPresentation& p,
                                           const std::vector<int>& F) {
  std::vector<int> fpos;
  for (int g : F) fpos.push_back(p.position(g));
  return detail::nice_property_at(detail::PropIndex(p), fpos);
}

struct CAlgebraIssue {
  std::string check;
  std::string detail;
};

struct CAlgebraReport {
  std::vector<CAlgebraIssue> issues;
  std::size_t family_bound = 0;
  std::size_t families_checked = 0;
  bool witnesses_zero_family = true;
  bool pass() const { return issues.empty(); }
};

/// Verifies the c-algebra shape of a presentation with a total block
/// partition: every block is an antichain of pairwise disjoint nonzero
/// elements, blocks do not overlap, and for every generator family up to
/// `max_family` the join stays below the top, witnessed by an assignment
/// zeroing the family.
inline CAlgebraReport is_c_algebra(const BoolPresentation& p,
                                   std::size_t max_family = 4) {
  CAlgebraReport report;
  report.family_bound = max_family;
  auto fail = [&](std::string check, std::string detail) {
    report.issues.push_back({std::move(check), std::move(detail)});
  };

  for (int g : p.gens)
    if (!p.block.contains(g))
      fail("block-total", "generator " + std::to_string(g) + " has no block");
  if (!report.pass()) return report;

  std::map<int, std::vector<int>> classes;
  for (const auto& [g, b] : p.block) classes[b].push_back(g);

  const detail::PropIndex idx(p);
  for (int g : p.gens)
    if (!detail::generator_nonzero_at(idx, p.position(g)))
      fail("generator-nonzero",
           "generator " + std::to_string(g) + " denotes zero");

  for (const auto& [b, members] : classes) {
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        const int x = members[i], y = members[j];
        if (p.leq.contains({x, y}) || p.leq.contains({y, x}))
          fail("block-antichain", "block " + std::to_string(b) +
                                      " holds the comparable pair (" +
                                      std::to_string(x) + "," +
                                      std::to_string(y) + ")");
        else if (!detail::generators_disjoint_at(idx, p.position(x),
                                                 p.position(y)))
          fail("block-antichain", "block " + std::to_string(b) +
                                      " holds the non-disjoint pair (" +
                                      std::to_string(x) + "," +
                                      std::to_string(y) + ")");
      }
  }

  // every generator family up to the bound misses some point
  const int n = static_cast<int>(p.gens.size());
  std::vector<int> family;  // positions
  std::function<void(int, std::size_t)> visit = [&](int start,
                                                    std::size_t left) {
    if (!family.empty()) {
      ++report.families_checked;
      const Assignment w = detail::nice_property_at(idx, family);
      for (int q : family)
        if (w[q] != 0) {
          report.witnesses_zero_family = false;
          fail("nice-property", "witness raises a member of the family");
        }
      for (int q = 0; q < n; ++q) {
        if (w[q] != 1) continue;
        for (int y : idx.up[q])
          if (w[y] != 1) fail("nice-property", "witness breaks the order");
        for (int y : idx.dis_adj[q])
          if (w[y] == 1)
            fail("nice-property", "witness breaks a disjointness pair");
      }
    }
    if (left == 0) return;
    for (int i = start; i < n; ++i) {
      family.push_back(i);
      visit(i + 1, left - 1);
      family.pop_back();
    }
  };
  visit(0, max_family);

  return report;
}

/// Chain-or-antichain probe: with kind 1 the generators must form a chain in
/// the given order, with kind 0 they must be pairwise disjoint.
inline bool dichotomy_check(const BoolPresentation& p,
                            const std::vector<int>& indices, int kind) {
  if (kind != 0 && kind != 1) throw std::invalid_argument("kind must be 0 or 1");
  for (int g : indices) (void)p.position(g);
  for (std::size_t i = 0; i < indices.size(); ++i)
    for (std::size_t j = i + 1; j < indices.size(); ++j) {
      const int x = indices[i], y = indices[j];
      if (kind == 1) {
        if (!p.leq.contains({x, y})) return false;
      } else {
        if (!p.dis.contains({std::min(x, y), std::max(x, y)})) return false;
      }
    }
  return true;
}

struct ScenarioReport {
  int n_star = 0;
  Rational c;
  Rational epsilon_max;
  Rational sum_bound_ratio;       // (n*^2+1)/n*
  bool ratio_exceeds_n_star = false;
  bool chain_bound_collapses = false;  // (n*-1) + (n*^2+1)/(n*^2+1) == n*
};

/// The arithmetic around an embedding scenario with distortion bound c and
/// separation parameter n*: the largest usable epsilon and the two exact
/// inequalities the norm dichotomy rests on.
inline ScenarioReport scenario_bounds(int n_star, const Rational& c) {
  if (n_star < 3) throw std::invalid_argument("scenario needs n* >= 3");
  if (!(Rational(0) < c) || !(c < Rational(n_star)))
    throw std::invalid_argument("scenario needs 0 < c < n*");
  ScenarioReport r;
  r.n_star = n_star;
  r.c = c;
  const Rational n(n_star);
  const Rational nsq_plus(static_cast<std::int64_t>(n_star) * n_star + 1);
  r.epsilon_max = min((n - c) / n, (nsq_plus - c * n) / (c * n * n + Rational(1)));
  r.sum_bound_ratio = nsq_plus / n;
  r.ratio_exceeds_n_star = r.sum_bound_ratio > n;
  r.chain_bound_collapses = (n - Rational(1)) + nsq_plus / nsq_plus == n;
  return r;
}

/// Scenario parameters with a concrete epsilon below the bound.
struct EmbeddingScenario {
  int n_star = 3;
  Rational c;
  Rational epsilon;
};

inline EmbeddingScenario make_scenario(int n_star, const Rational& c,
                                       const Rational& epsilon) {
  const ScenarioReport r = scenario_bounds(n_star, c);
  if (!(Rational(0) < epsilon) || !(epsilon < r.epsilon_max))
    throw std::invalid_argument("epsilon must sit strictly below " +
                                r.epsilon_max.str());
  return EmbeddingScenario{n_star, c, epsilon};
}

}  // namespace morstone::balg
