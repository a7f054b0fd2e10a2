#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "morstone/balg.hpp"
#include "morstone/errors.hpp"

namespace morstone::plam {

using balg::Assignment;
using balg::Backend;
using balg::BoolPresentation;

/// A poset condition: a presented Boolean algebra over a finite set of
/// named indices. The presentation's generator set is the index set.
struct PCondition {
  BoolPresentation pres;

  const std::vector<int>& w() const { return pres.gens; }

  static PCondition make(BoolPresentation p) {
    p.validate();
    p.close_order();
    return PCondition{std::move(p)};
  }

  friend bool operator==(const PCondition& a, const PCondition& b) {
    return a.pres == b.pres;
  }
};

namespace detail {

/// Satisfying assignments projected onto a subset of the generators,
/// deduplicated and sorted.
inline std::set<Assignment> projected_points(const PCondition& p,
                                             const std::vector<int>& onto,
                                             std::size_t budget) {
  std::vector<int> positions;
  for (int g : onto) positions.push_back(p.pres.position(g));
  std::set<Assignment> out;
  for (const Assignment& a :
       balg::stone_points(p.pres, Backend::Propagation, budget)) {
    Assignment proj;
    proj.reserve(positions.size());
    for (int pos : positions) proj.push_back(a[pos]);
    out.insert(std::move(proj));
  }
  return out;
}

inline std::vector<int> sorted_union(const std::vector<int>& a,
                                     const std::vector<int>& b) {
  std::vector<int> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

inline std::vector<int> sorted_intersection(const std::vector<int>& a,
                                            const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

inline PCondition union_condition(const std::vector<const PCondition*>& parts) {
  BoolPresentation u;
  std::set<int> gens;
  for (const PCondition* p : parts) {
    gens.insert(p->w().begin(), p->w().end());
    u.leq.insert(p->pres.leq.begin(), p->pres.leq.end());
    u.dis.insert(p->pres.dis.begin(), p->pres.dis.end());
    for (const auto& [g, b] : p->pres.block) {
      const auto [it, inserted] = u.block.emplace(g, b);
      if (!inserted && it->second != b)
        throw PreconditionError("conflicting block labels in union", g, b);
    }
    u.uses_blocks |= p->pres.uses_blocks;
  }
  u.gens.assign(gens.begin(), gens.end());
  return PCondition::make(std::move(u));
}

}  // namespace detail

/// p <= q: the smaller condition embeds into the larger as a subalgebra
/// fixing its indices. Decided extensionally: q's satisfying assignments,
/// projected onto p's indices, must be exactly p's satisfying assignments.
inline bool stronger(const PCondition& p, const PCondition& q,
                     std::size_t budget = balg::default_budget()) {
  if (!std::includes(q.w().begin(), q.w().end(), p.w().begin(), p.w().end()))
    return false;
  return detail::projected_points(q, p.w(), budget) ==
         detail::projected_points(p, p.w(), budget);
}

/// Common extension: when the two conditions induce identical projections
/// on their shared indices, the union of their relations presents an
/// amalgam over the union of their index sets, and it extends both.
inline std::optional<PCondition> compatible(
    const PCondition& p, const PCondition& q,
    std::size_t budget = balg::default_budget()) {
  const std::vector<int> shared = detail::sorted_intersection(p.w(), q.w());
  if (detail::projected_points(p, shared, budget) !=
      detail::projected_points(q, shared, budget))
    return std::nullopt;
  PCondition amalgam;
  try {
    amalgam = detail::union_condition({&p, &q});
  } catch (const std::invalid_argument&) {
    return std::nullopt;  // relations collide outright
  } catch (const PreconditionError&) {
    return std::nullopt;
  }
  if (!stronger(p, amalgam, budget) || !stronger(q, amalgam, budget))
    return std::nullopt;
  return amalgam;
}

/// Order-isomorphism class of a condition: the size of its index set, the
/// relation pattern between index positions under the increasing
/// enumeration, and the block pattern when present.
struct TypeCode {
  int size = 0;
  std::vector<std::uint8_t> pattern;  // 0 none, 1 below, 2 above, 3 disjoint
  std::vector<int> blocks;            // first-occurrence normalized labels

  friend bool operator==(const TypeCode& a, const TypeCode& b) {
    return a.size == b.size && a.pattern == b.pattern && a.blocks == b.blocks;
  }
};

inline TypeCode type_code(const PCondition& p) {
  TypeCode t;
  const auto& w = p.w();
  t.size = static_cast<int>(w.size());
  for (int i = 0; i < t.size; ++i)
    for (int j = i + 1; j < t.size; ++j) {
      std::uint8_t kind = 0;
      if (p.pres.leq.contains({w[i], w[j]})) kind = 1;
      else if (p.pres.leq.contains({w[j], w[i]})) kind = 2;
      else if (p.pres.dis.contains({w[i], w[j]})) kind = 3;
      t.pattern.push_back(kind);
    }
  if (p.pres.uses_blocks) {
    std::map<int, int> renumber;
    for (int i = 0; i < t.size; ++i) {
      const auto it = p.pres.block.find(w[i]);
      if (it == p.pres.block.end()) {
        t.blocks.push_back(-1);
        continue;
      }
      const auto [rit, _] =
          renumber.emplace(it->second, static_cast<int>(renumber.size()));
      t.blocks.push_back(rit->second);
    }
  }
  return t;
}

/// Compatibility by colour: equal type codes with the shared indices
/// forming an initial segment of both enumerations. Implies compatibility,
/// which is verified before reporting true.
inline bool color_compat(const PCondition& p, const PCondition& q,
                         std::size_t budget = balg::default_budget()) {
  if (!(type_code(p) == type_code(q))) return false;
  const std::vector<int> shared = detail::sorted_intersection(p.w(), q.w());
  const auto initial_segment = [&](const std::vector<int>& w) {
    return std::equal(shared.begin(), shared.end(), w.begin());
  };
  if (shared.size() > p.w().size() || !initial_segment(p.w()) ||
      !initial_segment(q.w()))
    return false;
  return compatible(p, q, budget).has_value();
}

/// Sunflower search: a subfamily of the requested size whose index sets
/// pairwise intersect in one common root. Returns the positions of the
/// chosen conditions and the root, scanning in lexicographic order.
inline std::optional<std::pair<std::vector<std::size_t>, std::vector<int>>>
delta_system(const std::vector<PCondition>& family, std::size_t petals) {
  if (petals == 0) return std::make_pair(std::vector<std::size_t>{},
                                         std::vector<int>{});
  std::vector<std::size_t> chosen;
  std::vector<int> root;
  std::function<bool(std::size_t)> grow = [&](std::size_t from) -> bool {
    if (chosen.size() == petals) return true;
    for (std::size_t i = from; i < family.size(); ++i) {
      bool fits = true;
      for (std::size_t j : chosen) {
        const auto isect =
            detail::sorted_intersection(family[j].w(), family[i].w());
        if (chosen.size() == 1) {
          // the first pair fixes the root
          root = isect;
        } else if (isect != root) {
          fits = false;
          break;
        }
      }
      if (!fits) continue;
      chosen.push_back(i);
      if (grow(i + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  if (!grow(0)) return std::nullopt;
  if (petals == 1) root = family[chosen[0]].w();
  return std::make_pair(chosen, root);
}

/// Upper bound of a directed family: the union presentation. Every member
/// must re-embed into it; otherwise the family was not directed and the
/// error names a witness pair.
inline PCondition directed_close(const std::vector<PCondition>& family,
                                 std::size_t budget = balg::default_budget()) {
  if (family.empty()) throw PreconditionError("empty family");
  std::vector<const PCondition*> parts;
  for (const auto& p : family) parts.push_back(&p);
  PCondition bound;
  try {
    bound = detail::union_condition(parts);
  } catch (const std::invalid_argument& e) {
    auto [i, j] = [&]() -> std::pair<int, int> {
      for (std::size_t a = 0; a < family.size(); ++a)
        for (std::size_t b = a + 1; b < family.size(); ++b)
          if (!compatible(family[a], family[b], budget))
            return {static_cast<int>(a), static_cast<int>(b)};
      return {-1, -1};
    }();
    throw PreconditionError(std::string("family is not directed: ") + e.what(),
                            i, j);
  }
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (stronger(family[i], bound, budget)) continue;
    for (std::size_t j = 0; j < family.size(); ++j)
      if (i != j && !compatible(family[i], family[j], budget))
        throw PreconditionError("family is not directed",
                                static_cast<int>(i), static_cast<int>(j));
    throw PreconditionError(
        "union bound does not extend member " + std::to_string(i),
        static_cast<int>(i), static_cast<int>(family.size()));
  }
  return bound;
}

/// Upper bound of two increasing pointwise-compatible sequences: the union
/// of everything. Violated preconditions name the offending step.
inline PCondition parallel_close(const std::vector<PCondition>& ps,
                                 const std::vector<PCondition>& qs,
                                 std::size_t budget = balg::default_budget()) {
  if (ps.empty() || qs.empty()) throw PreconditionError("empty sequence");
  for (std::size_t i = 0; i + 1 < ps.size(); ++i)
    if (!stronger(ps[i], ps[i + 1], budget))
      throw PreconditionError("first sequence not increasing at step " +
                                  std::to_string(i),
                              static_cast<int>(i), static_cast<int>(i + 1));
  for (std::size_t i = 0; i + 1 < qs.size(); ++i)
    if (!stronger(qs[i], qs[i + 1], budget))
      throw PreconditionError("second sequence not increasing at step " +
                                  std::to_string(i),
                              static_cast<int>(i), static_cast<int>(i + 1));
  const std::size_t common = std::min(ps.size(), qs.size());
  for (std::size_t i = 0; i < common; ++i)
    if (!compatible(ps[i], qs[i], budget))
      throw PreconditionError(
          "sequences not pointwise compatible at step " + std::to_string(i),
          static_cast<int>(i), static_cast<int>(i));
  std::vector<const PCondition*> parts;
  for (const auto& p : ps) parts.push_back(&p);
  for (const auto& q : qs) parts.push_back(&q);
  PCondition bound;
  try {
    bound = detail::union_condition(parts);
  } catch (const std::invalid_argument& e) {
    throw PreconditionError(std::string("sequences do not unite: ") + e.what());
  }
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (!stronger(ps[i], bound, budget))
      throw PreconditionError("bound misses first sequence at step " +
                                  std::to_string(i),
                              static_cast<int>(i), -1);
  for (std::size_t i = 0; i < qs.size(); ++i)
    if (!stronger(qs[i], bound, budget))
      throw PreconditionError("bound misses second sequence at step " +
                                  std::to_string(i),
                              static_cast<int>(i), -1);
  return bound;
}

struct LimitReport {
  PCondition limit;
  std::vector<int> index_set;
  std::vector<int> uncovered_indices;  // indices no condition mentions
};

/// Colimit of a coherent system keyed by index subsets: the union
/// presentation over all appearing indices. Coherence (smaller key embeds
/// into larger) is checked first; the result must extend every member.
inline LimitReport limit_algebra(const std::vector<PCondition>& system,
                                 const std::vector<int>& full_index_set,
                                 std::size_t budget = balg::default_budget()) {
  if (system.empty()) throw PreconditionError("empty system");
  for (std::size_t i = 0; i < system.size(); ++i)
    for (std::size_t j = 0; j < system.size(); ++j) {
      if (i == j) continue;
      const auto& small = system[i].w();
      const auto& large = system[j].w();
      if (std::includes(large.begin(), large.end(), small.begin(),
                        small.end()) &&
          !stronger(system[i], system[j], budget))
        throw PreconditionError("system incoherent between members",
                                static_cast<int>(i), static_cast<int>(j));
    }
  std::vector<const PCondition*> parts;
  for (const auto& p : system) parts.push_back(&p);
  PCondition limit = detail::union_condition(parts);
  for (std::size_t i = 0; i < system.size(); ++i)
    if (!stronger(system[i], limit, budget))
      throw PreconditionError("limit does not extend member " +
                                  std::to_string(i),
                              static_cast<int>(i), -1);
  LimitReport report;
  report.index_set = full_index_set;
  std::sort(report.index_set.begin(), report.index_set.end());
  for (int idx : report.index_set)
    if (!limit.pres.has_gen(idx)) report.uncovered_indices.push_back(idx);
  report.limit = std::move(limit);
  return report;
}

struct SplitPair {
  PCondition chain;
  PCondition antichain;
};

/// Two incompatible extensions of a compatible base family: on the given
/// fresh indices, one orders them as a chain in the listed order, the other
/// makes them pairwise disjoint. Each fresh index must live in exactly one
/// base condition and carry no relations into any other base's indices.
inline SplitPair split_extensions(const std::vector<PCondition>& base,
                                  const std::vector<int>& fresh,
                                  std::size_t budget = balg::default_budget()) {
  if (base.empty()) throw PreconditionError("empty base family");
  if (fresh.empty()) throw PreconditionError("no fresh indices");
  for (std::size_t k = 0; k < fresh.size(); ++k) {
    const int a = fresh[k];
    int home = -1;
    for (std::size_t i = 0; i < base.size(); ++i)
      if (base[i].pres.has_gen(a)) {
        if (home >= 0)
          throw PreconditionError("fresh index " + std::to_string(a) +
                                      " lives in two base conditions",
                                  home, static_cast<int>(i));
        home = static_cast<int>(i);
      }
    if (home < 0)
      throw PreconditionError(
          "fresh index " + std::to_string(a) + " lives in no base condition",
          a, -1);
    // no relations from the fresh index into any other base's indices
    std::set<int> partners;
    for (const auto& [x, y] : base[home].pres.leq) {
      if (x == a) partners.insert(y);
      if (y == a) partners.insert(x);
    }
    for (const auto& [x, y] : base[home].pres.dis) {
      if (x == a) partners.insert(y);
      if (y == a) partners.insert(x);
    }
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (static_cast<int>(i) == home) continue;
      for (int g : partners)
        if (base[i].pres.has_gen(g))
          throw PreconditionError("fresh index " + std::to_string(a) +
                                      " is entangled with base " +
                                      std::to_string(i),
                                  a, g);
    }
  }
  std::vector<const PCondition*> parts;
  for (const auto& p : base) parts.push_back(&p);
  const PCondition joint = detail::union_condition(parts);
  for (std::size_t i = 0; i < base.size(); ++i)
    if (!stronger(base[i], joint, budget))
      throw PreconditionError("base conditions are not compatible",
                              static_cast<int>(i), -1);

  BoolPresentation chain = joint.pres;
  BoolPresentation anti = joint.pres;
  for (std::size_t i = 0; i < fresh.size(); ++i)
    for (std::size_t j = i + 1; j < fresh.size(); ++j) {
      chain.leq.insert({fresh[i], fresh[j]});
      anti.dis.insert(
          {std::min(fresh[i], fresh[j]), std::max(fresh[i], fresh[j])});
    }
  SplitPair out{PCondition::make(std::move(chain)),
                PCondition::make(std::move(anti))};
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (!stronger(base[i], out.chain, budget))
      throw PreconditionError("chain extension misses base " +
                                  std::to_string(i),
                              static_cast<int>(i), -1);
    if (!stronger(base[i], out.antichain, budget))
      throw PreconditionError("antichain extension misses base " +
                                  std::to_string(i),
                              static_cast<int>(i), -1);
  }
  return out;
}

}  // namespace morstone::plam
