#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "morstone/errors.hpp"
#include "morstone/morass.hpp"

namespace morstone::lmodel {

enum class Variant { Plain, CAlgebra };

inline std::string variant_name(Variant v) {
  return v == Variant::Plain ? "plain" : "c";
}

/// Finite relational structure on points 0..universe-1. `leq` holds the
/// strict order pairs (x, y) for x below y, kept transitively closed;
/// reflexive pairs are implicit. `dis` holds disjointness pairs normalized
/// to (min, max). `block` labels points; total in the c variant, empty in
/// the plain one.
struct GenModel {
  int universe = 0;
  std::set<std::pair<int, int>> leq;
  std::set<std::pair<int, int>> dis;
  std::map<int, int> block;

  bool has_leq(int x, int y) const { return leq.contains({x, y}); }
  bool has_dis(int x, int y) const {
    return dis.contains({std::min(x, y), std::max(x, y)});
  }

  friend bool operator==(const GenModel& a, const GenModel& b) {
    return a.universe == b.universe && a.leq == b.leq && a.dis == b.dis &&
           a.block == b.block;
  }

  /// Restriction to the initial segment of the given width.
  GenModel restricted(int width) const {
    GenModel out;
    out.universe = width;
    for (const auto& [x, y] : leq)
      if (x < width && y < width) out.leq.insert({x, y});
    for (const auto& [x, y] : dis)
      if (x < width && y < width) out.dis.insert({x, y});
    for (const auto& [p, b] : block)
      if (p < width) out.block.emplace(p, b);
    return out;
  }
};

struct TheoryIssue {
  std::string clause;
  std::string detail;
};

struct TheoryReport {
  std::vector<TheoryIssue> issues;
  bool pass() const { return issues.empty(); }
};

/// Checks every clause of the relational theory on a finite model: the
/// order axioms, symmetry and antireflexivity of disjointness, the
/// incompatibility of the two relations, and in the c variant block
/// totality plus pairwise disjointness inside each block.
inline TheoryReport check_theory(const GenModel& m, Variant variant) {
  TheoryReport report;
  auto fail = [&](std::string clause, std::string detail) {
    report.issues.push_back({std::move(clause), std::move(detail)});
  };
  auto pt = [](int x, int y) {
    return "(" + std::to_string(x) + "," + std::to_string(y) + ")";
  };

  for (const auto& [x, y] : m.leq) {
    if (x < 0 || y < 0 || x >= m.universe || y >= m.universe)
      fail("universe", "leq pair " + pt(x, y) + " escapes the universe");
    if (x == y) fail("leq-irreflexive", "reflexive pair stored at " + pt(x, y));
    if (m.has_leq(y, x))
      fail("leq-antisymmetric", "both directions present for " + pt(x, y));
  }
  // transitivity of the stored strict order
  for (const auto& [x, y] : m.leq) {
    const auto lo = m.leq.lower_bound({y, 0});
    const auto hi = m.leq.lower_bound({y + 1, 0});
    for (auto it = lo; it != hi; ++it)
      if (!m.has_leq(x, it->second) && x != it->second)
        fail("leq-transitive", pt(x, y) + " and " + pt(y, it->second) +
                                   " without " + pt(x, it->second));
  }
  for (const auto& [x, y] : m.dis) {
    if (x < 0 || y < 0 || x >= m.universe || y >= m.universe)
      fail("universe", "dis pair " + pt(x, y) + " escapes the universe");
    if (x == y) fail("dis-antireflexive", "point " + std::to_string(x));
    if (x > y) fail("dis-normalized", "pair " + pt(x, y) + " not normalized");
    if (m.has_leq(x, y) || m.has_leq(y, x))
      fail("leq-dis-contradictory",
           "d" + pt(x, y) + " and <=*" + pt(x, y) + " are contradictory");
  }
  if (variant == Variant::CAlgebra) {
    for (int p = 0; p < m.universe; ++p)
      if (!m.block.contains(p))
        fail("block-total", "point " + std::to_string(p) + " has no block");
    std::map<int, std::vector<int>> classes;
    for (const auto& [p, b] : m.block) {
      if (p < 0 || p >= m.universe)
        fail("universe", "block label on missing point " + std::to_string(p));
      classes[b].push_back(p);
    }
    for (const auto& [b, pts] : classes)
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
          if (!m.has_dis(pts[i], pts[j]))
            fail("block-dis", "block " + std::to_string(b) + " holds " +
                                  pt(pts[i], pts[j]) + " without d");
  } else {
    if (!m.block.empty())
      fail("block-absent", "plain model carries block labels");
  }
  return report;
}

/// True when the function is an embedding of relational structures:
/// both relations (and block labels, when present) are preserved and
/// reflected along it.
inline bool embed_check(const GenModel& src, const GenModel& dst,
                        const std::vector<int>& func) {
  if (static_cast<int>(func.size()) != src.universe) return false;
  std::map<int, int> inverse;
  for (int i = 0; i < src.universe; ++i) {
    if (func[i] < 0 || func[i] >= dst.universe) return false;
    inverse.emplace(func[i], i);
  }
  for (const auto& [x, y] : src.leq)
    if (!dst.has_leq(func[x], func[y])) return false;
  for (const auto& [x, y] : src.dis)
    if (!dst.has_dis(func[x], func[y])) return false;
  for (const auto& [u, v] : dst.leq) {
    const auto iu = inverse.find(u), iv = inverse.find(v);
    if (iu != inverse.end() && iv != inverse.end() &&
        !src.has_leq(iu->second, iv->second))
      return false;
  }
  for (const auto& [u, v] : dst.dis) {
    const auto iu = inverse.find(u), iv = inverse.find(v);
    if (iu != inverse.end() && iv != inverse.end() &&
        !src.has_dis(iu->second, iv->second))
      return false;
  }
  if (!src.block.empty() || !dst.block.empty()) {
    for (int i = 0; i < src.universe; ++i) {
      const auto sb = src.block.find(i);
      const auto db = dst.block.find(func[i]);
      if ((sb == src.block.end()) != (db == dst.block.end())) return false;
      if (sb != src.block.end() && sb->second != db->second) return false;
    }
  }
  return true;
}

/// Stage schedule: the level sequence alpha_0..alpha_M, the fresh set A_n
/// for each stage (size n+1) and, in the c variant, one extra fresh point
/// per stage.
struct StagePlan {
  Variant variant = Variant::Plain;
  std::vector<int> alpha;
  std::vector<std::vector<int>> fresh_sets;
  std::vector<int> extra_fresh;  // c variant only

  int stages() const { return static_cast<int>(alpha.size()) - 1; }
};

namespace detail {

/// Fresh points between the two levels whose whole orbit under the
/// window's one-step maps stays fresh, one least representative per orbit,
/// ascending. Block labels ride along one-step maps, so points sharing an
/// orbit end up in one block and are forced pairwise disjoint; stage
/// constraints must therefore land on distinct orbits.
inline std::vector<int> orbit_distinct_fresh(const morass::MorassPrefix& prefix,
                                             int low, int top) {
  const int width = prefix.width(top);
  std::vector<int> parent(width);
  for (int i = 0; i < width; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int beta = low; beta < top; ++beta) {
    const auto& h = prefix.steps.at(beta).h;
    for (int x = 0; x < prefix.width(beta); ++x)
      parent[find(x)] = find(h[x]);
  }
  const std::set<int> covered = morass::coverage(prefix, low, top);
  std::vector<char> tainted(width, 0);
  for (int u : covered) tainted[find(u)] = 1;
  std::vector<char> taken(width, 0);
  std::vector<int> out;
  for (int v = 0; v < width; ++v) {
    const int root = find(v);
    if (tainted[root] || taken[root]) continue;
    taken[root] = 1;
    out.push_back(v);
  }
  return out;
}

}  // namespace detail

/// Minimal schedule: alpha_0 = 0 and the gap grows by one per stage
/// (one more in the c variant, which also reserves the extra point).
/// A_n takes the least fresh points between alpha_n and alpha_{n+1}; the
/// extra point is the next one. The c variant draws them from distinct
/// one-step orbits so the stage constraints never collide with the block
/// coherence the embeddings impose.
inline StagePlan plan_stages(const morass::MorassPrefix& prefix, int stage_count,
                             Variant variant) {
  StagePlan plan;
  plan.variant = variant;
  plan.alpha.push_back(0);
  for (int n = 0; n < stage_count; ++n) {
    const int gap = variant == Variant::Plain ? n + 1 : n + 2;
    plan.alpha.push_back(plan.alpha.back() + gap);
  }
  if (plan.alpha.back() > prefix.top_level())
    throw PreconditionError("insufficient levels: schedule needs " +
                            std::to_string(plan.alpha.back()) +
                            " but the prefix tops out at " +
                            std::to_string(prefix.top_level()));
  for (int n = 0; n < stage_count; ++n) {
    const auto fresh =
        variant == Variant::CAlgebra
            ? detail::orbit_distinct_fresh(prefix, plan.alpha[n],
                                           plan.alpha[n + 1])
            : morass::fresh_points(prefix, plan.alpha[n], plan.alpha[n + 1]);
    const std::size_t need =
        static_cast<std::size_t>(n + 1) + (variant == Variant::CAlgebra);
    if (fresh.size() < need)
      throw PreconditionError("not enough fresh points at stage " +
                              std::to_string(n));
    plan.fresh_sets.emplace_back(fresh.begin(), fresh.begin() + n + 1);
    if (variant == Variant::CAlgebra) plan.extra_fresh.push_back(fresh[n + 1]);
  }
  return plan;
}

namespace detail {

/// Mutable relation state for one stage with conflict detection on insert.
struct StageState {
  int universe = 0;
  std::set<std::pair<int, int>> leq;
  std::set<std::pair<int, int>> dis;
  std::map<int, int> block;

  bool add_leq(int x, int y) {
    if (x == y)
      throw ConstructionFailure("order cycle through point " +
                                    std::to_string(x),
                                {x, y});
    if (leq.contains({y, x}))
      throw ConstructionFailure("order forced in both directions", {x, y});
    const int a = std::min(x, y), b = std::max(x, y);
    if (dis.contains({a, b}))
      throw ConstructionFailure("pair forced both below and disjoint", {x, y});
    return leq.insert({x, y}).second;
  }
  bool add_dis(int x, int y) {
    if (x == y)
      throw ConstructionFailure("point forced disjoint from itself", {x, x});
    const int a = std::min(x, y), b = std::max(x, y);
    if (leq.contains({a, b}) || leq.contains({b, a}))
      throw ConstructionFailure("pair forced both below and disjoint", {x, y});
    return dis.insert({a, b}).second;
  }
  bool set_block(int p, int b) {
    auto [it, inserted] = block.emplace(p, b);
    if (!inserted && it->second != b)
      throw ConstructionFailure("point assigned to two blocks", {p, b});
    return inserted;
  }
};

inline bool transitive_pass(StageState& st) {
  bool changed = false;
  // join on the middle point; the sets are small
  std::vector<std::pair<int, int>> to_add;
  for (const auto& [x, y] : st.leq) {
    const auto lo = st.leq.lower_bound({y, 0});
    const auto hi = st.leq.lower_bound({y + 1, 0});
    for (auto it = lo; it != hi; ++it)
      if (x != it->second && !st.leq.contains({x, it->second}))
        to_add.push_back({x, it->second});
  }
  for (const auto& [x, y] : to_add) changed |= st.add_leq(x, y);
  return changed;
}

/// One-step coherence: pairs and labels inside a lower level travel along
/// that level's non-identity map, in both directions. Keeps restrictions of
/// the stage top embeddable at every intermediate one-step map.
inline bool step_propagation_pass(const morass::MorassPrefix& prefix,
                                  StageState& st, int from_level,
                                  int to_level) {
  bool changed = false;
  for (int beta = from_level; beta < to_level; ++beta) {
    const int theta = prefix.width(beta);
    const std::vector<int>& h = prefix.steps.at(beta).h;
    std::map<int, int> inv;
    for (int i = 0; i < theta; ++i) inv.emplace(h[i], i);

    std::vector<std::pair<int, int>> leq_add, dis_add;
    for (const auto& [x, y] : st.leq) {
      if (x < theta && y < theta) leq_add.push_back({h[x], h[y]});
      const auto ix = inv.find(x), iy = inv.find(y);
      if (ix != inv.end() && iy != inv.end())
        leq_add.push_back({ix->second, iy->second});
    }
    for (const auto& [x, y] : st.dis) {
      if (x < theta && y < theta) dis_add.push_back({h[x], h[y]});
      const auto ix = inv.find(x), iy = inv.find(y);
      if (ix != inv.end() && iy != inv.end())
        dis_add.push_back({ix->second, iy->second});
    }
    for (const auto& [x, y] : leq_add)
      if (!st.leq.contains({x, y})) changed |= st.add_leq(x, y);
    for (const auto& [x, y] : dis_add)
      if (!st.dis.contains(
              {std::min(x, y), std::max(x, y)}))
        changed |= st.add_dis(x, y);

    std::vector<std::pair<int, int>> block_add;
    for (const auto& [p, b] : st.block) {
      if (p < theta) block_add.push_back({h[p], b});
      const auto ip = inv.find(p);
      if (ip != inv.end()) block_add.push_back({ip->second, b});
    }
    for (const auto& [p, b] : block_add) changed |= st.set_block(p, b);
  }
  return changed;
}

inline bool block_dis_pass(StageState& st) {
  bool changed = false;
  std::map<int, std::vector<int>> classes;
  for (const auto& [p, b] : st.block) classes[b].push_back(p);
  for (const auto& [b, pts] : classes)
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        if (!st.dis.contains({pts[i], pts[j]}))
          changed |= st.add_dis(pts[i], pts[j]);
  return changed;
}

}  // namespace detail

/// Builds the models at levels alpha_n+1 .. alpha_{n+1} from the models
/// below. The top of the window takes the pushforward of the level alpha_n
/// model along every map, the stage relations on A_n (a chain when the bit
/// is 1, pairwise disjointness when it is 0), and in the c variant the
/// extra point made disjoint from everything reachable plus fresh block
/// labels; everything is then closed under transitivity, one-step
/// coherence, and same-block disjointness. Intermediate levels are the
/// restrictions of the result.
inline void extend_stage(const morass::MorassPrefix& prefix,
                         std::vector<GenModel>& built, const StagePlan& plan,
                         int stage, int bit) {
  if (bit != 0 && bit != 1) throw std::invalid_argument("bit must be 0 or 1");
  if (stage < 0 || stage >= plan.stages())
    throw std::invalid_argument("stage out of schedule");
  const int low = plan.alpha.at(stage);
  const int top = plan.alpha.at(stage + 1);
  if (static_cast<int>(built.size()) != low + 1)
    throw PreconditionError("models must be built exactly up to the stage base");

  const GenModel& base = built.at(low);

  detail::StageState st;
  st.universe = prefix.width(top);

  // pushforward along every composed map from every level at or below the
  // stage base; contradictions between routes surface here
  std::set<int> covered;
  for (int beta = low; beta >= 0; --beta) {
    const GenModel& src = built.at(beta);
    for (const auto& m : morass::maps_between(prefix, beta, top)) {
      for (const auto& [x, y] : src.leq) st.add_leq(m.func[x], m.func[y]);
      for (const auto& [x, y] : src.dis) st.add_dis(m.func[x], m.func[y]);
      for (const auto& [p, b] : src.block) st.set_block(m.func[p], b);
      covered.insert(m.func.begin(), m.func.end());
    }
  }

  // stage relations on the fresh set
  const std::vector<int>& fresh = plan.fresh_sets.at(stage);
  if (static_cast<int>(fresh.size()) != stage + 1)
    throw PreconditionError("fresh set has the wrong size at stage " +
                            std::to_string(stage));
  for (int v : fresh) {
    if (v < 0 || v >= st.universe || covered.contains(v))
      throw PreconditionError("stage point " + std::to_string(v) +
                                  " is not fresh",
                              v, top);
  }
  for (std::size_t i = 0; i < fresh.size(); ++i)
    for (std::size_t j = i + 1; j < fresh.size(); ++j) {
      if (bit == 1)
        st.add_leq(fresh[i], fresh[j]);
      else
        st.add_dis(fresh[i], fresh[j]);
    }

  if (plan.variant == Variant::CAlgebra) {
    const int extra = plan.extra_fresh.at(stage);
    if (extra < 0 || extra >= st.universe || covered.contains(extra) ||
        std::find(fresh.begin(), fresh.end(), extra) != fresh.end())
      throw PreconditionError("extra stage point is not fresh", extra, top);
    for (int u : covered) st.add_dis(extra, u);
  }

  // closure to a coherent stage top
  const auto close = [&] {
    for (bool changed = true; changed;) {
      changed = detail::transitive_pass(st);
      changed |= detail::step_propagation_pass(prefix, st, low, top);
      if (plan.variant == Variant::CAlgebra)
        changed |= detail::block_dis_pass(st);
    }
  };
  close();

  if (plan.variant == Variant::CAlgebra) {
    // Labels first settle through the closure; only then do still-unlabeled
    // points get fresh blocks, one at a time so each new label spreads
    // through its whole one-step orbit before the next is allocated.
    const auto least_unused = [&st] {
      std::set<int> used;
      for (const auto& [p, b] : st.block) used.insert(b);
      int label = 0;
      while (used.contains(label)) ++label;
      return label;
    };
    const int extra = plan.extra_fresh.at(stage);
    if (st.block.contains(extra))
      throw ConstructionFailure(
          "extra stage point was forced into an occupied block",
          {extra, st.block.at(extra)});
    st.set_block(extra, least_unused());
    close();
    for (int pnt = 0; pnt < st.universe; ++pnt) {
      if (st.block.contains(pnt)) continue;
      st.set_block(pnt, least_unused());
      close();
    }
  }

  GenModel result;
  result.universe = st.universe;
  result.leq = std::move(st.leq);
  result.dis = std::move(st.dis);
  result.block = std::move(st.block);

  // the stage base must reappear unchanged as a restriction
  if (!(result.restricted(base.universe) == base))
    throw ConstructionFailure(
        "stage closure disturbed the model at level " + std::to_string(low),
        {low, top});

  for (int level = low + 1; level <= top; ++level)
    built.push_back(result.restricted(prefix.width(level)));
}

struct ConstructionResult {
  StagePlan plan;
  std::vector<GenModel> levels;  // index = level
};

/// Runs the whole construction for a bit stream. With `verify` set, every
/// built level is checked against the theory and every one-step map between
/// consecutive levels is checked to embed.
inline ConstructionResult run_construction(const morass::MorassPrefix& prefix,
                                           const std::vector<int>& bits,
                                           Variant variant,
                                           bool verify = true) {
  ConstructionResult out;
  out.plan = plan_stages(prefix, static_cast<int>(bits.size()), variant);
  GenModel root;
  root.universe = prefix.width(0);
  if (variant == Variant::CAlgebra)
    for (int p = 0; p < root.universe; ++p) root.block.emplace(p, p);
  out.levels.push_back(std::move(root));
  for (std::size_t n = 0; n < bits.size(); ++n)
    extend_stage(prefix, out.levels, out.plan, static_cast<int>(n), bits[n]);

  if (verify) {
    for (std::size_t lvl = 0; lvl < out.levels.size(); ++lvl) {
      const TheoryReport tr = check_theory(out.levels[lvl], variant);
      if (!tr.pass())
        throw ConstructionFailure("theory fails at level " +
                                      std::to_string(lvl) + ": " +
                                      tr.issues.front().clause,
                                  {static_cast<int>(lvl), 0});
    }
    for (std::size_t lvl = 0; lvl + 1 < out.levels.size(); ++lvl) {
      for (const auto& m :
           morass::maps_between(prefix, static_cast<int>(lvl),
                                static_cast<int>(lvl) + 1))
        if (!embed_check(out.levels[lvl], out.levels[lvl + 1], m.func))
          throw ConstructionFailure(
              "one-step map fails to embed at level " + std::to_string(lvl),
              {static_cast<int>(lvl), static_cast<int>(lvl) + 1});
    }
  }
  return out;
}

struct LimitCertificate {
  std::size_t maps_checked = 0;
  std::size_t projected_pairs = 0;
  std::size_t multi_route_pairs = 0;
  std::size_t top_only_pairs = 0;  // imposed at the top stage window only
  bool agrees_with_top = true;
};

struct LimitResult {
  GenModel limit;
  LimitCertificate certificate;
};

/// Rebuilds the top-level relations by projecting every lower level along
/// every map, records pairs reached by several routes, and checks the
/// projection against the model the construction produced. Routes that
/// disagree on a pair's relation kind raise `IllDefinedLimit`.
inline LimitResult limit_model(const morass::MorassPrefix& prefix,
                               const ConstructionResult& run) {
  const int top = static_cast<int>(run.levels.size()) - 1;
  const GenModel& top_model = run.levels.at(top);

  enum Kind { KLeq = 1, KDis = 2 };
  std::map<std::pair<int, int>, int> projected;  // pair -> kind bits
  std::map<std::pair<int, int>, int> routes;
  std::map<int, std::set<int>> block_routes;
  LimitCertificate cert;

  for (int beta = 0; beta < top; ++beta) {
    const GenModel& src = run.levels.at(beta);
    for (const auto& m : morass::maps_between(prefix, beta, top)) {
      ++cert.maps_checked;
      for (const auto& [x, y] : src.leq) {
        const std::pair<int, int> img{m.func[x], m.func[y]};
        projected[img] |= KLeq;
        ++routes[img];
      }
      for (const auto& [x, y] : src.dis) {
        const std::pair<int, int> img{std::min(m.func[x], m.func[y]),
                                      std::max(m.func[x], m.func[y])};
        projected[img] |= KDis;
        ++routes[img];
      }
      for (const auto& [p, b] : src.block) block_routes[m.func[p]].insert(b);
    }
  }

  GenModel limit;
  limit.universe = top_model.universe;
  for (const auto& [pair, kind] : projected) {
    if (kind == (KLeq | KDis))
      throw IllDefinedLimit("pair (" + std::to_string(pair.first) + "," +
                            std::to_string(pair.second) +
                            ") projects as both order and disjointness");
    if (kind & KLeq) {
      if (limit.leq.contains({pair.second, pair.first}))
        throw IllDefinedLimit("order projects in both directions");
      limit.leq.insert(pair);
    } else {
      limit.dis.insert(pair);
    }
  }
  for (const auto& [p, bs] : block_routes) {
    if (bs.size() > 1)
      throw IllDefinedLimit("point " + std::to_string(p) +
                            " projects into two blocks");
    limit.block.emplace(p, *bs.begin());
  }

  cert.projected_pairs = projected.size();
  for (const auto& [pair, n] : routes)
    if (n > 1) ++cert.multi_route_pairs;

  // projection must sit inside the constructed top model; whatever the top
  // model adds beyond it was imposed at its own stage
  for (const auto& p : limit.leq)
    if (!top_model.leq.contains(p)) cert.agrees_with_top = false;
  for (const auto& p : limit.dis)
    if (!top_model.dis.contains(p)) cert.agrees_with_top = false;
  for (const auto& [p, b] : limit.block) {
    const auto it = top_model.block.find(p);
    if (it == top_model.block.end() || it->second != b)
      cert.agrees_with_top = false;
  }
  cert.top_only_pairs = 0;
  for (const auto& p : top_model.leq)
    if (!limit.leq.contains(p)) ++cert.top_only_pairs;
  for (const auto& p : top_model.dis)
    if (!limit.dis.contains(p)) ++cert.top_only_pairs;

  // points outside every route keep only their stage relations; fill the
  // limit with the top model's data so the result is a complete model
  for (const auto& p : top_model.leq) limit.leq.insert(p);
  for (const auto& p : top_model.dis) limit.dis.insert(p);
  for (const auto& [p, b] : top_model.block) limit.block.emplace(p, b);
  limit.universe = top_model.universe;

  return LimitResult{std::move(limit), cert};
}

}  // namespace morstone::lmodel
