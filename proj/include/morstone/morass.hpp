#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "morstone/errors.hpp"

namespace morstone::morass {

/// One step of the tower: the non-identity map h out of a level. h agrees
/// with the identity below `split` and jumps strictly above the level width
/// at `split`.
struct OneStep {
  int split = 0;
  std::vector<int> h;  // images of 0..theta-1
};

/// Finite tower of levels with widths theta_0..theta_N and one step map
/// family {id, h_alpha} between consecutive levels. Values are plain data so
/// tests can tamper with them; `verify_axioms` reports what still holds.
struct MorassPrefix {
  std::vector<int> levels;     // theta_0..theta_N
  std::vector<OneStep> steps;  // size N

  int top_level() const { return static_cast<int>(levels.size()) - 1; }
  int width(int level) const { return levels.at(level); }
};

/// Splitting rule: level index and width -> splitting point in [0, theta).
using SplitFn = std::function<int(int, int)>;

enum class SplitRule {
  Doubling,  // split 0; widths 1, 3, 7, 15, ...
  Linear,    // split theta-1; widths 1, 3, 5, 7, ...
  Midpoint,  // split theta/2
};

inline SplitFn split_fn(SplitRule rule) {
  switch (rule) {
    case SplitRule::Doubling:
      return [](int, int) { return 0; };
    case SplitRule::Linear:
      return [](int, int theta) { return theta > 1 ? theta - 1 : 0; };
    case SplitRule::Midpoint:
      return [](int, int theta) { return theta / 2; };
  }
  throw std::invalid_argument("unknown split rule");
}

inline SplitRule parse_split_rule(const std::string& name) {
  if (name == "doubling") return SplitRule::Doubling;
  if (name == "linear") return SplitRule::Linear;
  if (name == "midpoint") return SplitRule::Midpoint;
  throw std::invalid_argument("unknown split rule: " + name);
}

inline std::string split_rule_name(SplitRule rule) {
  switch (rule) {
    case SplitRule::Doubling:
      return "doubling";
    case SplitRule::Linear:
      return "linear";
    case SplitRule::Midpoint:
      return "midpoint";
  }
  return "?";
}

/// Builds the canonical prefix for a splitting rule: theta_0 = 1,
/// theta_{a+1} = theta_a + (theta_a - k_a) + 1, h_a the identity below k_a
/// and a shift to theta_a + 1 + (i - k_a) from k_a on. A rule returning
/// k = theta is rejected: the shifted part would be empty and h would
/// collapse to the identity.
inline MorassPrefix build_prefix(int level_count, const SplitFn& split_of) {
  if (level_count < 1)
    throw std::invalid_argument("prefix needs at least one step");
  MorassPrefix p;
  p.levels.push_back(1);
  for (int a = 0; a < level_count; ++a) {
    const int theta = p.levels.back();
    const int k = split_of(a, theta);
    if (k < 0 || k > theta)
      throw std::invalid_argument("splitting point out of range at level " +
                                  std::to_string(a));
    if (k == theta)
      throw std::invalid_argument(
          "degenerate splitting point (empty shifted part) at level " +
          std::to_string(a));
    const int next = theta + (theta - k) + 1;
    OneStep step;
    step.split = k;
    step.h.resize(theta);
    for (int i = 0; i < theta; ++i)
      step.h[i] = i < k ? i : theta + 1 + (i - k);
    p.levels.push_back(next);
    p.steps.push_back(std::move(step));
  }
  return p;
}

inline MorassPrefix build_prefix(int level_count,
                                 SplitRule rule = SplitRule::Doubling) {
  return build_prefix(level_count, split_fn(rule));
}

/// A map of the composed family: a word of one-step choices (0 = id,
/// 1 = h) read bottom-up, together with the induced function. Words inducing
/// the same function are merged; `word` keeps one representative.
struct MorassMap {
  int source = 0;
  int target = 0;
  std::vector<std::uint8_t> word;
  std::vector<int> func;

  friend bool operator==(const MorassMap& a, const MorassMap& b) {
    return a.source == b.source && a.target == b.target && a.func == b.func;
  }
};

inline MorassMap identity_map(const MorassPrefix& p, int level) {
  MorassMap m;
  m.source = m.target = level;
  m.func.resize(p.width(level));
  for (int i = 0; i < p.width(level); ++i) m.func[i] = i;
  return m;
}

/// All maps from `from` to `to` (word-composition closure of the one-step
/// families), deduplicated by induced function and sorted by function.
inline std::vector<MorassMap> maps_between(const MorassPrefix& p, int from,
                                           int to) {
  if (from >= to || to > p.top_level() || from < 0)
    throw std::invalid_argument("invalid level range " + std::to_string(from) +
                                ".." + std::to_string(to));
  std::vector<MorassMap> current;
  {
    MorassMap id = identity_map(p, from);
    id.target = from;
    current.push_back(std::move(id));
  }
  for (int level = from; level < to; ++level) {
    const OneStep& step = p.steps.at(level);
    std::map<std::vector<int>, MorassMap> next;
    for (const MorassMap& m : current) {
      for (std::uint8_t choice : {std::uint8_t{0}, std::uint8_t{1}}) {
        MorassMap ext;
        ext.source = from;
        ext.target = level + 1;
        ext.word = m.word;
        ext.word.push_back(choice);
        ext.func.reserve(m.func.size());
        for (int v : m.func) {
          const int image = choice == 0 ? v : step.h.at(v);
          ext.func.push_back(image);
        }
        next.try_emplace(ext.func, std::move(ext));
      }
    }
    current.clear();
    current.reserve(next.size());
    for (auto& [fn, m] : next) current.push_back(std::move(m));
  }
  return current;
}

inline bool strictly_increasing(const std::vector<int>& f) {
  for (std::size_t i = 1; i < f.size(); ++i)
    if (f[i - 1] >= f[i]) return false;
  return true;
}

/// Union of the ranges of all maps from `from` into `to` (from == to gives
/// the whole level).
inline std::set<int> coverage(const MorassPrefix& p, int from, int to) {
  std::set<int> covered;
  if (from == to) {
    for (int i = 0; i < p.width(to); ++i) covered.insert(i);
    return covered;
  }
  for (const MorassMap& m : maps_between(p, from, to))
    covered.insert(m.func.begin(), m.func.end());
  return covered;
}

/// Points of level `to` hit by no map from `from`. Empty for from == to.
inline std::vector<int> fresh_points(const MorassPrefix& p, int from, int to) {
  if (from > to || to > p.top_level() || from < 0)
    throw std::invalid_argument("invalid level range");
  if (from == to) return {};
  const std::set<int> covered = coverage(p, from, to);
  std::vector<int> out;
  for (int i = 0; i < p.width(to); ++i)
    if (!covered.contains(i)) out.push_back(i);
  return out;
}

struct CheckResult {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct AxiomReport {
  std::vector<CheckResult> checks;
  std::size_t amalgam_pairs_tested = 0;
  std::size_t amalgam_pairs_found = 0;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.pass; });
  }
  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

struct Amalgamation {
  int gamma = 0;
  MorassMap g;
  MorassMap f0_prime;
  MorassMap f1_prime;
};

/// Memoized map families plus a function-keyed index, for the searches that
/// revisit the same level pairs many times.
class FamilyCache {
 public:
  explicit FamilyCache(const MorassPrefix& p) : prefix_(p) {}

  const std::vector<MorassMap>& family(int from, int to) {
    const auto key = std::make_pair(from, to);
    auto it = families_.find(key);
    if (it == families_.end())
      it = families_.emplace(key, maps_between(prefix_, from, to)).first;
    return it->second;
  }

  /// The family member with this induced function, if any.
  const MorassMap* find(int from, int to, const std::vector<int>& func) {
    const auto key = std::make_pair(from, to);
    auto it = index_.find(key);
    if (it == index_.end()) {
      std::map<std::vector<int>, const MorassMap*> idx;
      for (const MorassMap& m : family(from, to)) idx.emplace(m.func, &m);
      it = index_.emplace(key, std::move(idx)).first;
    }
    const auto hit = it->second.find(func);
    return hit == it->second.end() ? nullptr : hit->second;
  }

  const MorassPrefix& prefix() const { return prefix_; }

 private:
  const MorassPrefix& prefix_;
  std::map<std::pair<int, int>, std::vector<MorassMap>> families_;
  std::map<std::pair<int, int>, std::map<std::vector<int>, const MorassMap*>>
      index_;
};

/// The unique candidate inner function with g o inner == f, or nothing when
/// some value of f misses the range of g. Both functions are strictly
/// increasing, so a single merge pass suffices.
inline std::optional<std::vector<int>> pull_back(const std::vector<int>& g,
                                                 const std::vector<int>& f) {
  std::vector<int> inner;
  inner.reserve(f.size());
  std::size_t pos = 0;
  for (int v : f) {
    while (pos < g.size() && g[pos] < v) ++pos;
    if (pos == g.size() || g[pos] != v) return std::nullopt;
    inner.push_back(static_cast<int>(pos));
  }
  return inner;
}

/// Searches for the least gamma strictly between the sources and the common
/// target through which both maps factor as g o f'. Maps out of the target
/// level itself do not exist, so pairs sourced one step below the target
/// never factor.
inline std::optional<Amalgamation> amalgamate(FamilyCache& cache,
                                              const MorassMap& f0,
                                              const MorassMap& f1) {
  if (f0.target != f1.target)
    throw std::invalid_argument("amalgamate needs a common target level");
  const int target = f0.target;
  for (int gamma = std::max(f0.source, f1.source) + 1; gamma < target;
       ++gamma) {
    for (const MorassMap& g : cache.family(gamma, target)) {
      const auto inner0 = pull_back(g.func, f0.func);
      if (!inner0) continue;
      const MorassMap* w0 = cache.find(f0.source, gamma, *inner0);
      if (!w0) continue;
      const auto inner1 = pull_back(g.func, f1.func);
      if (!inner1) continue;
      const MorassMap* w1 = cache.find(f1.source, gamma, *inner1);
      if (!w1) continue;
      return Amalgamation{gamma, g, *w0, *w1};
    }
  }
  return std::nullopt;
}

inline std::optional<Amalgamation> amalgamate(const MorassPrefix& p,
                                              const MorassMap& f0,
                                              const MorassMap& f1) {
  FamilyCache cache(p);
  return amalgamate(cache, f0, f1);
}

/// Checks the finite-level axioms exactly and the two limit-flavoured
/// surrogates. The coverage surrogate reports the points of the top level
/// missed by every map from below (the width of the next-to-top level is
/// always among them). The amalgamation surrogate is informational: it
/// counts, over all pairs of maps into the top level, how many factor
/// through a common intermediate map.
inline AxiomReport verify_axioms(const MorassPrefix& p,
                                 bool include_amalgam_stats = true) {
  AxiomReport report;
  const int N = p.top_level();
  auto add = [&](std::string name, bool pass, std::string detail = "") {
    report.checks.push_back({std::move(name), pass, std::move(detail)});
  };

  {
    bool ok = !p.levels.empty();
    std::string detail;
    for (int a = 0; a <= N && ok; ++a)
      if (p.width(a) < 1) {
        ok = false;
        detail = "level " + std::to_string(a) + " has width " +
                 std::to_string(p.width(a));
      }
    add("levels-positive", ok, detail);
    if (!ok) return report;  // widths drive everything else
  }
  if (static_cast<int>(p.steps.size()) != N) {
    add("steps-shape", false, "expected one step per consecutive level pair");
    return report;
  }
  for (int a = 0; a < N; ++a) {
    if (static_cast<int>(p.steps[a].h.size()) != p.width(a)) {
      add("steps-shape", false, "step " + std::to_string(a) +
                                    " is not a total map on its level");
      return report;
    }
  }

  {
    bool ok = true;
    std::string detail;
    for (int a = 0; a < N && ok; ++a)
      for (int b = a + 1; b <= N && ok; ++b)
        for (const MorassMap& m : maps_between(p, a, b)) {
          if (!strictly_increasing(m.func)) {
            ok = false;
            detail = "non-increasing map " + std::to_string(a) + "->" +
                     std::to_string(b);
            break;
          }
          if (!m.func.empty() &&
              (m.func.front() < 0 || m.func.back() >= p.width(b))) {
            ok = false;
            detail = "map range escapes level " + std::to_string(b);
            break;
          }
        }
    add("order-preserving", ok, detail);
  }

  {
    // Families compose: the maps a->c are exactly {f o g} over b between.
    bool ok = true;
    std::string detail;
    for (int a = 0; a < N && ok; ++a)
      for (int c = a + 2; c <= N && ok; ++c) {
        const auto direct = maps_between(p, a, c);
        std::set<std::vector<int>> direct_set;
        for (const auto& m : direct) direct_set.insert(m.func);
        for (int b = a + 1; b < c && ok; ++b) {
          std::set<std::vector<int>> composed;
          for (const auto& g : maps_between(p, a, b))
            for (const auto& f : maps_between(p, b, c)) {
              std::vector<int> fn;
              fn.reserve(g.func.size());
              for (int v : g.func) fn.push_back(f.func.at(v));
              composed.insert(std::move(fn));
            }
          if (composed != direct_set) {
            ok = false;
            detail = "family " + std::to_string(a) + "->" + std::to_string(c) +
                     " differs from composition through " + std::to_string(b);
          }
        }
      }
    add("family-composition", ok, detail);
  }

  {
    // Consecutive families are {id, h} with a genuine splitting point.
    bool ok = true;
    std::string detail;
    for (int a = 0; a < N && ok; ++a) {
      const int theta = p.width(a);
      const auto family = maps_between(p, a, a + 1);
      if (family.size() != 2) {
        ok = false;
        detail = "one-step family at " + std::to_string(a) + " has " +
                 std::to_string(family.size()) + " maps";
        break;
      }
      const std::vector<int>& h = p.steps[a].h;
      int split = -1;
      for (int i = 0; i < theta; ++i)
        if (h[i] != i) {
          split = i;
          break;
        }
      if (split < 0) {
        ok = false;
        detail = "step " + std::to_string(a) + " equals the identity";
        break;
      }
      if (h[split] <= theta) {
        ok = false;
        detail = "step " + std::to_string(a) + " jumps to " +
                 std::to_string(h[split]) + " which is not above " +
                 std::to_string(theta);
        break;
      }
    }
    add("one-step-split", ok, detail);
  }

  {
    // Coverage grows with the source level.
    bool ok = true;
    std::string detail;
    for (int c = 0; c <= N && ok; ++c)
      for (int a = 0; a <= c && ok; ++a) {
        const std::set<int> low = coverage(p, a, c);
        for (int b = a; b <= c && ok; ++b) {
          const std::set<int> high = coverage(p, b, c);
          if (!std::includes(high.begin(), high.end(), low.begin(),
                             low.end())) {
            ok = false;
            detail = "coverage " + std::to_string(a) + "->" +
                     std::to_string(c) + " not within " + std::to_string(b) +
                     "->" + std::to_string(c);
          }
        }
      }
    add("range-monotone", ok, detail);
  }

  {
    bool ok = true;
    std::string detail;
    for (int a = 0; a < N && ok; ++a)
      if (p.width(a) >= p.width(a + 1)) {
        ok = false;
        detail = "widths not strictly increasing at " + std::to_string(a);
      }
    for (int a = 0; a < N && ok; ++a) {
      if (coverage(p, a, a + 1).contains(p.width(a))) {
        ok = false;
        detail = "width of level " + std::to_string(a) +
                 " is covered one step up";
      }
    }
    add("growth-and-uncovered-width", ok, detail);
  }

  {
    bool ok = true;
    std::string detail;
    for (int a = 0; a <= N && ok; ++a)
      for (int c = a + 1; c <= N && ok; ++c) {
        const auto fresh = fresh_points(p, a, c);
        if (static_cast<int>(fresh.size()) < c - a) {
          ok = false;
          detail = "only " + std::to_string(fresh.size()) +
                   " fresh points from " + std::to_string(a) + " to " +
                   std::to_string(c);
        }
      }
    add("fresh-count", ok, detail);
  }

  {
    // Coverage surrogate for the whole-tower axiom: report what the maps
    // into the top level reach. The next-to-top width is provably missed.
    std::set<int> covered;
    for (int a = 0; a < N; ++a) {
      const auto part = coverage(p, a, N);
      covered.insert(part.begin(), part.end());
    }
    std::vector<int> missed;
    for (int i = 0; i < p.width(N); ++i)
      if (!covered.contains(i)) missed.push_back(i);
    const bool ok =
        N == 0 || std::find(missed.begin(), missed.end(),
                            p.width(N - 1)) != missed.end();
    std::string detail = "covered " + std::to_string(covered.size()) + "/" +
                         std::to_string(p.width(N)) + ", missed " +
                         std::to_string(missed.size());
    add("coverage-surrogate", ok, detail);
  }

  if (include_amalgam_stats && N >= 1) {
    FamilyCache cache(p);
    std::vector<const MorassMap*> into_top;
    for (int a = 0; a < N; ++a)
      for (const MorassMap& m : cache.family(a, N)) into_top.push_back(&m);
    std::size_t tested = 0, found = 0;
    for (std::size_t i = 0; i < into_top.size(); ++i)
      for (std::size_t j = i; j < into_top.size(); ++j) {
        ++tested;
        if (amalgamate(cache, *into_top[i], *into_top[j])) ++found;
      }
    report.amalgam_pairs_tested = tested;
    report.amalgam_pairs_found = found;
    add("amalgamation-surrogate", true,
        std::to_string(found) + "/" + std::to_string(tested) +
            " map pairs factor through a common intermediate");
  }

  return report;
}

}  // namespace morstone::morass
