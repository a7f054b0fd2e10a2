#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "morstone/errors.hpp"
#include "morstone/rational.hpp"

namespace morstone::cohen {

/// Finite partial function from the naturals to bits, ordered by extension.
struct CohenCondition {
  std::map<int, int> bits;

  bool defined(int n) const { return bits.contains(n); }
  int at(int n) const { return bits.at(n); }
  std::size_t size() const { return bits.size(); }

  friend bool operator==(const CohenCondition& a, const CohenCondition& b) {
    return a.bits == b.bits;
  }
  friend bool operator<(const CohenCondition& a, const CohenCondition& b) {
    return a.bits < b.bits;
  }

  /// "0:1,3:0" shape; empty string or "-" is the empty condition.
  static CohenCondition parse(const std::string& text) {
    CohenCondition c;
    if (text.empty() || text == "-") return c;
    std::size_t pos = 0;
    while (pos < text.size()) {
      const std::size_t colon = text.find(':', pos);
      if (colon == std::string::npos)
        throw std::invalid_argument("bad condition literal: " + text);
      std::size_t comma = text.find(',', colon);
      if (comma == std::string::npos) comma = text.size();
      const int n = std::stoi(text.substr(pos, colon - pos));
      const int v = std::stoi(text.substr(colon + 1, comma - colon - 1));
      if (v != 0 && v != 1)
        throw std::invalid_argument("condition bit must be 0 or 1");
      if (!c.bits.emplace(n, v).second)
        throw std::invalid_argument("coordinate repeated in condition");
      pos = comma + 1;
    }
    return c;
  }

  std::string str() const {
    if (bits.empty()) return "-";
    std::string out;
    for (const auto& [n, v] : bits) {
      if (!out.empty()) out += ',';
      out += std::to_string(n) + ":" + std::to_string(v);
    }
    return out;
  }
};

/// True when q extends p as a function.
inline bool extends(const CohenCondition& p, const CohenCondition& q) {
  for (const auto& [n, v] : p.bits) {
    const auto it = q.bits.find(n);
    if (it == q.bits.end() || it->second != v) return false;
  }
  return true;
}

/// Union of the two conditions when they agree wherever both are defined.
inline std::optional<CohenCondition> compatible(const CohenCondition& p,
                                                const CohenCondition& q) {
  CohenCondition u = p;
  for (const auto& [n, v] : q.bits) {
    const auto [it, inserted] = u.bits.emplace(n, v);
    if (!inserted && it->second != v) return std::nullopt;
  }
  return u;
}

/// Bit stream driving a construction: an explicit prefix, or one expanded
/// reproducibly from a seed (splitmix64, one bit per step).
struct BitStream {
  std::vector<int> bits;
  std::optional<std::uint64_t> seed;

  static BitStream from_string(const std::string& s) {
    BitStream b;
    for (char ch : s) {
      if (ch != '0' && ch != '1')
        throw std::invalid_argument("bit stream must be over {0,1}");
      b.bits.push_back(ch - '0');
    }
    return b;
  }

  static BitStream from_seed(std::uint64_t seed, std::size_t length) {
    BitStream b;
    b.seed = seed;
    std::uint64_t state = seed;
    for (std::size_t i = 0; i < length; ++i) {
      state += 0x9e3779b97f4a7c15ull;
      std::uint64_t z = state;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      z ^= z >> 31;
      b.bits.push_back(static_cast<int>(z & 1));
    }
    return b;
  }

  std::string str() const {
    std::string out;
    for (int v : bits) out += static_cast<char>('0' + v);
    return out;
  }
};

/// Least extension of p that pins a coordinate n >= n*^2 to the bit the
/// norm oracle dictates: 0 exactly when the oracle value sits strictly
/// below n*-1. An already-suitable coordinate of p is reused; otherwise
/// the least free coordinate is added. When the per-stage enumerations are
/// supplied, a usable coordinate must also own at least n*^2+1 enumerated
/// points.
inline CohenCondition density_check(
    const CohenCondition& p, int n_star,
    const std::vector<std::vector<int>>* stage_enums,
    const std::function<Rational(int)>& norm_oracle) {
  if (n_star < 1) throw std::invalid_argument("n* must be positive");
  const int n_min = n_star * n_star;
  const Rational threshold(n_star - 1);
  const auto usable = [&](int n) {
    if (n < n_min) return false;
    if (stage_enums) {
      if (n >= static_cast<int>(stage_enums->size())) return false;
      if ((*stage_enums)[n].size() <
          static_cast<std::size_t>(n_min) + 1)
        return false;
    }
    return true;
  };
  const auto wanted_bit = [&](int n) {
    return norm_oracle(n) < threshold ? 0 : 1;
  };
  for (const auto& [n, v] : p.bits)
    if (usable(n) && v == wanted_bit(n)) return p;
  for (int n = n_min;; ++n) {
    if (!usable(n)) {
      if (stage_enums && n >= static_cast<int>(stage_enums->size()))
        throw PreconditionError(
            "stage enumerations run out before a free coordinate");
      continue;
    }
    if (!p.defined(n)) {
      CohenCondition q = p;
      q.bits.emplace(n, wanted_bit(n));
      return q;
    }
  }
}

struct Decision {
  int index = 0;
  CohenCondition condition;
  int value = 0;
};

struct GuessResult {
  CohenCondition decider;             // the condition shared by the most indices
  std::vector<int> indices;           // the index set it decides
  std::map<int, int> restriction;     // index -> value on that set
  std::size_t distinct_conditions = 0;
  std::size_t bound = 0;              // guaranteed minimum size of `indices`
};

/// Groups decisions by deciding condition and returns the largest group:
/// with finitely many conditions, some single condition decides at least
/// ceil(#indices / #conditions) of them. Ties go to the smallest condition.
inline GuessResult pigeonhole_guess(
    const std::vector<Decision>& decisions,
    const std::set<CohenCondition>* universe = nullptr) {
  if (decisions.empty()) throw PreconditionError("no decisions supplied");
  std::set<int> seen;
  for (const Decision& d : decisions) {
    if (!seen.insert(d.index).second)
      throw std::invalid_argument("decision index repeated: " +
                                  std::to_string(d.index));
    if (universe && !universe->contains(d.condition))
      throw PreconditionError("condition outside the declared universe",
                              d.index);
  }
  std::map<CohenCondition, std::vector<const Decision*>> groups;
  for (const Decision& d : decisions) groups[d.condition].push_back(&d);

  const std::map<CohenCondition, std::vector<const Decision*>>::value_type*
      best = nullptr;
  for (const auto& entry : groups)
    if (!best || entry.second.size() > best->second.size()) best = &entry;

  GuessResult out;
  out.decider = best->first;
  for (const Decision* d : best->second) {
    out.indices.push_back(d->index);
    out.restriction.emplace(d->index, d->value);
  }
  std::sort(out.indices.begin(), out.indices.end());
  out.distinct_conditions = groups.size();
  out.bound = (decisions.size() + groups.size() - 1) / groups.size();
  return out;
}

}  // namespace morstone::cohen
