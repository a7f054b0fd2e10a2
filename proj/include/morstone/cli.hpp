#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "morstone/balg.hpp"
#include "morstone/cohen.hpp"
#include "morstone/errors.hpp"
#include "morstone/lmodel.hpp"
#include "morstone/morass.hpp"
#include "morstone/plam.hpp"
#include "morstone/serialize.hpp"

namespace morstone::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kReportSchema = 1;

using Json = nlohmann::ordered_json;

/// Parameters of one tool invocation. Which fields matter depends on the
/// command; everything is validated before the pipeline runs.
struct RunConfig {
  std::string command;

  int levels = 8;
  std::string split_rule = "doubling";
  std::string variant = "plain";
  std::string bits;
  std::optional<std::uint64_t> seed;
  int stages = 0;

  std::string input;
  std::string input2;
  std::string out_path;

  std::string terms;
  int max_family = 4;
  int n_star = 3;
  std::string c_value = "1";
  std::string p_literal = "-";
  std::string oracle_path;
  std::string decisions_path;
  std::string base_dir;
  std::string fresh;
  std::string system_dir;
  std::size_t budget = balg::default_budget();
  bool skip_amalgam_stats = false;
};

struct Report {
  Json json;
  bool pass = false;

  /// Render without the volatile timing field; identical configurations
  /// produce identical stable text.
  std::string stable_text() const {
    Json copy = json;
    copy.erase("timing_ms");
    return copy.dump(2) + "\n";
  }
  std::string text() const { return json.dump(2) + "\n"; }
};

namespace detail {

inline Json check(const std::string& name, bool pass, Json details = {}) {
  Json c;
  c["name"] = name;
  c["pass"] = pass;
  if (!details.is_null()) c["details"] = std::move(details);
  return c;
}

inline std::vector<int> parse_bits_config(const RunConfig& cfg) {
  if (!cfg.bits.empty()) {
    const auto bits = cohen::BitStream::from_string(cfg.bits).bits;
    if (cfg.stages > 0 && static_cast<std::size_t>(cfg.stages) != bits.size())
      throw std::invalid_argument("--stages disagrees with the --bits length");
    return bits;
  }
  if (cfg.seed)
    return cohen::BitStream::from_seed(*cfg.seed,
                                       static_cast<std::size_t>(cfg.stages))
        .bits;
  throw std::invalid_argument("construct needs --bits or --seed with --stages");
}

inline std::vector<int> parse_index_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    std::string item = text.substr(pos, comma - pos);
    if (!item.empty() && item[0] == 'a') item = item.substr(1);
    if (item.empty()) throw std::invalid_argument("empty index in list");
    out.push_back(std::stoi(item));
    pos = comma + 1;
  }
  return out;
}

inline std::vector<std::string> sorted_dir_entries(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  if (!fs::is_directory(dir)) throw Error("not a directory: " + dir);
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

inline void run_morass_build(const RunConfig& cfg, Json& out, bool& pass) {
  const auto prefix = morass::build_prefix(
      cfg.levels, morass::parse_split_rule(cfg.split_rule));
  const std::string text = serialize::write_prefix(prefix);
  if (!cfg.out_path.empty()) serialize::write_file(cfg.out_path, text);
  out["levels"] = prefix.levels;
  out["checks"].push_back(check(
      "built", true,
      Json{{"top_width", prefix.levels.back()}, {"written", !cfg.out_path.empty()}}));
  pass = true;
}

inline void run_morass_verify(const RunConfig& cfg, Json& out, bool& pass) {
  const auto prefix = serialize::load_prefix(cfg.input);
  const auto report = morass::verify_axioms(prefix, !cfg.skip_amalgam_stats);
  pass = true;
  for (const auto& c : report.checks) {
    Json details;
    if (!c.detail.empty()) details["note"] = c.detail;
    out["checks"].push_back(check(c.name, c.pass, details));
    pass = pass && c.pass;
  }
  out["amalgam_pairs_tested"] = report.amalgam_pairs_tested;
  out["amalgam_pairs_found"] = report.amalgam_pairs_found;
}

inline void run_construct(const RunConfig& cfg, Json& out, bool& pass) {
  namespace fs = std::filesystem;
  const auto rule = morass::parse_split_rule(cfg.split_rule);
  const auto prefix = morass::build_prefix(cfg.levels, rule);
  const std::vector<int> bits = parse_bits_config(cfg);
  const auto variant = cfg.variant == "c" ? lmodel::Variant::CAlgebra
                                          : lmodel::Variant::Plain;
  const auto run = lmodel::run_construction(prefix, bits, variant, false);

  pass = true;
  {
    Json failures = Json::array();
    for (std::size_t lvl = 0; lvl < run.levels.size(); ++lvl) {
      const auto tr = lmodel::check_theory(run.levels[lvl], variant);
      for (const auto& issue : tr.issues)
        failures.push_back(Json{{"level", lvl},
                                {"clause", issue.clause},
                                {"detail", issue.detail}});
    }
    const bool ok = failures.empty();
    out["checks"].push_back(check(
        "theory", ok,
        Json{{"levels_checked", run.levels.size()}, {"failures", failures}}));
    pass = pass && ok;
  }
  {
    std::size_t maps_checked = 0;
    bool ok = true;
    for (std::size_t lvl = 0; lvl + 1 < run.levels.size(); ++lvl)
      for (const auto& m : morass::maps_between(prefix, static_cast<int>(lvl),
                                                static_cast<int>(lvl) + 1)) {
        ++maps_checked;
        ok = ok &&
             lmodel::embed_check(run.levels[lvl], run.levels[lvl + 1], m.func);
      }
    out["checks"].push_back(
        check("one-step-embeddings", ok, Json{{"maps_checked", maps_checked}}));
    pass = pass && ok;
  }
  {
    const auto pres = balg::presentation_from_model(run.levels.back());
    Json stages = Json::array();
    bool ok = true;
    for (std::size_t n = 0; n < bits.size(); ++n) {
      const bool match =
          balg::dichotomy_check(pres, run.plan.fresh_sets[n], bits[n]);
      stages.push_back(Json{{"stage", n}, {"bit", bits[n]}, {"match", match}});
      ok = ok && match;
    }
    out["checks"].push_back(check("dichotomy", ok, Json{{"stages", stages}}));
    pass = pass && ok;
  }
  if (variant == lmodel::Variant::CAlgebra) {
    const auto pres = balg::presentation_from_model(run.levels.back());
    bool ok = true;
    for (int g : pres.gens) ok = ok && balg::generator_nonzero(pres, g);
    out["checks"].push_back(check("generator-nonzero", ok,
                                  Json{{"generators", pres.gens.size()}}));
    pass = pass && ok;
  }

  out["alpha"] = run.plan.alpha;
  out["top_universe"] = run.levels.back().universe;

  if (!cfg.out_path.empty()) {
    fs::create_directories(cfg.out_path);
    const fs::path dir(cfg.out_path);
    serialize::write_file((dir / "prefix.morass").string(),
                          serialize::write_prefix(prefix));
    std::ostringstream plan;
    plan << "variant " << lmodel::variant_name(variant) << "\nalpha";
    for (int a : run.plan.alpha) plan << " " << a;
    plan << "\n";
    for (std::size_t n = 0; n < run.plan.fresh_sets.size(); ++n) {
      plan << "stage " << n << " fresh";
      for (int v : run.plan.fresh_sets[n]) plan << " " << v;
      if (variant == lmodel::Variant::CAlgebra)
        plan << " extra " << run.plan.extra_fresh[n];
      plan << "\n";
    }
    serialize::write_file((dir / "plan.txt").string(), plan.str());
    for (std::size_t lvl = 0; lvl < run.levels.size(); ++lvl)
      serialize::write_file(
          (dir / ("level" + std::to_string(lvl) + ".model")).string(),
          serialize::write_model(run.levels[lvl]));
  }
}

inline void run_norm(const RunConfig& cfg, Json& out, bool& pass) {
  const auto pres = serialize::load_presentation(cfg.input);
  const auto f = serialize::parse_terms(cfg.terms);
  const Rational value =
      balg::norm_simple(pres, f, balg::Backend::Propagation, cfg.budget);
  out["norm"] = value.str();
  bool agreed = true;
  if (pres.gens.size() <= cfg.budget) {
    const Rational check_value =
        balg::norm_simple(pres, f, balg::Backend::Enumeration, cfg.budget);
    agreed = check_value == value;
    out["checks"].push_back(check("backend-agreement", agreed,
                                  Json{{"enumeration", check_value.str()}}));
  }
  pass = agreed;
}

inline void run_calg_verify(const RunConfig& cfg, Json& out, bool& pass) {
  auto pres = serialize::load_presentation(cfg.input);
  pres.uses_blocks = true;
  const auto report =
      balg::is_c_algebra(pres, static_cast<std::size_t>(cfg.max_family));
  Json issues = Json::array();
  for (const auto& issue : report.issues)
    issues.push_back(Json{{"check", issue.check}, {"detail", issue.detail}});
  out["checks"].push_back(
      check("c-algebra", report.pass(),
            Json{{"family_bound", report.family_bound},
                 {"families_checked", report.families_checked},
                 {"witnesses_zero_family", report.witnesses_zero_family},
                 {"issues", issues}}));
  pass = report.pass();
}

inline void run_scenario(const RunConfig& cfg, Json& out, bool& pass) {
  const auto r = balg::scenario_bounds(cfg.n_star, Rational::parse(cfg.c_value));
  out["epsilon_max"] = r.epsilon_max.str();
  out["sum_bound_ratio"] = r.sum_bound_ratio.str();
  pass = r.epsilon_max > Rational(0) && r.ratio_exceeds_n_star &&
         r.chain_bound_collapses;
  out["checks"].push_back(check(
      "scenario-arithmetic", pass,
      Json{{"epsilon_positive", r.epsilon_max > Rational(0)},
           {"ratio_exceeds_n_star", r.ratio_exceeds_n_star},
           {"chain_bound_collapses", r.chain_bound_collapses}}));
}

inline void run_cohen_dense(const RunConfig& cfg, Json& out, bool& pass) {
  const auto p = cohen::CohenCondition::parse(cfg.p_literal);
  const auto oracle_map = serialize::load_oracle(cfg.oracle_path);
  const auto oracle = [&oracle_map](int n) {
    const auto it = oracle_map.find(n);
    if (it == oracle_map.end())
      throw PreconditionError("oracle value missing for coordinate " +
                              std::to_string(n));
    return it->second;
  };
  const auto q = cohen::density_check(p, cfg.n_star, nullptr, oracle);
  out["extension"] = q.str();
  const bool extends_ok = cohen::extends(p, q);
  bool witnessed = false;
  for (const auto& [n, v] : q.bits)
    if (n >= cfg.n_star * cfg.n_star &&
        (v == 0) == (oracle(n) < Rational(cfg.n_star - 1)))
      witnessed = true;
  out["checks"].push_back(check("dense-extension", extends_ok && witnessed));
  pass = extends_ok && witnessed;
}

inline void run_cohen_guess(const RunConfig& cfg, Json& out, bool& pass) {
  const auto decisions = serialize::load_decisions(cfg.decisions_path);
  const auto g = cohen::pigeonhole_guess(decisions);
  out["decider"] = g.decider.str();
  out["decided_indices"] = g.indices.size();
  out["distinct_conditions"] = g.distinct_conditions;
  out["bound"] = g.bound;
  pass = g.indices.size() >= g.bound;
  out["checks"].push_back(check("pigeonhole-bound", pass));
}

inline void run_plam_stronger(const RunConfig& cfg, Json& out, bool& pass) {
  const auto p = serialize::load_condition(cfg.input);
  const auto q = serialize::load_condition(cfg.input2);
  const bool result = plam::stronger(p, q, cfg.budget);
  out["stronger"] = result;
  out["checks"].push_back(check("stronger", true, Json{{"holds", result}}));
  pass = true;
}

inline void run_plam_amalgam(const RunConfig& cfg, Json& out, bool& pass) {
  const auto p = serialize::load_condition(cfg.input);
  const auto q = serialize::load_condition(cfg.input2);
  const auto amalgam = plam::compatible(p, q, cfg.budget);
  out["compatible"] = amalgam.has_value();
  if (amalgam) {
    const std::string text = serialize::write_presentation(amalgam->pres, true);
    if (!cfg.out_path.empty()) serialize::write_file(cfg.out_path, text);
    out["amalgam"] = text;
  }
  out["checks"].push_back(
      check("amalgam", true, Json{{"exists", amalgam.has_value()}}));
  pass = true;
}

inline void run_plam_split(const RunConfig& cfg, Json& out, bool& pass) {
  std::vector<plam::PCondition> base;
  for (const auto& file : sorted_dir_entries(cfg.base_dir))
    base.push_back(serialize::load_condition(file));
  const auto fresh = parse_index_list(cfg.fresh);
  const auto sp = plam::split_extensions(base, fresh, cfg.budget);
  balg::SimpleFunction f;
  for (int a : fresh) f.push_back({Rational(1), a});
  const Rational chain_norm = balg::norm_simple(sp.chain.pres, f);
  const Rational anti_norm = balg::norm_simple(sp.antichain.pres, f);
  out["chain_norm"] = chain_norm.str();
  out["antichain_norm"] = anti_norm.str();
  const bool norms_ok =
      chain_norm == Rational(static_cast<int>(fresh.size())) &&
      anti_norm == Rational(1);
  bool bases_ok = true;
  for (const auto& b : base)
    bases_ok = bases_ok && plam::stronger(b, sp.chain, cfg.budget) &&
               plam::stronger(b, sp.antichain, cfg.budget);
  out["checks"].push_back(check("split-extends-bases", bases_ok));
  out["checks"].push_back(check("split-norm-dichotomy", norms_ok));
  if (!cfg.out_path.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_path);
    serialize::write_file((fs::path(cfg.out_path) / "chain.cond").string(),
                          serialize::write_presentation(sp.chain.pres, true));
    serialize::write_file(
        (fs::path(cfg.out_path) / "antichain.cond").string(),
        serialize::write_presentation(sp.antichain.pres, true));
  }
  pass = norms_ok && bases_ok;
}

inline void run_plam_limit(const RunConfig& cfg, Json& out, bool& pass) {
  std::vector<plam::PCondition> system;
  std::set<int> indices;
  for (const auto& file : sorted_dir_entries(cfg.system_dir)) {
    system.push_back(serialize::load_condition(file));
    indices.insert(system.back().w().begin(), system.back().w().end());
  }
  const auto report = plam::limit_algebra(
      system, std::vector<int>(indices.begin(), indices.end()), cfg.budget);
  out["limit"] = serialize::write_presentation(report.limit.pres, true);
  out["uncovered_indices"] = report.uncovered_indices;
  bool ok = true;
  for (const auto& p : system)
    ok = ok && plam::stronger(p, report.limit, cfg.budget);
  out["checks"].push_back(
      check("limit-extends-system", ok, Json{{"members", system.size()}}));
  if (!cfg.out_path.empty())
    serialize::write_file(cfg.out_path,
                          serialize::write_presentation(report.limit.pres, true));
  pass = ok;
}

}  // namespace detail

/// Executes one configured pipeline and returns the machine-readable
/// report. Failures of the pipeline's own checks leave `pass` false;
/// input errors surface as exceptions for the caller to report.
inline Report run(const RunConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  Report report;
  Json& out = report.json;
  out["schema"] = kReportSchema;
  out["tool"] = "morstone";
  out["version"] = kVersion;
  out["command"] = cfg.command;
  {
    Json echo;
    echo["levels"] = cfg.levels;
    echo["split"] = cfg.split_rule;
    echo["variant"] = cfg.variant;
    if (!cfg.bits.empty()) echo["bits"] = cfg.bits;
    if (cfg.seed) echo["seed"] = *cfg.seed;
    if (cfg.stages > 0) echo["stages"] = cfg.stages;
    echo["budget"] = cfg.budget;
    out["config"] = std::move(echo);
  }
  out["checks"] = Json::array();

  bool pass = false;
  if (cfg.command == "morass-build")
    detail::run_morass_build(cfg, out, pass);
  else if (cfg.command == "morass-verify")
    detail::run_morass_verify(cfg, out, pass);
  else if (cfg.command == "construct")
    detail::run_construct(cfg, out, pass);
  else if (cfg.command == "norm")
    detail::run_norm(cfg, out, pass);
  else if (cfg.command == "calg-verify")
    detail::run_calg_verify(cfg, out, pass);
  else if (cfg.command == "scenario")
    detail::run_scenario(cfg, out, pass);
  else if (cfg.command == "cohen-dense")
    detail::run_cohen_dense(cfg, out, pass);
  else if (cfg.command == "cohen-guess")
    detail::run_cohen_guess(cfg, out, pass);
  else if (cfg.command == "plam-stronger")
    detail::run_plam_stronger(cfg, out, pass);
  else if (cfg.command == "plam-amalgam")
    detail::run_plam_amalgam(cfg, out, pass);
  else if (cfg.command == "plam-split")
    detail::run_plam_split(cfg, out, pass);
  else if (cfg.command == "plam-limit")
    detail::run_plam_limit(cfg, out, pass);
  else
    throw std::invalid_argument("unknown command: " + cfg.command);

  report.pass = pass;
  out["pass"] = pass;
  out["timing_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - started)
                         .count();

  if (!cfg.out_path.empty() && cfg.command == "construct") {
    namespace fs = std::filesystem;
    serialize::write_file((fs::path(cfg.out_path) / "report.json").string(),
                          report.text());
  }
  return report;
}

}  // namespace morstone::cli
