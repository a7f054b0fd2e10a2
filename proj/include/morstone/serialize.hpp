#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "morstone/balg.hpp"
#include "morstone/cohen.hpp"
#include "morstone/errors.hpp"
#include "morstone/lmodel.hpp"
#include "morstone/morass.hpp"
#include "morstone/plam.hpp"
#include "morstone/rational.hpp"

namespace morstone::serialize {

namespace detail {

inline std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

inline int to_int(const std::string& s, const std::string& file, int line) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(file, line, "expected an integer, got '" + s + "'");
  }
}

struct LineReader {
  std::istream& in;
  std::string file;
  int line = 0;

  /// Next non-empty, non-comment line split into tokens; empty at EOF.
  std::vector<std::string> next() {
    std::string raw;
    while (std::getline(in, raw)) {
      ++line;
      const auto toks = tokens(raw);
      if (toks.empty() || toks[0][0] == '#') continue;
      return toks;
    }
    return {};
  }
};

}  // namespace detail

// --- morass towers: "morass N" then one "level a theta [split]" per level

inline std::string write_prefix(const morass::MorassPrefix& p) {
  std::ostringstream out;
  const int N = p.top_level();
  out << "morass " << N << "\n";
  for (int a = 0; a < N; ++a)
    out << "level " << a << " " << p.width(a) << " " << p.steps[a].split
        << "\n";
  out << "level " << N << " " << p.width(N) << "\n";
  return out.str();
}

inline morass::MorassPrefix read_prefix(std::istream& in,
                                        const std::string& file = "<input>") {
  detail::LineReader reader{in, file};
  auto header = reader.next();
  if (header.size() != 2 || header[0] != "morass")
    throw ParseError(file, reader.line, "expected 'morass N' header");
  const int N = detail::to_int(header[1], file, reader.line);
  if (N < 0) throw ParseError(file, reader.line, "negative level count");
  std::vector<int> widths(N + 1, -1);
  std::vector<int> splits(N, -1);
  for (int expected = 0; expected <= N; ++expected) {
    const auto toks = reader.next();
    if (toks.empty())
      throw ParseError(file, reader.line, "missing level line");
    if (toks[0] != "level" || toks.size() < 3 ||
        toks.size() > static_cast<std::size_t>(expected == N ? 3 : 4))
      throw ParseError(file, reader.line, "expected 'level a theta [split]'");
    const int a = detail::to_int(toks[1], file, reader.line);
    if (a != expected)
      throw ParseError(file, reader.line, "levels out of order");
    widths[a] = detail::to_int(toks[2], file, reader.line);
    if (a < N) {
      if (toks.size() != 4)
        throw ParseError(file, reader.line,
                         "inner level needs a splitting point");
      splits[a] = detail::to_int(toks[3], file, reader.line);
    }
  }
  morass::MorassPrefix p;
  p.levels = widths;
  for (int a = 0; a < N; ++a) {
    morass::OneStep step;
    step.split = splits[a];
    const int theta = widths[a];
    if (theta < 0) throw ParseError(file, reader.line, "missing width");
    step.h.resize(std::max(theta, 0));
    for (int i = 0; i < theta; ++i)
      step.h[i] = i < splits[a] ? i : theta + 1 + (i - splits[a]);
    p.steps.push_back(std::move(step));
  }
  return p;
}

// --- models and presentations:
//   "model theta" | "cond" + "w a b c", then "leq x y" / "dis x y" /
//   "block x n" lines

inline std::string write_presentation(const balg::BoolPresentation& p,
                                      bool as_condition = false) {
  std::ostringstream out;
  if (as_condition) {
    out << "cond\nw";
    for (int g : p.gens) out << " " << g;
    out << "\n";
  } else {
    out << "model " << p.gens.size() << "\n";
  }
  for (const auto& [x, y] : p.leq) out << "leq " << x << " " << y << "\n";
  for (const auto& [x, y] : p.dis) out << "dis " << x << " " << y << "\n";
  for (const auto& [g, b] : p.block) out << "block " << g << " " << b << "\n";
  return out.str();
}

inline std::string write_model(const lmodel::GenModel& m) {
  return write_presentation(balg::presentation_from_model(m));
}

inline balg::BoolPresentation read_presentation(
    std::istream& in, const std::string& file = "<input>") {
  detail::LineReader reader{in, file};
  auto header = reader.next();
  if (header.empty()) throw ParseError(file, reader.line, "empty input");
  balg::BoolPresentation p;
  if (header[0] == "model") {
    if (header.size() != 2)
      throw ParseError(file, reader.line, "expected 'model theta'");
    const int theta = detail::to_int(header[1], file, reader.line);
    if (theta < 0) throw ParseError(file, reader.line, "negative universe");
    for (int i = 0; i < theta; ++i) p.gens.push_back(i);
  } else if (header[0] == "cond") {
    const auto wline = reader.next();
    if (wline.empty() || wline[0] != "w")
      throw ParseError(file, reader.line, "expected 'w ...' after 'cond'");
    for (std::size_t i = 1; i < wline.size(); ++i)
      p.gens.push_back(detail::to_int(wline[i], file, reader.line));
    std::sort(p.gens.begin(), p.gens.end());
  } else {
    throw ParseError(file, reader.line, "expected 'model' or 'cond' header");
  }
  for (auto toks = reader.next(); !toks.empty(); toks = reader.next()) {
    if (toks[0] == "leq" && toks.size() == 3) {
      p.leq.insert({detail::to_int(toks[1], file, reader.line),
                    detail::to_int(toks[2], file, reader.line)});
    } else if (toks[0] == "dis" && toks.size() == 3) {
      const int x = detail::to_int(toks[1], file, reader.line);
      const int y = detail::to_int(toks[2], file, reader.line);
      p.dis.insert({std::min(x, y), std::max(x, y)});
    } else if (toks[0] == "block" && toks.size() == 3) {
      p.block.emplace(detail::to_int(toks[1], file, reader.line),
                      detail::to_int(toks[2], file, reader.line));
      p.uses_blocks = true;
    } else {
      throw ParseError(file, reader.line, "unknown relation line '" + toks[0] +
                                              "'");
    }
  }
  p.validate();
  return p;
}

inline lmodel::GenModel read_model(std::istream& in,
                                   const std::string& file = "<input>") {
  const balg::BoolPresentation p = read_presentation(in, file);
  lmodel::GenModel m;
  m.universe = static_cast<int>(p.gens.size());
  for (std::size_t i = 0; i < p.gens.size(); ++i)
    if (p.gens[i] != static_cast<int>(i))
      throw ParseError(file, 0, "model generators must be 0..theta-1");
  m.leq = p.leq;
  m.dis = p.dis;
  m.block = p.block;
  return m;
}

inline plam::PCondition read_condition(std::istream& in,
                                       const std::string& file = "<input>") {
  return plam::PCondition::make(read_presentation(in, file));
}

// --- oracle files: "n value" lines with rational values

inline std::map<int, Rational> read_oracle(std::istream& in,
                                           const std::string& file = "<input>") {
  detail::LineReader reader{in, file};
  std::map<int, Rational> out;
  for (auto toks = reader.next(); !toks.empty(); toks = reader.next()) {
    if (toks.size() != 2)
      throw ParseError(file, reader.line, "expected 'n value'");
    const int n = detail::to_int(toks[0], file, reader.line);
    try {
      out.emplace(n, Rational::parse(toks[1]));
    } catch (const std::exception& e) {
      throw ParseError(file, reader.line, e.what());
    }
  }
  return out;
}

// --- decision files: "index condition value" lines

inline std::vector<cohen::Decision> read_decisions(
    std::istream& in, const std::string& file = "<input>") {
  detail::LineReader reader{in, file};
  std::vector<cohen::Decision> out;
  for (auto toks = reader.next(); !toks.empty(); toks = reader.next()) {
    if (toks.size() != 3)
      throw ParseError(file, reader.line, "expected 'index condition value'");
    cohen::Decision d;
    d.index = detail::to_int(toks[0], file, reader.line);
    try {
      d.condition = cohen::CohenCondition::parse(toks[1]);
    } catch (const std::exception& e) {
      throw ParseError(file, reader.line, e.what());
    }
    d.value = detail::to_int(toks[2], file, reader.line);
    out.push_back(std::move(d));
  }
  return out;
}

inline std::string write_decisions(const std::vector<cohen::Decision>& ds) {
  std::ostringstream out;
  for (const auto& d : ds)
    out << d.index << " " << d.condition.str() << " " << d.value << "\n";
  return out.str();
}

// --- file helpers

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

template <typename T, typename Fn>
T load(const std::string& path, Fn reader) {
  std::istringstream in(read_file(path));
  return reader(in, path);
}

inline morass::MorassPrefix load_prefix(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_prefix(in, path);
}
inline balg::BoolPresentation load_presentation(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_presentation(in, path);
}
inline lmodel::GenModel load_model(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_model(in, path);
}
inline plam::PCondition load_condition(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_condition(in, path);
}
inline std::map<int, Rational> load_oracle(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_oracle(in, path);
}
inline std::vector<cohen::Decision> load_decisions(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_decisions(in, path);
}

// --- simple function terms: "coef*gN,coef*gN,..."

inline balg::SimpleFunction parse_terms(const std::string& text) {
  balg::SimpleFunction f;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string term = text.substr(pos, comma - pos);
    const std::size_t star = term.find('*');
    if (star == std::string::npos)
      throw std::invalid_argument("term needs the shape coef*gN: " + term);
    std::string gen = term.substr(star + 1);
    if (!gen.empty() && gen[0] == 'g') gen = gen.substr(1);
    if (gen.empty()) throw std::invalid_argument("missing generator in term");
    f.push_back({Rational::parse(term.substr(0, star)), std::stoi(gen)});
    pos = comma + 1;
  }
  return f;
}

}  // namespace morstone::serialize
