#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace morstone {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A query exceeded the configured solver budget.
struct TooLargeError : Error {
  using Error::Error;
};

/// Two construction routes forced contradictory relations.
struct ConstructionFailure : Error {
  ConstructionFailure(std::string what, std::pair<int, int> pair)
      : Error(std::move(what)), offending(pair) {}
  std::pair<int, int> offending;
};

/// Projections along two routes into the limit disagree.
struct IllDefinedLimit : Error {
  using Error::Error;
};

/// An operation's stated precondition does not hold for the given input.
struct PreconditionError : Error {
  PreconditionError(std::string what, int a = -1, int b = -1)
      : Error(std::move(what)), witness{a, b} {}
  std::pair<int, int> witness;
};

struct ParseError : Error {
  ParseError(const std::string& file, int line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what),
        file(file),
        line(line) {}
  std::string file;
  int line;
};

}  // namespace morstone
