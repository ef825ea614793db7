#pragma once

#include <stdexcept>
#include <string>

namespace ppgsmc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed graph, bad indices, bad JSON.
struct StructureError : Error {
  using Error::Error;
};

// Estimator preconditions (zero terminated mass, signed target, ...).
struct EstimationError : Error {
  using Error::Error;
};

struct NotEnumerable : Error {
  NotEnumerable() : Error("model not enumerable") {}
  explicit NotEnumerable(const std::string& why) : Error("model not enumerable: " + why) {}
};

struct ParseError : Error {
  int line;
  int column;
  ParseError(const std::string& msg, int l, int c)
      : Error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l), column(c) {}
};

}  // namespace ppgsmc
