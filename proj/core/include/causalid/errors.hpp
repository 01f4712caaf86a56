#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace causalid {

// Base class for everything this library throws.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Expression text that fails to parse. `offset` is the byte position of the
// failure; for syntax errors `expected` lists the token spellings that would
// have been accepted there.
struct ParseError : Error {
  enum class Kind { Syntax, Semantic };

  ParseError(Kind k, std::size_t off, std::string msg,
             std::vector<std::string> exp = {})
      : Error(std::move(msg)), kind(k), offset(off), expected(std::move(exp)) {}

  Kind kind;
  std::size_t offset;
  std::vector<std::string> expected;
};

struct GraphError : Error {
  using Error::Error;
};

struct EvalError : Error {
  using Error::Error;
};

struct QueryError : Error {
  using Error::Error;
};

struct DataError : Error {
  using Error::Error;
};

}  // namespace causalid
