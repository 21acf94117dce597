#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chtn {

// Precondition violated by the caller: bad shapes, out-of-range labels,
// inconsistent configuration.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input is well-formed but mathematically degenerate (zero-norm vector).
class DegenerateInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Object used in a state it cannot be used in (stale forward trace).
class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Retrieval query with no relevant item in the gallery.
class UndefinedQuery : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed file. Carries the 1-based line (text formats) or byte offset
// (binary formats) at which parsing failed.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, std::size_t location,
             const std::string& what, bool is_offset = false)
      : std::runtime_error(path + (is_offset ? ":@" : ":") +
                           std::to_string(location) + ": " + what),
        location_(location) {}

  std::size_t location() const { return location_; }

 private:
  std::size_t location_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite loss during training.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::string term, std::size_t iteration)
      : std::runtime_error("non-finite " + term + " loss at iteration " +
                           std::to_string(iteration)),
        term_(std::move(term)),
        iteration_(iteration) {}

  const std::string& term() const { return term_; }
  std::size_t iteration() const { return iteration_; }

 private:
  std::string term_;
  std::size_t iteration_;
};

}  // namespace chtn
