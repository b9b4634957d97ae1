#pragma once

#include <stdexcept>
#include <string>

namespace smanet {

// Every failure the library reports carries one of these kinds, so callers
// (and tests) can dispatch on the reason instead of parsing message text.
enum class ErrorKind {
  unknown_node,
  unknown_link,
  unreachable,
  invalid_path,
  instance_too_large,
  infeasible,
  invalid_placement,
  conflicting_rule,
  mismatched_link,
  parse_error,
  semantic_error,
  invalid_scenario,
  invalid_argument,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace smanet
