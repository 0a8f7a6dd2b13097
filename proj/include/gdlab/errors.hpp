#pragma once

#include <stdexcept>
#include <string>

namespace gdlab {

// A requested dense computation exceeds its configured budget; the message
// names the summary/compressed path the caller should use instead.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// A closed form was requested outside the event that justifies it.
class EventPreconditionError : public std::runtime_error {
 public:
  explicit EventPreconditionError(const std::string& what)
      : std::runtime_error(what) {}
};

// A compressed-state run hit a condition its representation cannot express;
// the caller must redo the run densely.
class FallbackRequired : public std::runtime_error {
 public:
  explicit FallbackRequired(const std::string& what)
      : std::runtime_error(what) {}
};

// Bad experiment specification (unknown name, infeasible n, malformed flag
// values). The CLI maps this to exit code 64.
class SpecError : public std::runtime_error {
 public:
  explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gdlab
