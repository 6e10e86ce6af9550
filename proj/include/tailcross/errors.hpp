#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tailcross {

/// Base class for all library errors.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class domain_error : public error {
 public:
  using error::error;
};

/// Too few samples for the requested estimator or threshold.
class insufficient_samples_error : public error {
 public:
  using error::error;
};

/// Base for estimator failures caused by the data itself (duplicated or
/// non-positive samples).  Split-averaging skips and counts these.
class degenerate_error : public error {
 public:
  using error::error;
};

class degenerate_spacing_error : public degenerate_error {
 public:
  using degenerate_error::degenerate_error;
};

class degenerate_moments_error : public degenerate_error {
 public:
  using degenerate_error::degenerate_error;
};

class positivity_error : public degenerate_error {
 public:
  using degenerate_error::degenerate_error;
};

/// Every group (or every conditional) was degenerate; no estimate exists.
class estimation_failed_error : public error {
 public:
  using error::error;
};

/// A linear system could not be factorized.
class ill_conditioned_error : public error {
 public:
  using error::error;
};

/// CSV or flag parsing failure; carries a 1-based line number when known.
class parse_error : public error {
 public:
  explicit parse_error(const std::string& what, std::size_t line = 0)
      : error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace tailcross
