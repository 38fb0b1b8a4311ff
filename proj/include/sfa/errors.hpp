#pragma once

#include <stdexcept>
#include <string>

namespace sfa {

/// Error categories. The CLI maps each to an exit code.
enum class ErrorKind {
  domain,         // invalid physical input
  config,         // malformed configuration or flags
  range,          // request outside a traced/valid range
  no_solution,    // classical return energy not reachable
  convergence,    // Newton did not converge
  branch_jump,    // continuation left the branch
  homotopy,       // Ip homotopy failed
  degenerate,     // coalescing saddles, singular Hessian
  nonlinearity,   // linear fit guard tripped
  validation      // oracle comparison failed
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorKind::domain, w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::config, w) {}
};
struct RangeError : Error {
  explicit RangeError(const std::string& w) : Error(ErrorKind::range, w) {}
};
struct NoSolutionError : Error {
  explicit NoSolutionError(const std::string& w) : Error(ErrorKind::no_solution, w) {}
};
struct ConvergenceError : Error {
  explicit ConvergenceError(const std::string& w) : Error(ErrorKind::convergence, w) {}
};
struct BranchJumpError : Error {
  explicit BranchJumpError(const std::string& w) : Error(ErrorKind::branch_jump, w) {}
};
struct DegenerateSaddleError : Error {
  explicit DegenerateSaddleError(const std::string& w) : Error(ErrorKind::degenerate, w) {}
};
struct NonlinearityError : Error {
  explicit NonlinearityError(const std::string& w) : Error(ErrorKind::nonlinearity, w) {}
};
struct ValidationError : Error {
  explicit ValidationError(const std::string& w) : Error(ErrorKind::validation, w) {}
};

/// Raised when a step of the Ip homotopy cannot be completed; carries the
/// last Ip fraction that was solved successfully.
class HomotopyError : public Error {
 public:
  HomotopyError(const std::string& w, double last_good_fraction)
      : Error(ErrorKind::homotopy, w), last_good_fraction_(last_good_fraction) {}
  double last_good_fraction() const noexcept { return last_good_fraction_; }

 private:
  double last_good_fraction_;
};

}  // namespace sfa
