#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace warpgh {

/// Failure categories shared by every module. The CLI maps them to exit codes.
enum class ErrorKind {
  Domain,
  Continuity,
  Singularity,
  Unsupported,
  BudgetUnavailable,
  Construction,
  Precondition,
  Smoothing,
  Modification,
  Capacity,
  Contract,
  Surgery,
  Budget,
  Selection,
  Resolution,
  Validation,
  Parse,
  Io,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Continuity: return "continuity";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::BudgetUnavailable: return "budget-unavailable";
    case ErrorKind::Construction: return "construction";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Smoothing: return "smoothing";
    case ErrorKind::Modification: return "modification";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::Contract: return "contract";
    case ErrorKind::Surgery: return "surgery";
    case ErrorKind::Budget: return "budget";
    case ErrorKind::Selection: return "selection";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, std::string operation, std::string detail)
      : std::runtime_error(module + "." + operation + ": " + to_string(kind) + ": " + detail),
        kind_(kind),
        module_(std::move(module)),
        operation_(std::move(operation)),
        detail_(std::move(detail)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& module() const { return module_; }
  const std::string& operation() const { return operation_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorKind kind_;
  std::string module_;
  std::string operation_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& module, const std::string& op,
                              const std::string& detail) {
  throw Error(kind, module, op, detail);
}

}  // namespace warpgh
