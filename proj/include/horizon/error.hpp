#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace horizon {

enum class ErrorKind {
  InvalidShape,
  NoHorizon,
  InvalidPose,
  DegenerateConic,
  NotEllipse,
  InsufficientPoints,
  DegenerateData,
  NonEllipticalFit,
  IndefiniteBlock,
  NumericalDefiniteness,
  InvalidSensor,
  EmptyBatch,
  InvalidSweep,
  SceneRejected,
  ConfigInfeasible,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Domain failure raised by every module. The kind is stable and is what
/// callers (and the CLI exit-code mapping) dispatch on; the message is for humans.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace horizon
