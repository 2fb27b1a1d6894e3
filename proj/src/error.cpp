#include "horizon/error.hpp"

namespace horizon {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidShape: return "invalid-shape";
    case ErrorKind::NoHorizon: return "no-horizon";
    case ErrorKind::InvalidPose: return "invalid-pose";
    case ErrorKind::DegenerateConic: return "degenerate-conic";
    case ErrorKind::NotEllipse: return "not-ellipse";
    case ErrorKind::InsufficientPoints: return "insufficient-points";
    case ErrorKind::DegenerateData: return "degenerate-data";
    case ErrorKind::NonEllipticalFit: return "non-elliptical-fit";
    case ErrorKind::IndefiniteBlock: return "indefinite-block";
    case ErrorKind::NumericalDefiniteness: return "numerical-definiteness";
    case ErrorKind::InvalidSensor: return "invalid-sensor";
    case ErrorKind::EmptyBatch: return "empty-batch";
    case ErrorKind::InvalidSweep: return "invalid-sweep";
    case ErrorKind::SceneRejected: return "scene-rejected";
    case ErrorKind::ConfigInfeasible: return "config-infeasible";
    case ErrorKind::InvalidArgument: return "invalid-argument";
  }
  return "unknown";
}

}  // namespace horizon
