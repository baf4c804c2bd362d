#include "fput2d/errors.hpp"

namespace fput2d {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ZeroFrequency: return "ZeroFrequency";
    case ErrorKind::AxisDegenerate: return "AxisDegenerate";
    case ErrorKind::Resonant: return "Resonant";
    case ErrorKind::FormMismatch: return "FormMismatch";
    case ErrorKind::UnstableStep: return "UnstableStep";
    case ErrorKind::EnvelopeBlowup: return "EnvelopeBlowup";
    case ErrorKind::FootprintExceeded: return "FootprintExceeded";
    case ErrorKind::MissingB: return "MissingB";
    case ErrorKind::NonResonantCarrierRequired: return "NonResonantCarrierRequired";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace fput2d
