#include "hps/error.hpp"

#include <sstream>

#include "hps/types.hpp"

namespace hps {

std::string_view face_name(Face f) {
  switch (f) {
    case Face::XMinus: return "-x";
    case Face::XPlus: return "+x";
    case Face::YMinus: return "-y";
    case Face::YPlus: return "+y";
    case Face::ZMinus: return "-z";
    case Face::ZPlus: return "+z";
  }
  return "?";
}

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Sizing: return "SIZING";
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::EigenFailure: return "EIGEN_FAILURE";
    case ErrorCode::Resonance: return "RESONANCE";
    case ErrorCode::SingularSchur: return "SINGULAR_SCHUR";
    case ErrorCode::NoConvergence: return "NO_CONVERGENCE";
    case ErrorCode::Undefined: return "UNDEFINED";
    case ErrorCode::Configuration: return "CONFIGURATION";
  }
  return "UNKNOWN";
}

namespace {

std::string format_message(ErrorCode code, const std::string& what, std::optional<long> leaf,
                           std::optional<double> reduction) {
  std::ostringstream os;
  os << error_code_name(code) << ": " << what;
  if (leaf) os << " (leaf " << *leaf << ")";
  if (reduction) os << " [achieved reduction " << *reduction << "]";
  return os.str();
}

}  // namespace

SolverError::SolverError(ErrorCode code, const std::string& what, std::optional<long> leaf,
                         std::optional<double> reduction)
    : std::runtime_error(format_message(code, what, leaf, reduction)),
      code_(code),
      message_(what),
      leaf_(leaf),
      reduction_(reduction) {}

SolverError SolverError::with_leaf(long leaf) const {
  return SolverError(code_, message_, leaf, reduction_);
}

void require_size(long actual, long expected, std::string_view what) {
  if (actual != expected) {
    std::ostringstream os;
    os << what << ": expected length " << expected << ", got " << actual;
    throw SolverError(ErrorCode::DimensionMismatch, os.str());
  }
}

}  // namespace hps
