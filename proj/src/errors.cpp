#include "opwire/errors.hpp"

namespace opwire {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InterfaceMismatch: return "InterfaceMismatch";
    case ErrorCode::NonFiniteType: return "NonFiniteType";
    case ErrorCode::NonRealType: return "NonRealType";
    case ErrorCode::UnknownState: return "UnknownState";
    case ErrorCode::PartialInput: return "PartialInput";
    case ErrorCode::ExplosionGuard: return "ExplosionGuard";
    case ErrorCode::IllPosedLoop: return "IllPosedLoop";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::HorizonMismatch: return "HorizonMismatch";
    case ErrorCode::MissingAssignment: return "MissingAssignment";
    case ErrorCode::MixedAlgebra: return "MixedAlgebra";
    case ErrorCode::DepthExceeded: return "DepthExceeded";
    case ErrorCode::InvalidDiagram: return "InvalidDiagram";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "UnknownError";
}

namespace {

std::string format_message(ErrorCode code, const std::string& message,
                           const std::string& path) {
  std::string out = to_string(code);
  if (!path.empty()) {
    out += " at ";
    out += path;
  }
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::string path)
    : std::runtime_error(format_message(code, message, path)),
      code_(code),
      path_(std::move(path)) {}

}  // namespace opwire
