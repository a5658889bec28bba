#pragma once

#include <stdexcept>
#include <string>

namespace opwire {

enum class ErrorCode {
  InterfaceMismatch,
  NonFiniteType,
  NonRealType,
  UnknownState,
  PartialInput,
  ExplosionGuard,
  IllPosedLoop,
  DimensionMismatch,
  HorizonMismatch,
  MissingAssignment,
  MixedAlgebra,
  DepthExceeded,
  InvalidDiagram,
  SyntaxError,
  SchemaError,
  ValidationError,
};

const char* to_string(ErrorCode code);

/// Library-wide exception. `path()` locates the offending element when one is
/// known: a JSON pointer for model-file errors, a slash-joined box path for
/// hierarchy errors, empty otherwise.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message, std::string path = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& path() const noexcept { return path_; }

private:
  ErrorCode code_;
  std::string path_;
};

}  // namespace opwire
