#pragma once

#include <stdexcept>
#include <string>

namespace camplace {

enum class ErrorCode {
  kParse,
  kEmptyMesh,
  kInvalidParams,
  kEmptyFreeSpace,
  kDegenerateOrientation,
  kAntiparallelRotation,
  kInfeasibleWarmStart,
  kNoPosition,
  kSceneNotFound,
  kConfig,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kEmptyMesh: return "empty mesh";
    case ErrorCode::kInvalidParams: return "invalid parameters";
    case ErrorCode::kEmptyFreeSpace: return "empty free space";
    case ErrorCode::kDegenerateOrientation: return "degenerate orientation";
    case ErrorCode::kAntiparallelRotation: return "antiparallel rotation";
    case ErrorCode::kInfeasibleWarmStart: return "infeasible warm start";
    case ErrorCode::kNoPosition: return "no position";
    case ErrorCode::kSceneNotFound: return "scene not found";
    case ErrorCode::kConfig: return "config error";
  }
  return "unknown error";
}

// Every recoverable failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace camplace
