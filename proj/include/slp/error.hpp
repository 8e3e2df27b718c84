#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slp {

/// Failure categories raised by the library. The numeric values are part of
/// the C ABI (see slp.h) and must not be reordered.
enum class ErrorCode : int {
  InvalidArgument = 1,
  SelfLoop = 2,
  NonPositiveWeight = 3,
  DuplicateEdge = 4,
  NodeOutOfRange = 5,
  DimensionMismatch = 6,
  PartitionMismatch = 7,
  CoefficientCountMismatch = 8,
  ZeroReference = 9,
  IsolatedNode = 10,
  DisconnectedGraph = 11,
  EmptySamplingSet = 12,
  NonFiniteIterate = 13,
  DegenerateEdgeSet = 14,
  NotResolved = 15,
  InvalidSpec = 16,
  ConnectivityRetryExhausted = 17,
  EmptyRegion = 18,
  DegenerateImage = 19,
  Io = 20,
  Parse = 21,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace slp
