#include "slp/error.hpp"

namespace slp {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::NodeOutOfRange: return "NodeOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::PartitionMismatch: return "PartitionMismatch";
    case ErrorCode::CoefficientCountMismatch: return "CoefficientCountMismatch";
    case ErrorCode::ZeroReference: return "ZeroReference";
    case ErrorCode::IsolatedNode: return "IsolatedNode";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::EmptySamplingSet: return "EmptySamplingSet";
    case ErrorCode::NonFiniteIterate: return "NonFiniteIterate";
    case ErrorCode::DegenerateEdgeSet: return "DegenerateEdgeSet";
    case ErrorCode::NotResolved: return "NotResolved";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ConnectivityRetryExhausted: return "ConnectivityRetryExhausted";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::DegenerateImage: return "DegenerateImage";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

}  // namespace slp
