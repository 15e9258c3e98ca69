#include "labflow/core/errors.hpp"

namespace labflow {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kSchema: return "SchemaError";
    case ErrorCode::kBackend: return "BackendError";
    case ErrorCode::kUnmappableAction: return "UnmappableAction";
    case ErrorCode::kEmbed: return "EmbedError";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kEmptyKnowledgeBase: return "EmptyKnowledgeBase";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kDuplicateKey: return "DuplicateKey";
    case ErrorCode::kUnknownPredicate: return "UnknownPredicate";
    case ErrorCode::kPreconditionViolated: return "PreconditionViolated";
    case ErrorCode::kUnknownInstruction: return "UnknownInstruction";
    case ErrorCode::kMalformedReply: return "MalformedReply";
    case ErrorCode::kValidationFatal: return "ValidationFatal";
    case ErrorCode::kNoSuspendedSubtask: return "NoSuspendedSubtask";
    case ErrorCode::kInvalidReorderTarget: return "InvalidReorderTarget";
    case ErrorCode::kEpochOutOfRange: return "EpochOutOfRange";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDecode: return "DecodeError";
    case ErrorCode::kArity: return "ArityError";
    case ErrorCode::kMixedM: return "MixedM";
    case ErrorCode::kInconsistentScenario: return "InconsistentScenario";
    case ErrorCode::kBind: return "BindError";
  }
  return "Error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace labflow
