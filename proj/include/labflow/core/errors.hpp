#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace labflow {

enum class ErrorCode {
  kParse,
  kSchema,
  kBackend,
  kUnmappableAction,
  kEmbed,
  kDimensionMismatch,
  kZeroVector,
  kEmptyKnowledgeBase,
  kIo,
  kDuplicateKey,
  kUnknownPredicate,
  kPreconditionViolated,
  kUnknownInstruction,
  kMalformedReply,
  kValidationFatal,
  kNoSuspendedSubtask,
  kInvalidReorderTarget,
  kEpochOutOfRange,
  kShapeMismatch,
  kLengthMismatch,
  kDecode,
  kArity,
  kMixedM,
  kInconsistentScenario,
  kBind,
};

std::string_view error_code_name(ErrorCode code);

// Every recoverable failure in the library surfaces as an Error carrying a
// code, so callers can branch on the kind without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace labflow
