#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "labflow/core/rng.hpp"
#include "labflow/knowledge/knowledge_base.hpp"
#include "labflow/protocol/types.hpp"
#include "labflow/world/render.hpp"
#include "labflow/world/robot_state.hpp"
#include "labflow/world/world_state.hpp"

namespace labflow::verify {

enum class CheckPhase { kPre, kPost };

std::string_view phase_name(CheckPhase phase);  // "pre" / "post"
std::optional<CheckPhase> parse_phase(std::string_view name);

struct VerificationRequest {
  Condition condition;
  std::string knowledge_index;
  CheckPhase phase = CheckPhase::kPre;
  int subtask_id = 0;
};

VerificationRequest build_request(const protocol::SubtaskUnit& subtask, CheckPhase phase);

enum class RetrievalKeying { kConditionAndIndex, kConditionOnly, kIndexOnly };

std::string retrieval_query(const VerificationRequest& request, RetrievalKeying keying = RetrievalKeying::kConditionAndIndex);

struct VerificationInput {
  world::Observation observation;
  world::RobotState robot_state;
  Condition condition;
  knowledge::RetrievedSet retrieved;
  CheckPhase phase = CheckPhase::kPre;
  int subtask_id = 0;
  std::string rendered_prompt;
};

inline constexpr std::string_view kReadinessBanner = "[READINESS CHECK]";
inline constexpr std::string_view kCompletionBanner = "[COMPLETION CHECK]";

// invalid_argument when `retrieved` is empty and `allow_empty` is false.
// Only the first line of the prompt depends on the phase.
VerificationInput fuse_prompt(const world::Observation& obs, const world::RobotState& state, const VerificationRequest& request,
                              const knowledge::RetrievedSet& retrieved, bool allow_empty = false);

struct Verdict {
  bool passed = false;
  std::string reason;
  CheckPhase phase = CheckPhase::kPre;
  int subtask_id = 0;
  int attempt = 1;
};

Json to_json(const Verdict& verdict);

// Ground truth handed to backends that may consult it. Remote backends ignore it.
struct VerifyContext {
  const world::WorldState* world = nullptr;
  Rng* rng = nullptr;
};

class VerifierBackend {
 public:
  virtual ~VerifierBackend() = default;
  // Fills passed and reason; may throw BackendError or MalformedReply.
  virtual Verdict judge(const VerificationInput& input, const VerifyContext& ctx) = 0;
};

// Evaluates the condition against the world, flipping the truth with
// probability noise_rate. Exactly one rng draw per call.
Verdict oracle_verify(const world::WorldState& world, const VerificationRequest& request, double noise_rate, Rng& rng);

class OracleVerifier : public VerifierBackend {
 public:
  explicit OracleVerifier(double noise_rate = 0.0);
  Verdict judge(const VerificationInput& input, const VerifyContext& ctx) override;
  double noise_rate() const { return noise_rate_; }

 private:
  double noise_rate_;
};

// Reply grammar: ^(PASS|FAIL)(: .*)?$ after trimming surrounding whitespace.
// MalformedReply otherwise.
std::pair<bool, std::string> parse_verifier_reply(std::string_view reply);

class RemoteVerifier : public VerifierBackend {
 public:
  explicit RemoteVerifier(std::string endpoint, int timeout_seconds = 30);
  Verdict judge(const VerificationInput& input, const VerifyContext& ctx) override;

 private:
  std::string endpoint_;
  int timeout_seconds_;
};

// Forces a failed verdict for the listed (subtask, phase) checks. The inner
// backend is still consulted so rng consumption is unchanged.
class FaultInjectingVerifier : public VerifierBackend {
 public:
  FaultInjectingVerifier(std::shared_ptr<VerifierBackend> inner, std::set<std::pair<int, CheckPhase>> faults);
  Verdict judge(const VerificationInput& input, const VerifyContext& ctx) override;

 private:
  std::shared_ptr<VerifierBackend> inner_;
  std::set<std::pair<int, CheckPhase>> faults_;
};

inline constexpr std::string_view kMalformedReason = "verifier reply malformed";

// Runs the backend and stamps phase, subtask and attempt. A malformed reply
// becomes a failed verdict; BackendError propagates.
Verdict verify(const VerificationInput& input, VerifierBackend& backend, const VerifyContext& ctx, int attempt = 1);

}  // namespace labflow::verify
