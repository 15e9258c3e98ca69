#include "labflow/verify/verifier.hpp"

#include <cstdio>
#include <regex>
#include <stdexcept>

#include "labflow/core/errors.hpp"
#include "labflow/core/http_client.hpp"
#include "labflow/core/image.hpp"

namespace labflow::verify {

std::string_view phase_name(CheckPhase phase) { return phase == CheckPhase::kPre ? "pre" : "post"; }

std::optional<CheckPhase> parse_phase(std::string_view name) {
  if (name == "pre") return CheckPhase::kPre;
  if (name == "post") return CheckPhase::kPost;
  return std::nullopt;
}

VerificationRequest build_request(const protocol::SubtaskUnit& subtask, CheckPhase phase) {
  return VerificationRequest{phase == CheckPhase::kPre ? subtask.precondition : subtask.postcondition, subtask.knowledge_index,
                             phase, subtask.id};
}

std::string retrieval_query(const VerificationRequest& request, RetrievalKeying keying) {
  switch (keying) {
    case RetrievalKeying::kConditionOnly: return describe(request.condition);
    case RetrievalKeying::kIndexOnly: return request.knowledge_index;
    case RetrievalKeying::kConditionAndIndex: break;
  }
  return describe(request.condition) + " " + request.knowledge_index;
}

VerificationInput fuse_prompt(const world::Observation& obs, const world::RobotState& state, const VerificationRequest& request,
                              const knowledge::RetrievedSet& retrieved, bool allow_empty) {
  if (retrieved.entries.empty() && !allow_empty) {
    throw std::invalid_argument("fuse_prompt: no retrieved knowledge and empty retrieval not allowed");
  }
  std::string p;
  p += request.phase == CheckPhase::kPre ? kReadinessBanner : kCompletionBanner;
  p += "\nCondition: " + describe(request.condition);
  p += "\nRobot pose: " + state.pose_tag;
  p += "\nObservation: <image camera=" + obs.camera_id + " tick=" + std::to_string(obs.timestamp) + ">";
  p += "\nReference knowledge:";
  if (retrieved.entries.empty()) p += "\n(none)";
  int n = 0;
  for (const auto& e : retrieved.entries) {
    char sim[32];
    std::snprintf(sim, sizeof sim, "%.4f", e.similarity);
    p += "\n[" + std::to_string(++n) + "] " + e.key + " (similarity " + sim + ")";
    p += "\nVerification: " + e.item->verification_prompt;
    p += "\nSuccess examples:";
    for (const auto& s : e.item->success_examples) p += "\n- " + s;
    p += "\nFailure examples:";
    for (const auto& s : e.item->failure_examples) p += "\n- " + s;
  }
  p += "\nAnswer PASS if the condition holds in the observation, otherwise FAIL, followed by \": \" and a short reason.\n";

  VerificationInput in;
  in.observation = obs;
  in.robot_state = state;
  in.condition = request.condition;
  in.retrieved = retrieved;
  in.phase = request.phase;
  in.subtask_id = request.subtask_id;
  in.rendered_prompt = std::move(p);
  return in;
}

Json to_json(const Verdict& v) {
  return Json{{"subtask_id", v.subtask_id},
              {"phase", std::string(phase_name(v.phase))},
              {"attempt", v.attempt},
              {"passed", v.passed},
              {"reason", v.reason}};
}

namespace {

Verdict oracle_judge(const world::WorldState& world, const Condition& condition, double noise_rate, Rng& rng) {
  const bool truth = world::eval_condition(world, condition);
  const double u = rng.uniform();
  Verdict v;
  if (condition.predicate == "always") {
    v.reason = "always holds";
  } else {
    bool actual = world.holds(condition.predicate, condition.args);
    v.reason = truth ? describe(condition) + " holds"
                     : describe(Condition{condition.predicate, condition.args, actual}) + " (expected " +
                           (condition.expected ? "true" : "false") + ")";
  }
  v.passed = truth;
  if (u < noise_rate) {
    v.passed = !truth;
    v.reason = "NOISE: " + v.reason;
  }
  return v;
}

}  // namespace

Verdict oracle_verify(const world::WorldState& world, const VerificationRequest& request, double noise_rate, Rng& rng) {
  if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) throw std::invalid_argument("noise_rate must lie in [0, 1]");
  auto v = oracle_judge(world, request.condition, noise_rate, rng);
  v.phase = request.phase;
  v.subtask_id = request.subtask_id;
  return v;
}

OracleVerifier::OracleVerifier(double noise_rate) : noise_rate_(noise_rate) {
  if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) throw std::invalid_argument("noise_rate must lie in [0, 1]");
}

Verdict OracleVerifier::judge(const VerificationInput& input, const VerifyContext& ctx) {
  if (!ctx.world || !ctx.rng) throw std::invalid_argument("oracle verifier needs a world and an rng");
  return oracle_judge(*ctx.world, input.condition, noise_rate_, *ctx.rng);
}

std::pair<bool, std::string> parse_verifier_reply(std::string_view reply) {
  static const std::regex grammar("^(PASS|FAIL)(: (.*))?$");
  auto first = reply.find_first_not_of(" \t\r\n");
  auto last = reply.find_last_not_of(" \t\r\n");
  std::string text = first == std::string_view::npos ? std::string() : std::string(reply.substr(first, last - first + 1));
  std::smatch m;
  if (!std::regex_match(text, m, grammar)) fail(ErrorCode::kMalformedReply, "reply lacks a PASS/FAIL verdict: '" + text + "'");
  bool passed = m[1] == "PASS";
  std::string reason = m[3].matched ? m[3].str() : std::string();
  if (reason.empty()) reason = passed ? "verifier reported PASS" : "verifier reported FAIL";
  return {passed, reason};
}

RemoteVerifier::RemoteVerifier(std::string endpoint, int timeout_seconds)
    : endpoint_(std::move(endpoint)), timeout_seconds_(timeout_seconds) {}

Verdict RemoteVerifier::judge(const VerificationInput& input, const VerifyContext&) {
  Json request{{"prompt", input.rendered_prompt},
               {"image_b64", base64_encode(encode_png(input.observation.image))},
               {"phase", std::string(phase_name(input.phase))}};
  auto body = post_json(endpoint_, request, timeout_seconds_);
  Json reply;
  try {
    reply = Json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    fail(ErrorCode::kMalformedReply, "verifier response is not JSON");
  }
  if (!reply.is_object() || !reply.contains("reply") || !reply["reply"].is_string()) {
    fail(ErrorCode::kMalformedReply, "verifier response lacks a 'reply' string");
  }
  auto [passed, reason] = parse_verifier_reply(reply["reply"].get<std::string>());
  Verdict v;
  v.passed = passed;
  v.reason = std::move(reason);
  return v;
}

FaultInjectingVerifier::FaultInjectingVerifier(std::shared_ptr<VerifierBackend> inner, std::set<std::pair<int, CheckPhase>> faults)
    : inner_(std::move(inner)), faults_(std::move(faults)) {}

Verdict FaultInjectingVerifier::judge(const VerificationInput& input, const VerifyContext& ctx) {
  auto v = inner_->judge(input, ctx);
  if (faults_.count({input.subtask_id, input.phase})) {
    v.passed = false;
    v.reason = "FAULT: injected failure";
  }
  return v;
}

Verdict verify(const VerificationInput& input, VerifierBackend& backend, const VerifyContext& ctx, int attempt) {
  Verdict v;
  try {
    v = backend.judge(input, ctx);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kMalformedReply) throw;
    v.passed = false;
    v.reason = std::string(kMalformedReason);
  }
  if (!v.passed && v.reason.empty()) v.reason = "verification failed";
  v.phase = input.phase;
  v.subtask_id = input.subtask_id;
  v.attempt = attempt;
  return v;
}

}  // namespace labflow::verify
