#include <cctype>

#include "evidx/error.hpp"
#include "evidx/gateway.hpp"

namespace evidx {

std::string render_judge_prompt(std::string_view a, std::string_view b, const JudgeContext& context) {
  std::string p;
  p += kJudgePromptMarker;
  p += "\nYou are checking values extracted from scientific articles for a meta-analysis.\n";
  p += "Query: ";
  p += context.query_id;
  p += "\nField: ";
  p += context.slot;
  p += "\nValue A: ";
  p += a;
  p += "\nValue B: ";
  p += b;
  p += "\nDo Value A and Value B refer to the same entity? Answer with a single word: yes or no.\n";
  return p;
}

std::optional<bool> parse_judge_answer(std::string_view response) {
  std::size_t i = 0;
  while (i < response.size() && !std::isalpha(static_cast<unsigned char>(response[i]))) ++i;
  std::string token;
  while (i < response.size() && std::isalpha(static_cast<unsigned char>(response[i]))) {
    token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(response[i]))));
    ++i;
  }
  if (token == "yes") return true;
  if (token == "no") return false;
  return std::nullopt;
}

GatewayJudge::GatewayJudge(Gateway& gateway, std::string model, double temperature)
    : gateway_(gateway), model_(std::move(model)), temperature_(temperature) {}

JudgeVerdict GatewayJudge::judge(std::string_view predicted, std::string_view gold, const JudgeContext& context) {
  CompletionRequest request;
  request.model = model_;
  request.temperature = temperature_;
  request.prompt = render_judge_prompt(predicted, gold, context);
  {
    std::lock_guard lock(mutex_);
    ++calls_;
  }
  JudgeVerdict verdict;
  verdict.key = request_key(request);
  std::string text;
  try {
    text = gateway_.complete(request).text;
  } catch (const ReplayMissError&) {
    if (!collect_misses_) throw;
    std::lock_guard lock(mutex_);
    missing_.push_back(verdict.key);
    verdict.warning = "judge replay miss " + verdict.key;
    return verdict;
  }
  if (auto answer = parse_judge_answer(text)) {
    verdict.equivalent = *answer;
  } else {
    verdict.warning = "unparseable judge answer treated as no: " + text.substr(0, 80);
  }
  return verdict;
}

std::size_t GatewayJudge::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::vector<std::string> GatewayJudge::missing_keys() const {
  std::lock_guard lock(mutex_);
  return missing_;
}

JudgeVerdict judge_equivalence(std::string_view a, std::string_view b, const JudgeContext& context,
                               Gateway& gateway, const std::string& model) {
  GatewayJudge judge(gateway, model);
  return judge.judge(a, b, context);
}

}  // namespace evidx
