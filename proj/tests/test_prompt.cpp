#include <doctest.h>

#include <vector>

#include "qapr/prompt.hpp"
#include "test_util.hpp"

using namespace qapr;

namespace {

struct PromptFixture {
  BugBundle bundle = testutil::bell_wrong_gate_bundle();
  std::vector<TestOutcome> baseline;
  std::vector<MutationRecord> records;

  PromptFixture() {
    baseline = run_tests(bundle.buggy_circuit, bundle.tests, kDefaultTimeLimitMs);
    records = analyze(bundle, kDefaultTimeLimitMs);
  }
};

std::vector<std::string> section_sequence(const std::string& user_prompt) {
  static const std::vector<std::string_view> all = {
      kSectionBuggyCode, kSectionBugDescription, kSectionExpectedBehavior,
      kSectionCurrentResult, kSectionMutationAnalysis};
  std::vector<std::pair<std::size_t, std::string>> found;
  for (const std::string_view header : all) {
    std::size_t at = user_prompt.find(header);
    while (at != std::string::npos) {
      found.emplace_back(at, std::string(header));
      at = user_prompt.find(header, at + 1);
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<std::string> sequence;
  for (const auto& [pos, header] : found) sequence.push_back(header);
  return sequence;
}

}  // namespace

TEST_CASE("config tags parse and classify") {
  CHECK(config_tag(PromptConfig::S) == "S");
  CHECK(config_tag(PromptConfig::SDM) == "S+D+M");
  CHECK(parse_config_tag("S+M") == PromptConfig::SM);
  CHECK_THROWS_AS(parse_config_tag("SDM"), PromptError);
  CHECK(!includes_dynamic(PromptConfig::SM));
  CHECK(includes_dynamic(PromptConfig::SD));
  CHECK(includes_mutation(PromptConfig::SM));
  CHECK(!includes_mutation(PromptConfig::SD));
}

TEST_CASE("section sets match the configuration") {
  const PromptFixture fx;

  SUBCASE("S carries exactly the three static sections") {
    const PromptBundle p = build_prompt(fx.bundle, PromptConfig::S, fx.baseline,
                                        nullptr);
    CHECK(section_sequence(p.user_prompt) ==
          std::vector<std::string>{std::string(kSectionBuggyCode),
                                   std::string(kSectionBugDescription),
                                   std::string(kSectionExpectedBehavior)});
  }
  SUBCASE("S+D adds Current Result") {
    const PromptBundle p = build_prompt(fx.bundle, PromptConfig::SD, fx.baseline,
                                        nullptr);
    CHECK(section_sequence(p.user_prompt) ==
          std::vector<std::string>{std::string(kSectionBuggyCode),
                                   std::string(kSectionBugDescription),
                                   std::string(kSectionExpectedBehavior),
                                   std::string(kSectionCurrentResult)});
  }
  SUBCASE("S+M adds Mutation Analysis Result only") {
    const PromptBundle p = build_prompt(fx.bundle, PromptConfig::SM, fx.baseline,
                                        &fx.records);
    CHECK(section_sequence(p.user_prompt) ==
          std::vector<std::string>{std::string(kSectionBuggyCode),
                                   std::string(kSectionBugDescription),
                                   std::string(kSectionExpectedBehavior),
                                   std::string(kSectionMutationAnalysis)});
  }
  SUBCASE("S+D+M carries all five sections in order") {
    const PromptBundle p = build_prompt(fx.bundle, PromptConfig::SDM, fx.baseline,
                                        &fx.records);
    CHECK(section_sequence(p.user_prompt) ==
          std::vector<std::string>{std::string(kSectionBuggyCode),
                                   std::string(kSectionBugDescription),
                                   std::string(kSectionExpectedBehavior),
                                   std::string(kSectionCurrentResult),
                                   std::string(kSectionMutationAnalysis)});
  }
}

TEST_CASE("the buggy code is embedded in canonical form") {
  const PromptFixture fx;
  const PromptBundle p =
      build_prompt(fx.bundle, PromptConfig::S, fx.baseline, nullptr);
  CHECK(p.user_prompt.find(print_qasm(fx.bundle.buggy_circuit)) !=
        std::string::npos);
  CHECK(p.bundle_id == fx.bundle.id);
  CHECK(p.config == PromptConfig::S);
}

TEST_CASE("every mutation record line appears verbatim") {
  const PromptFixture fx;
  const PromptBundle p = build_prompt(fx.bundle, PromptConfig::SDM, fx.baseline,
                                      &fx.records);
  for (const MutationRecord& record : fx.records) {
    CHECK(p.user_prompt.find(record_to_json_line(record)) != std::string::npos);
  }
}

TEST_CASE("missing ingredients are rejected") {
  const PromptFixture fx;
  CHECK_THROWS_AS(
      build_prompt(fx.bundle, PromptConfig::SM, fx.baseline, nullptr),
      PromptError);
  CHECK_THROWS_AS(build_prompt(fx.bundle, PromptConfig::SD, {}, nullptr),
                  PromptError);
  CHECK_THROWS_AS(
      build_prompt(fx.bundle, PromptConfig::S, fx.baseline, &fx.records),
      PromptError);
}

TEST_CASE("empty description renders as (not provided)") {
  PromptFixture fx;
  fx.bundle.bug_description.clear();
  const PromptBundle p =
      build_prompt(fx.bundle, PromptConfig::S, fx.baseline, nullptr);
  const std::size_t at = p.user_prompt.find(kSectionBugDescription);
  REQUIRE(at != std::string::npos);
  CHECK(p.user_prompt.find("(not provided)", at) != std::string::npos);
}

TEST_CASE("system prompt is a pure constant with the required content") {
  const std::string prompt = render_system_prompt();
  CHECK(prompt == render_system_prompt());
  for (const char* needle :
       {"Position", "Cause", "Change", "killed", "survived", "incompetent",
        "time_out", "FIXED_CODE", "EXPLANATION", "minimal"}) {
    CAPTURE(needle);
    CHECK(prompt.find(needle) != std::string::npos);
  }
}

TEST_CASE("well-formed responses round-trip") {
  const Explanation explanation{
      "The h on line 4 was written as x.",
      "An x gate prepares |1> instead of the superposition the Bell pair needs.",
      "Replace the x with h so the cx entangles a superposed control."};
  const std::string qasm = print_qasm(parse_qasm(testutil::kBellSource));
  const std::string raw = render_response(qasm, explanation);

  const ModelResponse parsed = parse_model_response(raw);
  CHECK(parsed.patched_circuit == parse_qasm(testutil::kBellSource));
  CHECK(parsed.explanation == explanation);
}

TEST_CASE("responses with surrounding chatter still parse") {
  const std::string raw =
      "Sure, here is the repair.\n\n" +
      render_response(print_qasm(parse_qasm(testutil::kBellSource)),
                      {"line 4", "wrong gate", "replace x with h"}) +
      "\nLet me know if anything else is needed.\n";
  const ModelResponse parsed = parse_model_response(raw);
  CHECK(parsed.explanation.position == "line 4");
  CHECK(parsed.explanation.change == "replace x with h");
}

TEST_CASE("multi-line explanation paragraphs are kept together") {
  const std::string raw = render_response(
      print_qasm(parse_qasm(testutil::kBellSource)),
      {"line 4,\nright at the start", "wrong gate", "swap it"});
  const ModelResponse parsed = parse_model_response(raw);
  CHECK(parsed.explanation.position == "line 4,\nright at the start");
}

TEST_CASE("malformed responses are rejected") {
  SUBCASE("no FIXED_CODE") {
    CHECK_THROWS_AS(parse_model_response("EXPLANATION:\nPosition: x\n"),
                    PromptError);
  }
  SUBCASE("no EXPLANATION") {
    CHECK_THROWS_AS(
        parse_model_response("FIXED_CODE:\n```qasm\nOPENQASM 2.0;\n```\n"),
        PromptError);
  }
  SUBCASE("missing a labeled paragraph") {
    CHECK_THROWS_AS(
        parse_model_response("FIXED_CODE:\n```qasm\nOPENQASM 2.0;\n```\n\n"
                             "EXPLANATION:\nPosition: a\nCause: b\n"),
        PromptError);
  }
  SUBCASE("unterminated fence") {
    CHECK_THROWS_AS(
        parse_model_response("FIXED_CODE:\n```qasm\nOPENQASM 2.0;\n"),
        PromptError);
  }
  SUBCASE("unknown gate inside the block propagates as QasmError") {
    const std::string raw = render_response(
        "OPENQASM 2.0;\nqreg q[1];\nwobble q[0];\n", {"a", "b", "c"});
    CHECK_THROWS_AS(parse_model_response(raw), QasmError);
  }
}
