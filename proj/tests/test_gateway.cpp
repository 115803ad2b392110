#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "qapr/gateway.hpp"
#include "test_util.hpp"

using namespace qapr;

namespace {

std::vector<BugBundle> one_bundle() { return {testutil::bell_wrong_gate_bundle()}; }

PromptBundle prompt_for(const BugBundle& bundle, PromptConfig config) {
  const auto baseline =
      run_tests(bundle.buggy_circuit, bundle.tests, kDefaultTimeLimitMs);
  return build_prompt(bundle, config, baseline, nullptr);
}

}  // namespace

TEST_CASE("perfect_oracle returns five identical responses that parse to the fix") {
  const auto bundles = one_bundle();
  const auto provider =
      make_provider(testutil::provider_spec(ProviderKind::perfect_oracle), bundles);
  const PromptBundle prompt = prompt_for(bundles[0], PromptConfig::S);

  const GenerationBatch batch = generate(prompt, 5, *provider);
  REQUIRE(batch.samples.size() == 5);
  for (const std::string& sample : batch.samples) {
    CHECK(sample == batch.samples[0]);
    const ModelResponse parsed = parse_model_response(sample);
    CHECK(parsed.patched_circuit == bundles[0].reference_fix);
    CHECK(!parsed.explanation.position.empty());
    CHECK(!parsed.explanation.cause.empty());
    CHECK(!parsed.explanation.change.empty());
  }
  CHECK(batch.provider_fingerprint == "perfect_oracle/v1");
  CHECK(batch.timestamps_ms == std::vector<std::int64_t>(5, 0));
}

TEST_CASE("noop returns the buggy program, which keeps failing its tests") {
  const auto bundles = one_bundle();
  const auto provider = make_provider(testutil::provider_spec(ProviderKind::noop), bundles);
  const PromptBundle prompt = prompt_for(bundles[0], PromptConfig::S);

  const GenerationBatch batch = generate(prompt, 2, *provider);
  const ModelResponse parsed = parse_model_response(batch.samples[0]);
  CHECK(parsed.patched_circuit == bundles[0].buggy_circuit);

  const auto outcomes =
      run_tests(parsed.patched_circuit, bundles[0].tests, kDefaultTimeLimitMs);
  bool any_failure = false;
  for (const auto& outcome : outcomes) {
    any_failure = any_failure || outcome.verdict != Verdict::pass;
  }
  CHECK(any_failure);
}

TEST_CASE("record then replay reproduces the exact samples") {
  const auto bundles = one_bundle();
  const auto oracle =
      make_provider(testutil::provider_spec(ProviderKind::perfect_oracle), bundles);
  const PromptBundle prompt = prompt_for(bundles[0], PromptConfig::SD);
  const GenerationBatch batch = generate(prompt, 3, *oracle);

  const auto store = testutil::scratch_dir("replay");
  record_replay(batch, store);

  ProviderSpec spec;
  spec.kind = ProviderKind::replay;
  spec.replay_path = store;
  const auto replay = make_provider(spec, {});
  const GenerationBatch replayed = generate(prompt, 3, *replay);
  CHECK(replayed.samples == batch.samples);

  SUBCASE("re-recording the same key is a duplicate") {
    try {
      record_replay(batch, store);
      FAIL("expected DuplicateKey");
    } catch (const GatewayError& e) {
      CHECK(e.kind() == GatewayError::Kind::duplicate_key);
    }
  }
  SUBCASE("a missing key is a loud replay miss") {
    const PromptBundle other = prompt_for(bundles[0], PromptConfig::S);
    try {
      generate(other, 1, *replay);
      FAIL("expected ReplayMiss");
    } catch (const GatewayError& e) {
      CHECK(e.kind() == GatewayError::Kind::replay_miss);
    }
  }
  SUBCASE("asking for more samples than recorded misses too") {
    try {
      generate(prompt, 4, *replay);
      FAIL("expected ReplayMiss");
    } catch (const GatewayError& e) {
      CHECK(e.kind() == GatewayError::Kind::replay_miss);
    }
  }
}

TEST_CASE("replay store layout is the documented directory scheme") {
  const auto bundles = one_bundle();
  const auto oracle =
      make_provider(testutil::provider_spec(ProviderKind::perfect_oracle), bundles);
  const PromptBundle prompt = prompt_for(bundles[0], PromptConfig::S);
  const auto store = testutil::scratch_dir("layout");
  record_replay(generate(prompt, 2, *oracle), store);
  CHECK(std::filesystem::exists(store / "bell-wrong-gate" / "S" / "0.txt"));
  CHECK(std::filesystem::exists(store / "bell-wrong-gate" / "S" / "1.txt"));
}

TEST_CASE("live_http without a credential is an auth failure") {
  unsetenv(kApiKeyEnvVar);
  ProviderSpec spec;
  spec.kind = ProviderKind::live_http;
  spec.endpoint = "http://127.0.0.1:1";
  spec.model_name = "test-model";
  try {
    make_provider(spec, {});
    FAIL("expected AuthMissing");
  } catch (const GatewayError& e) {
    CHECK(e.kind() == GatewayError::Kind::auth_missing);
  }
}

TEST_CASE("live_http speaks the chat-completion wire format") {
  // Serve an OpenAI-compatible endpoint on a loopback port and check both
  // sides of the exchange.
  const auto bundles = one_bundle();
  const std::string canned =
      render_response(print_qasm(bundles[0].reference_fix),
                      {"line 4", "wrong gate", "replace x with h"});

  httplib::Server server;
  nlohmann::json seen_request;
  server.Post("/v1/chat/completions",
              [&](const httplib::Request& req, httplib::Response& res) {
                seen_request = nlohmann::json::parse(req.body);
                nlohmann::json reply;
                reply["choices"] = nlohmann::json::array(
                    {{{"message", {{"role", "assistant"}, {"content", canned}}}}});
                res.set_content(reply.dump(), "application/json");
              });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread server_thread([&server] { server.listen_after_bind(); });
  server.wait_until_ready();

  setenv(kApiKeyEnvVar, "test-key", 1);
  ProviderSpec spec;
  spec.kind = ProviderKind::live_http;
  spec.endpoint = "http://127.0.0.1:" + std::to_string(port);
  spec.model_name = "test-model";
  const auto provider = make_provider(spec, {});

  const PromptBundle prompt = prompt_for(bundles[0], PromptConfig::S);
  const GenerationBatch batch = generate(prompt, 2, *provider);

  server.stop();
  server_thread.join();
  unsetenv(kApiKeyEnvVar);

  REQUIRE(batch.samples.size() == 2);
  CHECK(batch.samples[0] == canned);
  CHECK(batch.provider_fingerprint == "live_http/test-model");
  CHECK(seen_request["model"] == "test-model");
  REQUIRE(seen_request["messages"].size() == 2);
  CHECK(seen_request["messages"][0]["role"] == "system");
  CHECK(seen_request["messages"][0]["content"] == prompt.system_prompt);
  CHECK(seen_request["messages"][1]["role"] == "user");
  CHECK(seen_request["messages"][1]["content"] == prompt.user_prompt);
}

TEST_CASE("provider specs are validated") {
  CHECK_THROWS_AS(make_provider(testutil::provider_spec(ProviderKind::replay), {}), GatewayError);
  ProviderSpec spec;
  spec.kind = ProviderKind::live_http;
  spec.endpoint = "";
  spec.model_name = "m";
  CHECK_THROWS_AS(make_provider(spec, {}), GatewayError);
  CHECK_THROWS_AS(generate(PromptBundle{}, 0,
                           *make_provider(testutil::provider_spec(ProviderKind::noop), {})),
                  std::invalid_argument);
}
