#include "qapr/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace qapr {

namespace {

namespace fs = std::filesystem;

std::int64_t wall_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string replay_key(const std::string& bundle_id, PromptConfig config,
                       int sample_index) {
  return "(" + bundle_id + ", " + std::string(config_tag(config)) + ", " +
         std::to_string(sample_index) + ")";
}

fs::path replay_file(const fs::path& root, const std::string& bundle_id,
                     PromptConfig config, int sample_index) {
  return root / bundle_id / std::string(config_tag(config)) /
         (std::to_string(sample_index) + ".txt");
}

class PerfectOracleProvider final : public Provider {
 public:
  explicit PerfectOracleProvider(std::span<const BugBundle> bundles) {
    for (const BugBundle& bundle : bundles) {
      fixes_[bundle.id] = print_qasm(bundle.reference_fix);
    }
  }

  std::string sample(const PromptBundle& prompt, int) override {
    const auto it = fixes_.find(prompt.bundle_id);
    if (it == fixes_.end()) {
      throw GatewayError(GatewayError::Kind::provider_unavailable,
                         "perfect_oracle knows no bundle '" + prompt.bundle_id +
                             "'");
    }
    return render_response(
        it->second,
        {"The repair targets the lines where the buggy program deviates from "
         "the reference solution.",
         "The buggy program does not implement the intended behavior.",
         "The program is replaced with the reference solution, which passes "
         "the full test suite."});
  }

  std::string fingerprint() const override { return "perfect_oracle/v1"; }

 private:
  std::map<std::string, std::string> fixes_;
};

class NoopProvider final : public Provider {
 public:
  explicit NoopProvider(std::span<const BugBundle> bundles) {
    for (const BugBundle& bundle : bundles) {
      sources_[bundle.id] = print_qasm(bundle.buggy_circuit);
    }
  }

  std::string sample(const PromptBundle& prompt, int) override {
    const auto it = sources_.find(prompt.bundle_id);
    if (it == sources_.end()) {
      throw GatewayError(GatewayError::Kind::provider_unavailable,
                         "noop provider knows no bundle '" + prompt.bundle_id +
                             "'");
    }
    return render_response(it->second,
                           {"No defect location was identified.",
                            "No cause was identified.",
                            "The program is returned unchanged."});
  }

  std::string fingerprint() const override { return "noop/v1"; }

 private:
  std::map<std::string, std::string> sources_;
};

class ReplayProvider final : public Provider {
 public:
  explicit ReplayProvider(fs::path root) : root_(std::move(root)) {}

  std::string sample(const PromptBundle& prompt, int sample_index) override {
    const fs::path file =
        replay_file(root_, prompt.bundle_id, prompt.config, sample_index);
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      throw GatewayError(
          GatewayError::Kind::replay_miss,
          "no recorded response for " +
              replay_key(prompt.bundle_id, prompt.config, sample_index) +
              " under " + root_.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  }

  std::string fingerprint() const override { return "replay/v1"; }

 private:
  fs::path root_;
};

class LiveHttpProvider final : public Provider {
 public:
  LiveHttpProvider(std::string endpoint, std::string model)
      : model_(std::move(model)) {
    const char* key = std::getenv(kApiKeyEnvVar);
    if (key == nullptr || *key == '\0') {
      throw GatewayError(GatewayError::Kind::auth_missing,
                         std::string("live_http provider needs a credential in ") +
                             kApiKeyEnvVar);
    }
    api_key_ = key;
    split_endpoint(endpoint);
  }

  std::string sample(const PromptBundle& prompt, int) override {
    nlohmann::json body;
    body["model"] = model_;
    body["messages"] = nlohmann::json::array(
        {{{"role", "system"}, {"content", prompt.system_prompt}},
         {{"role", "user"}, {"content", prompt.user_prompt}}});
    const std::string payload = body.dump();

    const httplib::Headers headers = {
        {"Authorization", "Bearer " + api_key_},
    };

    std::string last_error;
    for (int attempt = 0; attempt < 4; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(250LL << (attempt - 1)));
      }
      httplib::Client client(base_);
      client.set_connection_timeout(15, 0);
      client.set_read_timeout(180, 0);
      auto result = client.Post(path_, headers, payload, "application/json");
      if (!result) {
        last_error = "connection failure: " + httplib::to_string(result.error());
        continue;
      }
      if (result->status == 429 || result->status >= 500) {
        last_error = "transient HTTP status " + std::to_string(result->status);
        continue;
      }
      if (result->status != 200) {
        throw GatewayError(GatewayError::Kind::provider_unavailable,
                           "HTTP status " + std::to_string(result->status) +
                               " from " + base_ + path_ + ": " + result->body);
      }
      return extract_content(result->body);
    }
    throw GatewayError(GatewayError::Kind::provider_unavailable,
                       "giving up after retries: " + last_error);
  }

  std::string fingerprint() const override { return "live_http/" + model_; }
  bool is_deterministic() const override { return false; }

 private:
  static std::string extract_content(const std::string& body) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error&) {
      throw GatewayError(GatewayError::Kind::provider_unavailable,
                         "provider returned a non-JSON completion body");
    }
    if (!j.contains("choices") || !j["choices"].is_array() ||
        j["choices"].empty()) {
      throw GatewayError(GatewayError::Kind::provider_unavailable,
                         "completion body has no choices");
    }
    const auto& message = j["choices"][0]["message"];
    if (!message.contains("content") || !message["content"].is_string()) {
      throw GatewayError(GatewayError::Kind::provider_unavailable,
                         "completion choice has no message content");
    }
    return message["content"].get<std::string>();
  }

  // Splits "scheme://host[:port][/path]" into a client base and request path.
  // Without an explicit path the OpenAI-compatible default is used.
  void split_endpoint(const std::string& endpoint) {
    const std::size_t scheme = endpoint.find("://");
    const std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
    const std::size_t slash = endpoint.find('/', host_start);
    if (slash == std::string::npos) {
      base_ = endpoint;
      path_ = "/v1/chat/completions";
    } else {
      base_ = endpoint.substr(0, slash);
      path_ = endpoint.substr(slash);
    }
  }

  std::string model_;
  std::string api_key_;
  std::string base_;
  std::string path_;
};

}  // namespace

std::string_view provider_kind_name(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::live_http: return "live_http";
    case ProviderKind::replay: return "replay";
    case ProviderKind::perfect_oracle: return "perfect_oracle";
    case ProviderKind::noop: return "noop";
  }
  return "?";
}

ProviderKind provider_kind_from_name(std::string_view name) {
  for (const ProviderKind kind :
       {ProviderKind::live_http, ProviderKind::replay, ProviderKind::perfect_oracle,
        ProviderKind::noop}) {
    if (provider_kind_name(kind) == name) return kind;
  }
  throw GatewayError(GatewayError::Kind::provider_unavailable,
                     "unknown provider kind '" + std::string(name) + "'");
}

std::unique_ptr<Provider> make_provider(const ProviderSpec& spec,
                                        std::span<const BugBundle> bundles) {
  switch (spec.kind) {
    case ProviderKind::live_http:
      if (spec.endpoint.empty() || spec.model_name.empty()) {
        throw GatewayError(GatewayError::Kind::provider_unavailable,
                           "live_http requires an endpoint and a model name");
      }
      return std::make_unique<LiveHttpProvider>(spec.endpoint, spec.model_name);
    case ProviderKind::replay:
      if (spec.replay_path.empty()) {
        throw GatewayError(GatewayError::Kind::provider_unavailable,
                           "replay requires a store path");
      }
      return std::make_unique<ReplayProvider>(spec.replay_path);
    case ProviderKind::perfect_oracle:
      return std::make_unique<PerfectOracleProvider>(bundles);
    case ProviderKind::noop:
      return std::make_unique<NoopProvider>(bundles);
  }
  throw GatewayError(GatewayError::Kind::provider_unavailable,
                     "unhandled provider kind");
}

GenerationBatch generate(const PromptBundle& prompt, int n_samples,
                         Provider& provider) {
  if (n_samples <= 0) {
    throw std::invalid_argument("n_samples must be positive");
  }
  GenerationBatch batch;
  batch.prompt = prompt;
  batch.provider_fingerprint = provider.fingerprint();
  batch.samples.reserve(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    batch.samples.push_back(provider.sample(prompt, i));
    batch.timestamps_ms.push_back(provider.is_deterministic() ? 0
                                                              : wall_clock_ms());
  }
  return batch;
}

void record_replay(const GenerationBatch& batch, const fs::path& replay_root) {
  for (std::size_t i = 0; i < batch.samples.size(); ++i) {
    const fs::path file = replay_file(replay_root, batch.prompt.bundle_id,
                                      batch.prompt.config, static_cast<int>(i));
    std::error_code ec;
    fs::create_directories(file.parent_path(), ec);
    if (ec) {
      throw GatewayError(GatewayError::Kind::io_failure,
                         "cannot create " + file.parent_path().string() + ": " +
                             ec.message());
    }
    if (fs::exists(file)) {
      throw GatewayError(GatewayError::Kind::duplicate_key,
                         "replay entry already recorded for " +
                             replay_key(batch.prompt.bundle_id,
                                        batch.prompt.config,
                                        static_cast<int>(i)));
    }
    std::ofstream out(file, std::ios::binary);
    out << batch.samples[i];
    if (!out) {
      throw GatewayError(GatewayError::Kind::io_failure,
                         "failed writing " + file.string());
    }
  }
}

}  // namespace qapr
