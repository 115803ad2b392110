#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qapr/prompt.hpp"

namespace qapr {

/// Environment variable holding the live provider credential. Credentials
/// never come from bundle files.
inline constexpr const char* kApiKeyEnvVar = "APR_LLM_API_KEY";

enum class ProviderKind { live_http, replay, perfect_oracle, noop };

std::string_view provider_kind_name(ProviderKind kind);
ProviderKind provider_kind_from_name(std::string_view name);

struct ProviderSpec {
  ProviderKind kind = ProviderKind::noop;
  std::string endpoint;                // live_http: base URL or full URL
  std::string model_name;              // live_http
  std::filesystem::path replay_path;   // replay: store root directory
};

struct GenerationBatch {
  PromptBundle prompt;
  std::vector<std::string> samples;
  std::string provider_fingerprint;
  std::vector<std::int64_t> timestamps_ms;  // zeros for deterministic providers
};

class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string sample(const PromptBundle& prompt, int sample_index) = 0;
  virtual std::string fingerprint() const = 0;
  virtual bool is_deterministic() const { return true; }
};

/// Builds a provider from a spec. perfect_oracle and noop need the bundle
/// set to look up reference fixes and buggy sources by bundle id.
std::unique_ptr<Provider> make_provider(const ProviderSpec& spec,
                                        std::span<const BugBundle> bundles);

/// Obtains n_samples raw responses for one prompt. The replay provider fails
/// loudly on a missing key (GatewayError::replay_miss); the live provider
/// issues one HTTP request per sample.
GenerationBatch generate(const PromptBundle& prompt, int n_samples,
                         Provider& provider);

/// Appends a batch to the on-disk replay store:
///   <root>/<bundle_id>/<config tag>/<sample_index>.txt
/// Re-recording an existing key raises GatewayError(duplicate_key).
void record_replay(const GenerationBatch& batch,
                   const std::filesystem::path& replay_root);

}  // namespace qapr
