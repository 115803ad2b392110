#include "qapr/bundle_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qapr {

namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw BundleError(BundleError::Kind::missing_file,
                      "cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

nlohmann::json parse_json_file(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw BundleError(BundleError::Kind::bad_format,
                      path.string() + ": " + e.what());
  }
}

TestCase parse_test_case(const nlohmann::json& j, const fs::path& origin,
                         const BundleLoadOptions& options) {
  TestCase test;
  test.shots = options.default_shots;
  test.seed = options.default_seed;
  test.tvd_threshold = options.default_tvd_threshold;
  try {
    test.name = j.at("name").get<std::string>();
    const std::string oracle = j.at("oracle").get<std::string>();
    if (j.contains("shots")) test.shots = j["shots"].get<int>();
    if (j.contains("seed")) test.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("tvd_threshold")) {
      test.tvd_threshold = j["tvd_threshold"].get<double>();
    }
    if (oracle == "distribution") {
      test.oracle_kind = OracleKind::distribution;
      std::map<std::string, double> dist;
      double total = 0;
      for (const auto& [key, value] : j.at("expected_distribution").items()) {
        dist[key] = value.get<double>();
        total += dist[key];
      }
      if (std::abs(total - 1.0) > 1e-6) {
        throw BundleError(BundleError::Kind::bad_format,
                          origin.string() + ": expected_distribution of '" +
                              test.name + "' sums to " + std::to_string(total));
      }
      test.expected_distribution = std::move(dist);
    } else if (oracle == "statevector") {
      test.oracle_kind = OracleKind::statevector;
      Statevector state;
      for (const auto& pair : j.at("expected_state")) {
        state.amplitudes.emplace_back(pair.at(0).get<double>(),
                                      pair.at(1).get<double>());
      }
      const std::size_t size = state.amplitudes.size();
      if (size == 0 || (size & (size - 1)) != 0) {
        throw BundleError(BundleError::Kind::bad_format,
                          origin.string() + ": expected_state of '" + test.name +
                              "' must have power-of-two length");
      }
      state.num_qubits = 0;
      while ((std::size_t{1} << state.num_qubits) < size) ++state.num_qubits;
      test.expected_state = std::move(state);
    } else if (oracle == "expect_error") {
      test.oracle_kind = OracleKind::expect_error;
    } else {
      throw BundleError(BundleError::Kind::bad_format,
                        origin.string() + ": unknown oracle kind '" + oracle +
                            "' in test '" + test.name + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw BundleError(BundleError::Kind::bad_format,
                      origin.string() + ": " + e.what());
  }
  if (test.shots <= 0) {
    throw BundleError(BundleError::Kind::bad_format,
                      origin.string() + ": shots must be positive in test '" +
                          test.name + "'");
  }
  if (test.tvd_threshold <= 0 || test.tvd_threshold > 1) {
    throw BundleError(BundleError::Kind::bad_format,
                      origin.string() + ": tvd_threshold must lie in (0,1] in '" +
                          test.name + "'");
  }
  return test;
}

}  // namespace

BugBundle load_bundle(const fs::path& dir, const BundleLoadOptions& options) {
  BugBundle bundle;
  bundle.id = dir.filename().string();
  if (bundle.id.empty()) bundle.id = dir.parent_path().filename().string();

  try {
    bundle.buggy_circuit = parse_qasm(read_file(dir / "buggy.qasm"));
  } catch (const QasmError& e) {
    throw BundleError(BundleError::Kind::bad_format,
                      (dir / "buggy.qasm").string() + ": " + e.what());
  }
  try {
    bundle.reference_fix = parse_qasm(read_file(dir / "fixed.qasm"));
  } catch (const QasmError& e) {
    throw BundleError(BundleError::Kind::bad_format,
                      (dir / "fixed.qasm").string() + ": " + e.what());
  }

  const fs::path meta_path = dir / "meta.json";
  const nlohmann::json meta = parse_json_file(meta_path);
  try {
    bundle.bug_description = meta.value("description", "");
    bundle.expected_behavior = meta.value("expected_behavior", "");
    bundle.source_url = meta.value("source_url", "");
    const std::string symptom = meta.at("symptom").get<std::string>();
    if (symptom == "WO") {
      bundle.symptom = Symptom::WO;
    } else if (symptom == "TE") {
      bundle.symptom = Symptom::TE;
    } else {
      throw BundleError(BundleError::Kind::bad_format,
                        meta_path.string() + ": symptom must be WO or TE, got '" +
                            symptom + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw BundleError(BundleError::Kind::bad_format,
                      meta_path.string() + ": " + e.what());
  }

  const fs::path tests_path = dir / "tests.json";
  const nlohmann::json tests = parse_json_file(tests_path);
  if (!tests.contains("tests") || !tests["tests"].is_array() ||
      tests["tests"].empty()) {
    throw BundleError(BundleError::Kind::bad_format,
                      tests_path.string() + ": no tests defined");
  }
  for (const auto& t : tests["tests"]) {
    bundle.tests.push_back(parse_test_case(t, tests_path, options));
  }
  return bundle;
}

std::vector<BugBundle> load_bundle_set(const fs::path& root,
                                       const BundleLoadOptions& options) {
  if (fs::exists(root / "buggy.qasm")) {
    return {load_bundle(root, options)};
  }
  std::vector<fs::path> dirs;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(root, ec)) {
    if (entry.is_directory() && fs::exists(entry.path() / "buggy.qasm")) {
      dirs.push_back(entry.path());
    }
  }
  if (ec) {
    throw BundleError(BundleError::Kind::missing_file,
                      "cannot list " + root.string() + ": " + ec.message());
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) {
    throw BundleError(BundleError::Kind::missing_file,
                      "no bundle directories under " + root.string());
  }
  std::vector<BugBundle> bundles;
  bundles.reserve(dirs.size());
  for (const fs::path& dir : dirs) bundles.push_back(load_bundle(dir, options));
  return bundles;
}

void validate_bundle(const BugBundle& bundle, int time_limit_ms) {
  const std::vector<TestOutcome> fix_outcomes =
      run_tests(bundle.reference_fix, bundle.tests, time_limit_ms);
  for (const TestOutcome& outcome : fix_outcomes) {
    if (outcome.verdict != Verdict::pass) {
      throw BundleError(BundleError::Kind::invariant_violation,
                        "bundle '" + bundle.id + "': reference fix fails test '" +
                            outcome.name + "': " + outcome.detail);
    }
  }
  const std::vector<TestOutcome> baseline =
      run_tests(bundle.buggy_circuit, bundle.tests, time_limit_ms);
  bool any_bad = false;
  bool any_error = false;
  for (const TestOutcome& outcome : baseline) {
    any_bad = any_bad || outcome.verdict != Verdict::pass;
    any_error = any_error || outcome.verdict == Verdict::error;
  }
  if (!any_bad) {
    throw BundleError(BundleError::Kind::invariant_violation,
                      "bundle '" + bundle.id + "': buggy circuit passes every test");
  }
  const Symptom expected = any_error ? Symptom::TE : Symptom::WO;
  if (bundle.symptom != expected) {
    throw BundleError(BundleError::Kind::invariant_violation,
                      "bundle '" + bundle.id + "': declared symptom " +
                          std::string(symptom_name(bundle.symptom)) +
                          " does not match the observed baseline (" +
                          std::string(symptom_name(expected)) + ")");
  }
}

}  // namespace qapr
