#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qapr/gateway.hpp"
#include "qapr/harness.hpp"
#include "qapr/rng.hpp"

namespace testutil {

inline constexpr const char* kBellSource =
    "OPENQASM 2.0;\n"
    "qreg q[2];\n"
    "creg c[2];\n"
    "h q[0];\n"
    "cx q[0],q[1];\n"
    "measure q[0] -> c[0];\n"
    "measure q[1] -> c[1];\n";

inline constexpr const char* kBellWrongGateSource =
    "OPENQASM 2.0;\n"
    "qreg q[2];\n"
    "creg c[2];\n"
    "x q[0];\n"
    "cx q[0],q[1];\n"
    "measure q[0] -> c[0];\n"
    "measure q[1] -> c[1];\n";

inline qapr::TestCase bell_distribution_test(std::uint64_t seed = 7) {
  qapr::TestCase test;
  test.name = "bell_counts";
  test.oracle_kind = qapr::OracleKind::distribution;
  test.expected_distribution = std::map<std::string, double>{{"00", 0.5},
                                                             {"11", 0.5}};
  test.tvd_threshold = 0.05;
  test.shots = 4096;
  test.seed = seed;
  return test;
}

// Bell circuit whose h was written as x; the QGR mutant L4-QGR-h restores it.
inline qapr::BugBundle bell_wrong_gate_bundle() {
  qapr::BugBundle bundle;
  bundle.id = "bell-wrong-gate";
  bundle.buggy_circuit = qapr::parse_qasm(kBellWrongGateSource);
  bundle.reference_fix = qapr::parse_qasm(kBellSource);
  bundle.tests = {bell_distribution_test()};
  bundle.bug_description = "Counts are always 11 instead of a mix of 00 and 11.";
  bundle.expected_behavior = "Measuring both qubits gives 00 and 11 equally often.";
  bundle.symptom = qapr::Symptom::WO;
  bundle.source_url = "local://test/bell-wrong-gate";
  return bundle;
}

// Seeded random circuit over the full catalog; operands are distinct and
// parameters uniform in [-2*pi, 2*pi].
inline qapr::Circuit random_circuit(qapr::Xoshiro256StarStar& rng, int num_qubits,
                                    int num_gates, bool with_measures) {
  qapr::Circuit circuit;
  circuit.qregs = {{"q", num_qubits}};
  if (with_measures) circuit.cregs = {{"c", num_qubits}};

  std::vector<const qapr::GateCatalogEntry*> usable;
  for (const auto& entry : qapr::gate_catalog()) {
    if (entry.qubit_arity <= num_qubits) usable.push_back(&entry);
  }
  for (int g = 0; g < num_gates; ++g) {
    const auto* entry = usable[rng.next() % usable.size()];
    std::vector<int> picks;
    while (static_cast<int>(picks.size()) < entry->qubit_arity) {
      const int q = static_cast<int>(rng.next() % static_cast<std::uint64_t>(num_qubits));
      bool duplicate = false;
      for (const int p : picks) duplicate = duplicate || p == q;
      if (!duplicate) picks.push_back(q);
    }
    std::vector<qapr::BitRef> qubits;
    for (const int q : picks) qubits.push_back({"q", q});
    std::vector<double> params;
    for (int p = 0; p < entry->param_arity; ++p) {
      params.push_back((rng.next_double() * 2 - 1) * 6.283185307179586);
    }
    circuit.instructions.push_back(
        qapr::make_gate(std::string(entry->name), params, qubits));
  }
  if (with_measures) {
    for (int q = 0; q < num_qubits; ++q) {
      circuit.instructions.push_back(qapr::make_measure({"q", q}, {"c", q}));
    }
  }
  qapr::renumber(circuit);
  // Normalize parameters to their canonical 12-digit form, like every
  // circuit that enters the pipeline from a file does.
  return qapr::parse_qasm(qapr::print_qasm(circuit));
}

inline qapr::ProviderSpec provider_spec(qapr::ProviderKind kind) {
  qapr::ProviderSpec spec;
  spec.kind = kind;
  return spec;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& label) {
  static int counter = 0;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("qapr-test-" + label + "-" + std::to_string(++counter));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
