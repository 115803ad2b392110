#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qapr/circuit.hpp"
#include "qapr/mutation.hpp"
#include "qapr/sim.hpp"

namespace qapr {

inline constexpr double kDefaultTvdThreshold = 0.05;
inline constexpr int kDefaultShots = 4096;
inline constexpr std::uint64_t kDefaultSeed = 12345;
inline constexpr int kDefaultTimeLimitMs = 10000;
inline constexpr double kStatevectorTolerance = 1e-6;

enum class OracleKind { statevector, distribution, expect_error };

std::string_view oracle_kind_name(OracleKind kind);

struct TestCase {
  std::string name;
  OracleKind oracle_kind = OracleKind::distribution;
  std::optional<Statevector> expected_state;                      // statevector
  std::optional<std::map<std::string, double>> expected_distribution;
  double tvd_threshold = kDefaultTvdThreshold;                    // distribution
  int shots = kDefaultShots;
  std::uint64_t seed = kDefaultSeed;
};

enum class Verdict { pass, fail, error, timeout };

std::string_view verdict_name(Verdict verdict);

struct TestOutcome {
  std::string name;
  Verdict verdict = Verdict::pass;
  std::string detail;  // nonempty unless verdict == pass

  bool operator==(const TestOutcome&) const = default;
};

enum class MutantStatus { killed, survived, incompetent, time_out };

std::string_view status_name(MutantStatus status);
MutantStatus status_from_name(std::string_view name);

/// One mutant's analysis result. The serialized field names line_number,
/// mutation_operator, exception_traceback and status are normative.
struct MutationRecord {
  std::string mutant_id;
  int line_number = 0;
  MutationOp mutation_operator = MutationOp::QGD;
  std::string exception_traceback;  // first non-pass detail; empty otherwise
  MutantStatus status = MutantStatus::survived;

  bool operator==(const MutationRecord&) const = default;
};

/// Monotonic milliseconds. Injectable so timeout classification is testable
/// without real waiting.
using ClockFn = std::function<std::int64_t()>;

std::int64_t steady_clock_ms();

/// Runs every test against the circuit.
///   statevector:  pass iff max-norm distance to the expected state, up to
///                 global phase, is at most 1e-6;
///   distribution: pass iff tvd(sampled, expected) <= tvd_threshold using the
///                 test's shots and seed;
///   expect_error: pass iff simulation raises SimError.
/// A SimError under any other oracle yields verdict=error; exceeding
/// time_limit_ms yields verdict=timeout. Failures never throw.
std::vector<TestOutcome> run_tests(const Circuit& circuit,
                                   const std::vector<TestCase>& tests,
                                   int time_limit_ms,
                                   const ClockFn& now_ms = {});

/// Status of a mutant relative to the buggy program's baseline:
/// incompetent when any mutant test errored; else time_out when any timed
/// out; else killed when any verdict differs from the baseline verdict of
/// the same test (a failing test turning passing counts); else survived.
MutantStatus classify_status(const std::vector<TestOutcome>& baseline,
                             const std::vector<TestOutcome>& mutant_outcomes);

enum class Symptom { WO, TE };

std::string_view symptom_name(Symptom symptom);

/// One benchmark subject: a buggy circuit, its reference fix, the tests both
/// are judged by, and the descriptive context fed into prompts.
struct BugBundle {
  std::string id;
  Circuit buggy_circuit;
  Circuit reference_fix;
  std::vector<TestCase> tests;
  std::string bug_description;    // may be empty
  std::string expected_behavior;  // may be empty
  Symptom symptom = Symptom::WO;
  std::string source_url;
};

/// Runs the buggy baseline once, evaluates every mutant, and emits one
/// record per mutant in enumeration order. Propagates
/// MutationError(no_mutants_generated).
std::vector<MutationRecord> analyze(const BugBundle& bundle, int time_limit_ms,
                                    const ClockFn& now_ms = {});

/// Line-delimited serialization embedded verbatim in prompts and written to
/// record files: one compact JSON object per record.
std::string record_to_json_line(const MutationRecord& record);
std::string serialize_records(std::span<const MutationRecord> records);
MutationRecord record_from_json_line(const std::string& line);

}  // namespace qapr
