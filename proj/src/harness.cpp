#include "qapr/harness.hpp"

#include <chrono>
#include <cstdio>

#include <json.hpp>

namespace qapr {

namespace {

std::string format_double(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

}  // namespace

std::string_view oracle_kind_name(OracleKind kind) {
  switch (kind) {
    case OracleKind::statevector: return "statevector";
    case OracleKind::distribution: return "distribution";
    case OracleKind::expect_error: return "expect_error";
  }
  return "?";
}

std::string_view verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::error: return "error";
    case Verdict::timeout: return "timeout";
  }
  return "?";
}

std::string_view status_name(MutantStatus status) {
  switch (status) {
    case MutantStatus::killed: return "killed";
    case MutantStatus::survived: return "survived";
    case MutantStatus::incompetent: return "incompetent";
    case MutantStatus::time_out: return "time_out";
  }
  return "?";
}

MutantStatus status_from_name(std::string_view name) {
  for (const MutantStatus s : {MutantStatus::killed, MutantStatus::survived,
                               MutantStatus::incompetent, MutantStatus::time_out}) {
    if (status_name(s) == name) return s;
  }
  throw HarnessError(HarnessError::Kind::bad_test_case,
                     "unknown mutant status '" + std::string(name) + "'");
}

std::string_view symptom_name(Symptom symptom) {
  return symptom == Symptom::WO ? "WO" : "TE";
}

std::int64_t steady_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::vector<TestOutcome> run_tests(const Circuit& circuit,
                                   const std::vector<TestCase>& tests,
                                   int time_limit_ms, const ClockFn& now_ms) {
  if (tests.empty()) {
    throw HarnessError(HarnessError::Kind::empty_test_set,
                       "run_tests requires at least one test case");
  }
  const ClockFn clock = now_ms ? now_ms : ClockFn(steady_clock_ms);

  std::vector<TestOutcome> outcomes;
  outcomes.reserve(tests.size());
  for (const TestCase& test : tests) {
    const std::int64_t started = clock();
    Verdict verdict = Verdict::pass;
    std::string detail;
    try {
      switch (test.oracle_kind) {
        case OracleKind::statevector: {
          if (!test.expected_state) {
            throw HarnessError(HarnessError::Kind::bad_test_case,
                               "statevector oracle '" + test.name +
                                   "' has no expected_state");
          }
          const Statevector state = evolve(circuit);
          const double dist = phase_aligned_distance(state, *test.expected_state);
          if (dist > kStatevectorTolerance) {
            verdict = Verdict::fail;
            detail = "max amplitude deviation " + format_double("%.6e", dist) +
                     " exceeds tolerance 1.0e-06";
          }
          break;
        }
        case OracleKind::distribution: {
          if (!test.expected_distribution) {
            throw HarnessError(HarnessError::Kind::bad_test_case,
                               "distribution oracle '" + test.name +
                                   "' has no expected_distribution");
          }
          const CountsDistribution counts = sample(circuit, test.shots, test.seed);
          const double distance =
              tvd(to_probabilities(counts), *test.expected_distribution);
          if (distance > test.tvd_threshold) {
            verdict = Verdict::fail;
            detail = "total variation distance " +
                     format_double("%.6f", distance) + " exceeds threshold " +
                     format_double("%.6f", test.tvd_threshold);
          }
          break;
        }
        case OracleKind::expect_error: {
          evolve(circuit);
          verdict = Verdict::fail;
          detail = "expected a simulation error but the circuit ran to completion";
          break;
        }
      }
    } catch (const SimError& e) {
      if (test.oracle_kind == OracleKind::expect_error) {
        verdict = Verdict::pass;
        detail.clear();
      } else {
        verdict = Verdict::error;
        detail = e.what();
      }
    }
    const std::int64_t elapsed = clock() - started;
    if (elapsed > time_limit_ms) {
      verdict = Verdict::timeout;
      // The measured duration stays out of the detail text so that reports
      // remain byte-identical across runs.
      detail = "execution exceeded the time limit of " +
               std::to_string(time_limit_ms) + " ms";
    }
    if (verdict == Verdict::pass) detail.clear();
    outcomes.push_back({test.name, verdict, std::move(detail)});
  }
  return outcomes;
}

MutantStatus classify_status(const std::vector<TestOutcome>& baseline,
                             const std::vector<TestOutcome>& mutant_outcomes) {
  if (baseline.size() != mutant_outcomes.size()) {
    throw HarnessError(HarnessError::Kind::mismatched_test_sets,
                       "baseline and mutant outcome lists differ in length");
  }
  for (std::size_t i = 0; i < baseline.size(); ++i) {
    if (baseline[i].name != mutant_outcomes[i].name) {
      throw HarnessError(HarnessError::Kind::mismatched_test_sets,
                         "test name mismatch at position " + std::to_string(i) +
                             ": '" + baseline[i].name + "' vs '" +
                             mutant_outcomes[i].name + "'");
    }
  }
  for (const TestOutcome& outcome : mutant_outcomes) {
    if (outcome.verdict == Verdict::error) return MutantStatus::incompetent;
  }
  for (const TestOutcome& outcome : mutant_outcomes) {
    if (outcome.verdict == Verdict::timeout) return MutantStatus::time_out;
  }
  for (std::size_t i = 0; i < baseline.size(); ++i) {
    if (baseline[i].verdict != mutant_outcomes[i].verdict) {
      return MutantStatus::killed;
    }
  }
  return MutantStatus::survived;
}

std::vector<MutationRecord> analyze(const BugBundle& bundle, int time_limit_ms,
                                    const ClockFn& now_ms) {
  const std::vector<TestOutcome> baseline =
      run_tests(bundle.buggy_circuit, bundle.tests, time_limit_ms, now_ms);
  const std::vector<Mutant> mutants = enumerate_mutants(bundle.buggy_circuit);

  std::vector<MutationRecord> records;
  records.reserve(mutants.size());
  for (const Mutant& mutant : mutants) {
    const std::vector<TestOutcome> outcomes =
        run_tests(mutant.circuit, bundle.tests, time_limit_ms, now_ms);
    MutationRecord record;
    record.mutant_id = mutant.id;
    record.line_number = mutant.line_number;
    record.mutation_operator = mutant.op;
    for (const TestOutcome& outcome : outcomes) {
      if (outcome.verdict != Verdict::pass) {
        record.exception_traceback = outcome.detail;
        break;
      }
    }
    record.status = classify_status(baseline, outcomes);
    records.push_back(std::move(record));
  }
  return records;
}

std::string record_to_json_line(const MutationRecord& record) {
  nlohmann::ordered_json j;
  j["mutant_id"] = record.mutant_id;
  j["line_number"] = record.line_number;
  j["mutation_operator"] = std::string(mutation_op_name(record.mutation_operator));
  j["exception_traceback"] = record.exception_traceback;
  j["status"] = std::string(status_name(record.status));
  return j.dump();
}

std::string serialize_records(std::span<const MutationRecord> records) {
  std::string out;
  for (const MutationRecord& record : records) {
    out += record_to_json_line(record);
    out += '\n';
  }
  return out;
}

MutationRecord record_from_json_line(const std::string& line) {
  const nlohmann::json j = nlohmann::json::parse(line);
  MutationRecord record;
  record.mutant_id = j.at("mutant_id").get<std::string>();
  record.line_number = j.at("line_number").get<int>();
  record.mutation_operator =
      mutation_op_from_name(j.at("mutation_operator").get<std::string>());
  record.exception_traceback = j.at("exception_traceback").get<std::string>();
  record.status = status_from_name(j.at("status").get<std::string>());
  return record;
}

}  // namespace qapr
