#include <doctest.h>

#include <fstream>
#include <sstream>

#include "qapr/harness.hpp"
#include "test_util.hpp"

using namespace qapr;

namespace {

TestOutcome outcome(const char* name, Verdict verdict) {
  return {name, verdict, verdict == Verdict::pass ? "" : "detail"};
}

std::vector<TestOutcome> outcomes(Verdict a, Verdict b) {
  return {outcome("t1", a), outcome("t2", b)};
}

}  // namespace

TEST_CASE("distribution oracle passes the correct bell circuit") {
  const Circuit bell = parse_qasm(testutil::kBellSource);
  const auto results = run_tests(bell, {testutil::bell_distribution_test()},
                                 kDefaultTimeLimitMs);
  REQUIRE(results.size() == 1);
  CHECK(results[0].verdict == Verdict::pass);
  CHECK(results[0].detail.empty());
}

TEST_CASE("distribution oracle fails an h-only circuit with tvd near 0.5") {
  const Circuit broken = parse_qasm(
      "OPENQASM 2.0;\nqreg q[2];\ncreg c[2];\nh q[0];\n"
      "measure q[0] -> c[0];\nmeasure q[1] -> c[1];\n");
  const auto results = run_tests(broken, {testutil::bell_distribution_test()},
                                 kDefaultTimeLimitMs);
  REQUIRE(results.size() == 1);
  CHECK(results[0].verdict == Verdict::fail);
  CHECK(results[0].detail.find("total variation distance 0.5") !=
        std::string::npos);
}

TEST_CASE("simulation errors surface as verdict=error with the message") {
  Circuit corrupted = parse_qasm(testutil::kBellSource);
  corrupted.instructions[1].qubits = {{"q", 0}, {"q", 0}};
  const auto results = run_tests(corrupted, {testutil::bell_distribution_test()},
                                 kDefaultTimeLimitMs);
  REQUIRE(results.size() == 1);
  CHECK(results[0].verdict == Verdict::error);
  CHECK(results[0].detail.find("invalid circuit") != std::string::npos);
}

TEST_CASE("statevector oracle compares up to global phase") {
  const Circuit plus = parse_qasm("OPENQASM 2.0; qreg q[1]; h q[0];");
  Statevector expected = evolve(plus);
  for (auto& a : expected.amplitudes) a *= std::polar(1.0, 0.777);

  TestCase test;
  test.name = "plus_state";
  test.oracle_kind = OracleKind::statevector;
  test.expected_state = expected;

  const auto results = run_tests(plus, {test}, kDefaultTimeLimitMs);
  CHECK(results[0].verdict == Verdict::pass);

  const Circuit zero = parse_qasm("OPENQASM 2.0; qreg q[1]; id q[0];");
  const auto bad = run_tests(zero, {test}, kDefaultTimeLimitMs);
  CHECK(bad[0].verdict == Verdict::fail);
  CHECK(bad[0].detail.find("max amplitude deviation") != std::string::npos);
}

TEST_CASE("expect_error oracle inverts the error outcome") {
  TestCase test;
  test.name = "must_crash";
  test.oracle_kind = OracleKind::expect_error;

  const Circuit crashing = parse_qasm(
      "OPENQASM 2.0; qreg q[1]; creg c[1]; measure q[0] -> c[0]; x q[0];");
  CHECK(run_tests(crashing, {test}, kDefaultTimeLimitMs)[0].verdict ==
        Verdict::pass);

  const Circuit healthy = parse_qasm("OPENQASM 2.0; qreg q[1]; x q[0];");
  const auto results = run_tests(healthy, {test}, kDefaultTimeLimitMs);
  CHECK(results[0].verdict == Verdict::fail);
  CHECK(!results[0].detail.empty());
}

TEST_CASE("timeouts are classified via an injected clock") {
  // Each run_tests call reads the clock twice per test; +20s per read blows
  // any per-test limit without real waiting.
  std::int64_t fake_now = 0;
  const ClockFn clock = [&fake_now] { return fake_now += 20000; };
  const Circuit bell = parse_qasm(testutil::kBellSource);
  const auto results = run_tests(bell, {testutil::bell_distribution_test()},
                                 kDefaultTimeLimitMs, clock);
  REQUIRE(results.size() == 1);
  CHECK(results[0].verdict == Verdict::timeout);
  CHECK(results[0].detail ==
        "execution exceeded the time limit of 10000 ms");
}

TEST_CASE("run_tests rejects an empty test list") {
  const Circuit bell = parse_qasm(testutil::kBellSource);
  CHECK_THROWS_AS(run_tests(bell, {}, kDefaultTimeLimitMs), HarnessError);
}

TEST_CASE("classify_status implements the four-way rule") {
  // baseline fail->pass flip counts as killed
  CHECK(classify_status(outcomes(Verdict::fail, Verdict::pass),
                        outcomes(Verdict::pass, Verdict::pass)) ==
        MutantStatus::killed);
  // identical verdict vectors survive
  CHECK(classify_status(outcomes(Verdict::fail, Verdict::pass),
                        outcomes(Verdict::fail, Verdict::pass)) ==
        MutantStatus::survived);
  // any mutant error is incompetent, regardless of the baseline
  CHECK(classify_status(outcomes(Verdict::fail, Verdict::pass),
                        outcomes(Verdict::error, Verdict::pass)) ==
        MutantStatus::incompetent);
  CHECK(classify_status(outcomes(Verdict::error, Verdict::pass),
                        outcomes(Verdict::error, Verdict::pass)) ==
        MutantStatus::incompetent);
  // error takes precedence over timeout
  CHECK(classify_status(outcomes(Verdict::fail, Verdict::pass),
                        outcomes(Verdict::timeout, Verdict::error)) ==
        MutantStatus::incompetent);
  // timeout beats killed/survived
  CHECK(classify_status(outcomes(Verdict::fail, Verdict::pass),
                        outcomes(Verdict::timeout, Verdict::pass)) ==
        MutantStatus::time_out);
}

TEST_CASE("classify_status rejects mismatched test sets") {
  CHECK_THROWS_AS(classify_status(outcomes(Verdict::pass, Verdict::pass),
                                  {outcome("t1", Verdict::pass)}),
                  HarnessError);
  CHECK_THROWS_AS(
      classify_status({outcome("t1", Verdict::pass)},
                      {outcome("renamed", Verdict::pass)}),
      HarnessError);
}

TEST_CASE("analyze marks the fix-restoring mutant killed") {
  const BugBundle bundle = testutil::bell_wrong_gate_bundle();
  const auto records = analyze(bundle, kDefaultTimeLimitMs);
  REQUIRE(records.size() == 16);

  bool found = false;
  for (const MutationRecord& record : records) {
    if (record.mutant_id == "L4-QGR-h") {
      found = true;
      CHECK(record.status == MutantStatus::killed);
      CHECK(record.exception_traceback.empty());
      CHECK(record.line_number == 4);
      CHECK(record.mutation_operator == MutationOp::QGR);
    }
  }
  CHECK(found);
}

TEST_CASE("analyze output matches the frozen golden record file") {
  const BugBundle bundle = testutil::bell_wrong_gate_bundle();
  const std::string produced =
      serialize_records(analyze(bundle, kDefaultTimeLimitMs));

  std::ifstream golden(std::string(QAPR_GOLDEN_DIR) +
                       "/bell_wrong_gate.records.jsonl");
  REQUIRE(golden.good());
  std::ostringstream buffer;
  buffer << golden.rdbuf();
  CHECK(produced == buffer.str());
}

TEST_CASE("analyze propagates the no-mutants condition") {
  BugBundle bundle;
  bundle.id = "immutable";
  bundle.buggy_circuit = parse_qasm("OPENQASM 2.0; qreg q[1];");
  bundle.reference_fix = parse_qasm("OPENQASM 2.0; qreg q[1]; x q[0];");
  TestCase test;
  test.name = "expect_one";
  test.oracle_kind = OracleKind::statevector;
  test.expected_state = Statevector{1, {0.0, 1.0}};
  bundle.tests = {test};
  bundle.symptom = Symptom::WO;
  CHECK_THROWS_AS(analyze(bundle, kDefaultTimeLimitMs), MutationError);
}

TEST_CASE("record serialization round-trips and keeps the normative field names") {
  MutationRecord record;
  record.mutant_id = "L5-QGR-cz";
  record.line_number = 5;
  record.mutation_operator = MutationOp::QGR;
  record.exception_traceback = "total variation distance 1.0 exceeds threshold";
  record.status = MutantStatus::survived;

  const std::string line = record_to_json_line(record);
  CHECK(line.find("\"mutant_id\"") != std::string::npos);
  CHECK(line.find("\"line_number\"") != std::string::npos);
  CHECK(line.find("\"mutation_operator\"") != std::string::npos);
  CHECK(line.find("\"exception_traceback\"") != std::string::npos);
  CHECK(line.find("\"status\"") != std::string::npos);
  CHECK(record_from_json_line(line) == record);

  const std::vector<MutationRecord> records = {record, record};
  const std::string text = serialize_records(records);
  CHECK(text == line + "\n" + line + "\n");
}

TEST_CASE("with an already-correct baseline, killed means a broken test") {
  BugBundle bundle = testutil::bell_wrong_gate_bundle();
  bundle.buggy_circuit = bundle.reference_fix;  // all tests pass up front

  const auto records = analyze(bundle, kDefaultTimeLimitMs);
  const auto mutants = enumerate_mutants(bundle.buggy_circuit);
  REQUIRE(records.size() == mutants.size());
  for (std::size_t i = 0; i < mutants.size(); ++i) {
    const auto outcomes =
        run_tests(mutants[i].circuit, bundle.tests, kDefaultTimeLimitMs);
    bool all_pass = true;
    bool any_error = false;
    for (const auto& outcome : outcomes) {
      all_pass = all_pass && outcome.verdict == Verdict::pass;
      any_error = any_error || outcome.verdict == Verdict::error;
    }
    CAPTURE(mutants[i].id);
    if (any_error) {
      CHECK(records[i].status == MutantStatus::incompetent);
    } else if (all_pass) {
      CHECK(records[i].status == MutantStatus::survived);
    } else {
      CHECK(records[i].status == MutantStatus::killed);
    }
  }
}

TEST_CASE("statuses partition the mutant set") {
  const BugBundle bundle = testutil::bell_wrong_gate_bundle();
  const auto records = analyze(bundle, kDefaultTimeLimitMs);
  const auto counts = mutant_count_by_operator(bundle.buggy_circuit);
  int total = 0;
  for (const auto& [op, count] : counts) total += count;
  CHECK(static_cast<int>(records.size()) == total);
}
