#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace qapr {

/// Parse and circuit-construction failures, tagged with a position in the
/// source when one is known.
class QasmError : public std::runtime_error {
 public:
  enum class Kind {
    syntax,
    unsupported_construct,
    unknown_gate,
    arity_mismatch,
    undeclared_register,
    no_such_line,
  };

  QasmError(Kind kind, const std::string& message, int line = 0, int column = 0);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  Kind kind_;
  int line_;
  int column_;
};

/// Simulation failures. what() is the text that fills a mutation record's
/// exception_traceback field, so its format is stable.
class SimError : public std::runtime_error {
 public:
  enum class Kind {
    invalid_circuit,
    numerical_overflow,
    unsupported_midcircuit_measure,
  };

  SimError(Kind kind, const std::string& message,
           std::optional<int> line_number = std::nullopt);

  Kind kind() const { return kind_; }
  std::optional<int> line_number() const { return line_number_; }

 private:
  Kind kind_;
  std::optional<int> line_number_;
};

class MutationError : public std::runtime_error {
 public:
  enum class Kind { no_mutants_generated };
  MutationError(Kind kind, const std::string& message);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class HarnessError : public std::runtime_error {
 public:
  enum class Kind { mismatched_test_sets, empty_test_set, bad_test_case };
  HarnessError(Kind kind, const std::string& message);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class PromptError : public std::runtime_error {
 public:
  enum class Kind { missing_ingredient, malformed_response, unknown_config };
  PromptError(Kind kind, const std::string& message);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class GatewayError : public std::runtime_error {
 public:
  enum class Kind {
    provider_unavailable,
    replay_miss,
    auth_missing,
    duplicate_key,
    io_failure,
  };
  GatewayError(Kind kind, const std::string& message);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class StatsError : public std::runtime_error {
 public:
  enum class Kind { length_mismatch, empty_subset, duplicate_sheet, store_error };
  StatsError(Kind kind, const std::string& message);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class BundleError : public std::runtime_error {
 public:
  enum class Kind { missing_file, bad_format, invariant_violation };
  BundleError(Kind kind, const std::string& message);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace qapr
