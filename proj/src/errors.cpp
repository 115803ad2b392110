#include "qapr/errors.hpp"

namespace qapr {

namespace {

std::string_view qasm_kind_label(QasmError::Kind kind) {
  switch (kind) {
    case QasmError::Kind::syntax: return "syntax error";
    case QasmError::Kind::unsupported_construct: return "unsupported construct";
    case QasmError::Kind::unknown_gate: return "unknown gate";
    case QasmError::Kind::arity_mismatch: return "arity mismatch";
    case QasmError::Kind::undeclared_register: return "undeclared register";
    case QasmError::Kind::no_such_line: return "no such line";
  }
  return "qasm error";
}

std::string format_qasm_message(QasmError::Kind kind, const std::string& message,
                                int line, int column) {
  std::string out{qasm_kind_label(kind)};
  out += ": ";
  out += message;
  if (line > 0) {
    out += " (line " + std::to_string(line);
    if (column > 0) out += ", column " + std::to_string(column);
    out += ")";
  }
  return out;
}

std::string format_sim_message(SimError::Kind kind, const std::string& message,
                               std::optional<int> line_number) {
  std::string_view label;
  switch (kind) {
    case SimError::Kind::invalid_circuit: label = "invalid circuit"; break;
    case SimError::Kind::numerical_overflow: label = "numerical overflow"; break;
    case SimError::Kind::unsupported_midcircuit_measure:
      label = "unsupported mid-circuit measurement";
      break;
  }
  std::string out{label};
  out += ": ";
  out += message;
  if (line_number) out += " (line " + std::to_string(*line_number) + ")";
  return out;
}

}  // namespace

QasmError::QasmError(Kind kind, const std::string& message, int line, int column)
    : std::runtime_error(format_qasm_message(kind, message, line, column)),
      kind_(kind),
      line_(line),
      column_(column) {}

SimError::SimError(Kind kind, const std::string& message,
                   std::optional<int> line_number)
    : std::runtime_error(format_sim_message(kind, message, line_number)),
      kind_(kind),
      line_number_(line_number) {}

MutationError::MutationError(Kind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

HarnessError::HarnessError(Kind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

PromptError::PromptError(Kind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

GatewayError::GatewayError(Kind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

StatsError::StatsError(Kind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

BundleError::BundleError(Kind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

}  // namespace qapr
