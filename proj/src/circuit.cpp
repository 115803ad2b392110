#include "qapr/circuit.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>
#include <utility>

namespace qapr {

// ---------------------------------------------------------------------------
// Gate catalog

namespace {

using cd = std::complex<double>;

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kPi = 3.14159265358979323846;

GateMatrix m_id(std::span<const double>) { return {1, 0, 0, 1}; }
GateMatrix m_x(std::span<const double>) { return {0, 1, 1, 0}; }
GateMatrix m_y(std::span<const double>) {
  return {0, cd(0, -1), cd(0, 1), 0};
}
GateMatrix m_z(std::span<const double>) { return {1, 0, 0, -1}; }
GateMatrix m_h(std::span<const double>) {
  return {kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2};
}
GateMatrix m_s(std::span<const double>) { return {1, 0, 0, cd(0, 1)}; }
GateMatrix m_sdg(std::span<const double>) { return {1, 0, 0, cd(0, -1)}; }
GateMatrix m_t(std::span<const double>) {
  return {1, 0, 0, std::polar(1.0, kPi / 4)};
}
GateMatrix m_tdg(std::span<const double>) {
  return {1, 0, 0, std::polar(1.0, -kPi / 4)};
}
GateMatrix m_rx(std::span<const double> p) {
  const double c = std::cos(p[0] / 2), s = std::sin(p[0] / 2);
  return {c, cd(0, -s), cd(0, -s), c};
}
GateMatrix m_ry(std::span<const double> p) {
  const double c = std::cos(p[0] / 2), s = std::sin(p[0] / 2);
  return {c, -s, s, c};
}
GateMatrix m_rz(std::span<const double> p) {
  return {std::polar(1.0, -p[0] / 2), 0, 0, std::polar(1.0, p[0] / 2)};
}
GateMatrix m_p(std::span<const double> p) {
  return {1, 0, 0, std::polar(1.0, p[0])};
}

// Two-qubit matrices: local basis index = q0 + 2*q1 with q0 the first operand.
GateMatrix m_cx(std::span<const double>) {
  GateMatrix u(16, 0);
  u[0 * 4 + 0] = 1;  // |00> -> |00>
  u[3 * 4 + 1] = 1;  // control set, target flips
  u[2 * 4 + 2] = 1;
  u[1 * 4 + 3] = 1;
  return u;
}
GateMatrix m_cz(std::span<const double>) {
  GateMatrix u(16, 0);
  u[0 * 4 + 0] = 1;
  u[1 * 4 + 1] = 1;
  u[2 * 4 + 2] = 1;
  u[3 * 4 + 3] = -1;
  return u;
}
GateMatrix m_swap(std::span<const double>) {
  GateMatrix u(16, 0);
  u[0 * 4 + 0] = 1;
  u[2 * 4 + 1] = 1;
  u[1 * 4 + 2] = 1;
  u[3 * 4 + 3] = 1;
  return u;
}
GateMatrix m_ch(std::span<const double>) {
  GateMatrix u(16, 0);
  u[0 * 4 + 0] = 1;
  u[2 * 4 + 2] = 1;
  // control (local bit 0) set: Hadamard on the target bit, indices 1 and 3
  u[1 * 4 + 1] = kInvSqrt2;
  u[1 * 4 + 3] = kInvSqrt2;
  u[3 * 4 + 1] = kInvSqrt2;
  u[3 * 4 + 3] = -kInvSqrt2;
  return u;
}

// Three-qubit matrices: controls first, target/swapped pair after.
GateMatrix m_ccx(std::span<const double>) {
  GateMatrix u(64, 0);
  for (int i = 0; i < 8; ++i) {
    int j = i;
    if ((i & 1) && (i & 2)) j = i ^ 4;  // both controls set: flip the target
    u[j * 8 + i] = 1;
  }
  return u;
}
GateMatrix m_cswap(std::span<const double>) {
  GateMatrix u(64, 0);
  for (int i = 0; i < 8; ++i) {
    int j = i;
    if (i & 1) {  // control set: exchange the two swapped bits
      const int a = (i >> 1) & 1, b = (i >> 2) & 1;
      j = (i & 1) | (b << 1) | (a << 2);
    }
    u[j * 8 + i] = 1;
  }
  return u;
}

constexpr std::array<GateCatalogEntry, 19> kCatalog = {{
    {"id", 1, 0, m_id},
    {"x", 1, 0, m_x},
    {"y", 1, 0, m_y},
    {"z", 1, 0, m_z},
    {"h", 1, 0, m_h},
    {"s", 1, 0, m_s},
    {"sdg", 1, 0, m_sdg},
    {"t", 1, 0, m_t},
    {"tdg", 1, 0, m_tdg},
    {"rx", 1, 1, m_rx},
    {"ry", 1, 1, m_ry},
    {"rz", 1, 1, m_rz},
    {"p", 1, 1, m_p},
    {"cx", 2, 0, m_cx},
    {"cz", 2, 0, m_cz},
    {"swap", 2, 0, m_swap},
    {"ch", 2, 0, m_ch},
    {"ccx", 3, 0, m_ccx},
    {"cswap", 3, 0, m_cswap},
}};

}  // namespace

std::span<const GateCatalogEntry> gate_catalog() { return kCatalog; }

const GateCatalogEntry* find_gate(std::string_view name) {
  for (const auto& entry : kCatalog) {
    if (entry.name == name) return &entry;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Instruction and circuit helpers

bool Instruction::same_operation(const Instruction& other) const {
  return kind == other.kind && gate_name == other.gate_name &&
         params == other.params && qubits == other.qubits &&
         clbits == other.clbits;
}

Instruction make_gate(std::string name, std::vector<double> params,
                      std::vector<BitRef> qubits) {
  Instruction instr;
  instr.kind = InstrKind::gate;
  instr.gate_name = std::move(name);
  instr.params = std::move(params);
  instr.qubits = std::move(qubits);
  return instr;
}

Instruction make_measure(BitRef qubit, BitRef clbit) {
  Instruction instr;
  instr.kind = InstrKind::measure;
  instr.qubits = {std::move(qubit)};
  instr.clbits = {std::move(clbit)};
  return instr;
}

Instruction make_barrier(std::vector<BitRef> qubits) {
  Instruction instr;
  instr.kind = InstrKind::barrier;
  instr.qubits = std::move(qubits);
  return instr;
}

int Circuit::num_qubits() const {
  int total = 0;
  for (const auto& reg : qregs) total += reg.size;
  return total;
}

int Circuit::num_clbits() const {
  int total = 0;
  for (const auto& reg : cregs) total += reg.size;
  return total;
}

const QuantumRegister* Circuit::find_qreg(std::string_view name) const {
  for (const auto& reg : qregs) {
    if (reg.name == name) return &reg;
  }
  return nullptr;
}

const ClassicalRegister* Circuit::find_creg(std::string_view name) const {
  for (const auto& reg : cregs) {
    if (reg.name == name) return &reg;
  }
  return nullptr;
}

int Circuit::global_qubit(const BitRef& ref) const {
  int offset = 0;
  for (const auto& reg : qregs) {
    if (reg.name == ref.reg) {
      if (ref.index < 0 || ref.index >= reg.size) return -1;
      return offset + ref.index;
    }
    offset += reg.size;
  }
  return -1;
}

int Circuit::global_clbit(const BitRef& ref) const {
  int offset = 0;
  for (const auto& reg : cregs) {
    if (reg.name == ref.reg) {
      if (ref.index < 0 || ref.index >= reg.size) return -1;
      return offset + ref.index;
    }
    offset += reg.size;
  }
  return -1;
}

BitRef Circuit::qubit_ref_at(int global_index) const {
  int offset = 0;
  for (const auto& reg : qregs) {
    if (global_index < offset + reg.size) return {reg.name, global_index - offset};
    offset += reg.size;
  }
  return {};
}

BitRef Circuit::clbit_ref_at(int global_index) const {
  int offset = 0;
  for (const auto& reg : cregs) {
    if (global_index < offset + reg.size) return {reg.name, global_index - offset};
    offset += reg.size;
  }
  return {};
}

void renumber(Circuit& circuit) {
  const int first =
      2 + static_cast<int>(circuit.qregs.size() + circuit.cregs.size());
  for (std::size_t i = 0; i < circuit.instructions.size(); ++i) {
    circuit.instructions[i].line_number = first + static_cast<int>(i);
  }
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

struct Token {
  enum class Type { identifier, number, symbol, arrow, end };
  Type type = Type::end;
  std::string text;
  int line = 0;
  int column = 0;
};

// Lexes on demand so that a statement-level rejection (say of `include`)
// fires before a character-level error later on the same line.
class Lexer {
 public:
  explicit Lexer(std::string_view source) : src_(source) {}

  const Token& peek() {
    ensure();
    return current_;
  }

  Token take() {
    ensure();
    has_current_ = false;
    return std::move(current_);
  }

 private:
  void ensure() {
    if (has_current_) return;
    advance();
    has_current_ = true;
  }

  void advance() {
    skip_space_and_comments();
    current_ = Token{};
    current_.line = line_;
    current_.column = col_;
    if (pos_ >= src_.size()) {
      current_.type = Token::Type::end;
      return;
    }
    const char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_')) {
        step();
      }
      current_.type = Token::Type::identifier;
      current_.text = std::string(src_.substr(start, pos_ - start));
      return;
    }
    if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      step();
      step();
      current_.type = Token::Type::arrow;
      current_.text = "->";
      return;
    }
    const bool sign_start =
        (c == '-' || c == '+') && pos_ + 1 < src_.size() &&
        (std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])) ||
         src_[pos_ + 1] == '.');
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || sign_start) {
      std::size_t start = pos_;
      if (sign_start) step();
      while (pos_ < src_.size() &&
             (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '.')) {
        step();
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        step();
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) step();
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          step();
        }
      }
      current_.type = Token::Type::number;
      current_.text = std::string(src_.substr(start, pos_ - start));
      return;
    }
    if (std::string_view(";,()[]").find(c) != std::string_view::npos) {
      current_.type = Token::Type::symbol;
      current_.text = std::string(1, c);
      step();
      return;
    }
    throw QasmError(QasmError::Kind::syntax,
                    std::string("unexpected character '") + c + "'", line_, col_);
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') step();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        step();
      } else {
        break;
      }
    }
  }

  void step() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  bool has_current_ = false;
  Token current_;
};

class Parser {
 public:
  explicit Parser(std::string_view source) : lex_(source) {}

  Circuit run() {
    parse_header();
    while (lex_.peek().type != Token::Type::end) parse_statement();
    renumber(circuit_);
    return std::move(circuit_);
  }

 private:
  [[noreturn]] void fail(QasmError::Kind kind, const std::string& message,
                         const Token& at) {
    throw QasmError(kind, message, at.line, at.column);
  }

  Token expect_symbol(char c) {
    Token t = lex_.take();
    if (t.type != Token::Type::symbol || t.text[0] != c) {
      fail(QasmError::Kind::syntax,
           std::string("expected '") + c + "', got '" + t.text + "'", t);
    }
    return t;
  }

  Token expect_identifier() {
    Token t = lex_.take();
    if (t.type != Token::Type::identifier) {
      fail(QasmError::Kind::syntax, "expected an identifier, got '" + t.text + "'",
           t);
    }
    return t;
  }

  void parse_header() {
    Token t = lex_.take();
    if (t.type != Token::Type::identifier || t.text != "OPENQASM") {
      fail(QasmError::Kind::syntax, "expected the OPENQASM version header", t);
    }
    Token version = lex_.take();
    if (version.type != Token::Type::number) {
      fail(QasmError::Kind::syntax, "expected a version number after OPENQASM",
           version);
    }
    if (version.text != "2.0") {
      fail(QasmError::Kind::unsupported_construct,
           "only OPENQASM 2.0 is supported, got " + version.text, version);
    }
    expect_symbol(';');
  }

  void parse_statement() {
    Token head = lex_.take();
    if (head.type != Token::Type::identifier) {
      fail(QasmError::Kind::syntax, "expected a statement, got '" + head.text + "'",
           head);
    }
    const std::string& word = head.text;
    if (word == "qreg" || word == "creg") {
      parse_register(word == "qreg", head);
    } else if (word == "measure") {
      parse_measure(head);
    } else if (word == "barrier") {
      parse_barrier(head);
    } else if (word == "include") {
      fail(QasmError::Kind::unsupported_construct, "include files are not supported",
           head);
    } else if (word == "gate" || word == "opaque") {
      fail(QasmError::Kind::unsupported_construct,
           "user-defined gates are not supported", head);
    } else if (word == "if") {
      fail(QasmError::Kind::unsupported_construct,
           "classical control is not supported", head);
    } else if (word == "reset") {
      fail(QasmError::Kind::unsupported_construct, "reset is not supported", head);
    } else {
      parse_gate(head);
    }
  }

  int parse_register_size(const Token& head) {
    expect_symbol('[');
    Token size_tok = lex_.take();
    if (size_tok.type != Token::Type::number) {
      fail(QasmError::Kind::syntax, "expected a register size", size_tok);
    }
    char* end = nullptr;
    const long size = std::strtol(size_tok.text.c_str(), &end, 10);
    if (*end != '\0' || size < 1) {
      fail(QasmError::Kind::syntax,
           "register size must be a positive integer, got " + size_tok.text,
           size_tok);
    }
    expect_symbol(']');
    (void)head;
    return static_cast<int>(size);
  }

  void parse_register(bool quantum, const Token& head) {
    Token name = expect_identifier();
    const int size = parse_register_size(head);
    expect_symbol(';');
    if (quantum) {
      if (circuit_.find_qreg(name.text)) {
        fail(QasmError::Kind::syntax,
             "quantum register '" + name.text + "' already declared", name);
      }
      circuit_.qregs.push_back({name.text, size});
      if (circuit_.num_qubits() > kMaxQubits) {
        fail(QasmError::Kind::unsupported_construct,
             "circuit exceeds the " + std::to_string(kMaxQubits) + "-qubit cap",
             name);
      }
    } else {
      if (circuit_.find_creg(name.text)) {
        fail(QasmError::Kind::syntax,
             "classical register '" + name.text + "' already declared", name);
      }
      circuit_.cregs.push_back({name.text, size});
    }
  }

  BitRef parse_bit_ref(bool quantum) {
    Token name = expect_identifier();
    if (!(lex_.peek().type == Token::Type::symbol && lex_.peek().text == "[")) {
      fail(QasmError::Kind::unsupported_construct,
           "register broadcast is not supported; index the register explicitly",
           name);
    }
    expect_symbol('[');
    Token idx_tok = lex_.take();
    if (idx_tok.type != Token::Type::number) {
      fail(QasmError::Kind::syntax, "expected a bit index", idx_tok);
    }
    char* end = nullptr;
    const long index = std::strtol(idx_tok.text.c_str(), &end, 10);
    if (*end != '\0' || index < 0) {
      fail(QasmError::Kind::syntax, "bit index must be a nonnegative integer",
           idx_tok);
    }
    expect_symbol(']');
    BitRef ref{name.text, static_cast<int>(index)};
    if (quantum) {
      const QuantumRegister* reg = circuit_.find_qreg(ref.reg);
      if (!reg) {
        fail(QasmError::Kind::undeclared_register,
             "no quantum register named '" + ref.reg + "'", name);
      }
      if (ref.index >= reg->size) {
        fail(QasmError::Kind::undeclared_register,
             "index " + std::to_string(ref.index) + " out of range for '" +
                 ref.reg + "[" + std::to_string(reg->size) + "]'",
             idx_tok);
      }
    } else {
      const ClassicalRegister* reg = circuit_.find_creg(ref.reg);
      if (!reg) {
        fail(QasmError::Kind::undeclared_register,
             "no classical register named '" + ref.reg + "'", name);
      }
      if (ref.index >= reg->size) {
        fail(QasmError::Kind::undeclared_register,
             "index " + std::to_string(ref.index) + " out of range for '" +
                 ref.reg + "[" + std::to_string(reg->size) + "]'",
             idx_tok);
      }
    }
    return ref;
  }

  void parse_measure(const Token& head) {
    BitRef qubit = parse_bit_ref(true);
    Token arrow = lex_.take();
    if (arrow.type != Token::Type::arrow) {
      fail(QasmError::Kind::syntax, "expected '->' in measure statement", arrow);
    }
    BitRef clbit = parse_bit_ref(false);
    expect_symbol(';');
    (void)head;
    circuit_.instructions.push_back(make_measure(std::move(qubit), std::move(clbit)));
  }

  void parse_barrier(const Token& head) {
    std::vector<BitRef> qubits;
    qubits.push_back(parse_bit_ref(true));
    while (lex_.peek().type == Token::Type::symbol && lex_.peek().text == ",") {
      lex_.take();
      qubits.push_back(parse_bit_ref(true));
    }
    expect_symbol(';');
    check_distinct(qubits, "barrier", head);
    circuit_.instructions.push_back(make_barrier(std::move(qubits)));
  }

  void parse_gate(const Token& head) {
    const GateCatalogEntry* entry = find_gate(head.text);
    if (!entry) {
      fail(QasmError::Kind::unknown_gate, "unknown gate '" + head.text + "'", head);
    }
    std::vector<double> params;
    if (lex_.peek().type == Token::Type::symbol && lex_.peek().text == "(") {
      lex_.take();
      if (!(lex_.peek().type == Token::Type::symbol && lex_.peek().text == ")")) {
        params.push_back(parse_param());
        while (lex_.peek().type == Token::Type::symbol && lex_.peek().text == ",") {
          lex_.take();
          params.push_back(parse_param());
        }
      }
      expect_symbol(')');
    }
    if (static_cast<int>(params.size()) != entry->param_arity) {
      fail(QasmError::Kind::arity_mismatch,
           "gate '" + head.text + "' expects " +
               std::to_string(entry->param_arity) + " parameter(s), got " +
               std::to_string(params.size()),
           head);
    }
    std::vector<BitRef> qubits;
    qubits.push_back(parse_bit_ref(true));
    while (lex_.peek().type == Token::Type::symbol && lex_.peek().text == ",") {
      lex_.take();
      qubits.push_back(parse_bit_ref(true));
    }
    expect_symbol(';');
    if (static_cast<int>(qubits.size()) != entry->qubit_arity) {
      fail(QasmError::Kind::arity_mismatch,
           "gate '" + head.text + "' expects " +
               std::to_string(entry->qubit_arity) + " qubit operand(s), got " +
               std::to_string(qubits.size()),
           head);
    }
    check_distinct(qubits, head.text, head);
    circuit_.instructions.push_back(
        make_gate(head.text, std::move(params), std::move(qubits)));
  }

  double parse_param() {
    Token t = lex_.take();
    if (t.type != Token::Type::number) {
      fail(QasmError::Kind::unsupported_construct,
           "parameters must be numeric literals, got '" + t.text + "'", t);
    }
    char* end = nullptr;
    const double value = std::strtod(t.text.c_str(), &end);
    if (*end != '\0') {
      fail(QasmError::Kind::syntax, "malformed number '" + t.text + "'", t);
    }
    return value;
  }

  void check_distinct(const std::vector<BitRef>& qubits, const std::string& what,
                      const Token& at) {
    std::set<std::pair<std::string, int>> seen;
    for (const auto& q : qubits) {
      if (!seen.insert({q.reg, q.index}).second) {
        fail(QasmError::Kind::unsupported_construct,
             "duplicate qubit operand in '" + what + "'", at);
      }
    }
  }

  Lexer lex_;
  Circuit circuit_;
};

std::string format_param(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string format_bit_ref(const BitRef& ref) {
  return ref.reg + "[" + std::to_string(ref.index) + "]";
}

}  // namespace

Circuit parse_qasm(std::string_view source) { return Parser(source).run(); }

std::string print_qasm(const Circuit& circuit) {
  std::string out = "OPENQASM 2.0;\n";
  for (const auto& reg : circuit.qregs) {
    out += "qreg " + reg.name + "[" + std::to_string(reg.size) + "];\n";
  }
  for (const auto& reg : circuit.cregs) {
    out += "creg " + reg.name + "[" + std::to_string(reg.size) + "];\n";
  }
  for (const auto& instr : circuit.instructions) {
    switch (instr.kind) {
      case InstrKind::gate: {
        out += instr.gate_name;
        if (!instr.params.empty()) {
          out += "(";
          for (std::size_t i = 0; i < instr.params.size(); ++i) {
            if (i > 0) out += ",";
            out += format_param(instr.params[i]);
          }
          out += ")";
        }
        out += " ";
        break;
      }
      case InstrKind::measure:
        out += "measure ";
        break;
      case InstrKind::barrier:
        out += "barrier ";
        break;
    }
    if (instr.kind == InstrKind::measure) {
      out += format_bit_ref(instr.qubits[0]) + " -> " +
             format_bit_ref(instr.clbits[0]);
    } else {
      for (std::size_t i = 0; i < instr.qubits.size(); ++i) {
        if (i > 0) out += ",";
        out += format_bit_ref(instr.qubits[i]);
      }
    }
    out += ";\n";
  }
  return out;
}

Circuit replace_instruction(const Circuit& circuit, int line_number,
                            const std::optional<Instruction>& replacement) {
  Circuit result = circuit;
  auto it = std::find_if(result.instructions.begin(), result.instructions.end(),
                         [&](const Instruction& instr) {
                           return instr.line_number == line_number;
                         });
  if (it == result.instructions.end()) {
    throw QasmError(QasmError::Kind::no_such_line,
                    "no instruction at line " + std::to_string(line_number));
  }
  if (replacement) {
    *it = *replacement;
  } else {
    result.instructions.erase(it);
  }
  renumber(result);
  return result;
}

Circuit insert_instruction(const Circuit& circuit, std::size_t position,
                           Instruction instr) {
  if (position > circuit.instructions.size()) {
    throw QasmError(QasmError::Kind::no_such_line,
                    "insert position " + std::to_string(position) +
                        " past the end of the instruction list");
  }
  Circuit result = circuit;
  result.instructions.insert(
      result.instructions.begin() + static_cast<std::ptrdiff_t>(position),
      std::move(instr));
  renumber(result);
  return result;
}

std::optional<std::string> find_invariant_violation(const Circuit& circuit,
                                                    int* line) {
  if (line) *line = 0;
  std::set<std::string> names;
  for (const auto& reg : circuit.qregs) {
    if (reg.size < 1) return "quantum register '" + reg.name + "' has size < 1";
    if (!names.insert(reg.name).second) {
      return "duplicate quantum register '" + reg.name + "'";
    }
  }
  names.clear();
  for (const auto& reg : circuit.cregs) {
    if (reg.size < 1) return "classical register '" + reg.name + "' has size < 1";
    if (!names.insert(reg.name).second) {
      return "duplicate classical register '" + reg.name + "'";
    }
  }
  if (circuit.num_qubits() > kMaxQubits) {
    return "circuit exceeds the " + std::to_string(kMaxQubits) + "-qubit cap";
  }
  int prev_line = 0;
  for (const auto& instr : circuit.instructions) {
    if (line) *line = instr.line_number;
    if (instr.line_number <= prev_line) {
      return "instruction line numbers are not strictly increasing";
    }
    prev_line = instr.line_number;
    std::set<int> seen;
    for (const auto& q : instr.qubits) {
      const int g = circuit.global_qubit(q);
      if (g < 0) return "qubit reference " + format_bit_ref(q) + " does not resolve";
      if (!seen.insert(g).second) {
        return "duplicate qubit operand " + format_bit_ref(q);
      }
    }
    switch (instr.kind) {
      case InstrKind::gate: {
        const GateCatalogEntry* entry = find_gate(instr.gate_name);
        if (!entry) return "unknown gate '" + instr.gate_name + "'";
        if (static_cast<int>(instr.qubits.size()) != entry->qubit_arity) {
          return "gate '" + instr.gate_name + "' has the wrong qubit count";
        }
        if (static_cast<int>(instr.params.size()) != entry->param_arity) {
          return "gate '" + instr.gate_name + "' has the wrong parameter count";
        }
        if (!instr.clbits.empty()) {
          return "gate '" + instr.gate_name + "' carries classical bits";
        }
        break;
      }
      case InstrKind::measure: {
        if (instr.qubits.size() != 1 || instr.clbits.size() != 1) {
          return "measure must have exactly one qubit and one classical bit";
        }
        if (circuit.global_clbit(instr.clbits[0]) < 0) {
          return "classical reference " + format_bit_ref(instr.clbits[0]) +
                 " does not resolve";
        }
        break;
      }
      case InstrKind::barrier: {
        if (instr.qubits.empty()) return "barrier has no qubit operands";
        if (!instr.clbits.empty()) return "barrier carries classical bits";
        break;
      }
    }
  }
  if (line) *line = 0;
  return std::nullopt;
}

}  // namespace qapr
