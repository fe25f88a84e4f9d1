#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rnc/errors.hpp"

namespace rnc::ir {

// Straight-line three-address IR.
//
//   module   := { function }
//   function := "func" "@" name "(" [ param { "," param } ] ")" "{" instrs "}"
//   param    := "%" name ":" type
//   type     := "u8" | "u32"
//   instr    := "%" name "=" opcode type operands
//             | "%" name "=" "call" type "@" callee [ operands ]
//             | "ret" type operand
//   operand  := "%" name | integer
//   comments run from ";" to end of line
//
// Names are single-assignment and function-scoped; operands must be defined
// before use. Arithmetic wraps at the type width.

enum class Type : std::uint8_t { kU8, kU32 };

std::string_view type_name(Type t);
std::uint64_t type_mask(Type t);
unsigned type_bits(Type t);

enum class Opcode : std::uint8_t {
  kConst,
  kAdd,
  kSub,
  kMul,
  kEq,
  kNe,
  kDiv,
  kXor,
  kShl,
  kRet,
  kCall,
};

std::string_view opcode_name(Opcode op);

struct Operand {
  enum class Kind : std::uint8_t { kName, kImm } kind = Kind::kImm;
  std::string name;
  std::uint64_t imm = 0;

  static Operand of_name(std::string n) {
    return Operand{Kind::kName, std::move(n), 0};
  }
  static Operand of_imm(std::uint64_t v) { return Operand{Kind::kImm, {}, v}; }
  bool is_name() const { return kind == Kind::kName; }
};

struct Instr {
  std::string result;  // empty for ret
  Opcode op = Opcode::kRet;
  Type type = Type::kU8;
  std::string callee;  // call only, without the leading '@'
  std::vector<Operand> args;
  int line = 0;
};

struct Param {
  std::string name;
  Type type = Type::kU8;
};

struct Function {
  std::string name;
  std::vector<Param> params;
  std::vector<Instr> body;
};

struct Module {
  std::vector<Function> functions;

  const Function* find(std::string_view name) const;
};

class ParseError : public Error {
 public:
  ParseError(std::string message, int line, int col)
      : Error(std::move(message) + " (line " + std::to_string(line) +
              ", column " + std::to_string(col) + ")"),
        line_(line),
        col_(col) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return col_; }

 private:
  int line_;
  int col_;
};

class SyntaxError : public ParseError {
 public:
  using ParseError::ParseError;
};

class UseBeforeDefError : public ParseError {
 public:
  using ParseError::ParseError;
};

class RedefinitionError : public ParseError {
 public:
  using ParseError::ParseError;
};

Module parse_module(std::string_view text);

/// Canonical text form; parse(print(parse(text))) is a fixpoint.
std::string print_module(const Module& m);

/// Intrinsic callee names understood by the interpreter and emitted by the
/// protection pass.
bool is_intrinsic(std::string_view callee);

}  // namespace rnc::ir
