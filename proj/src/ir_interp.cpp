#include "rnc/ir_interp.hpp"

#include <unordered_map>
#include <variant>

#include "rnc/ops.hpp"

namespace rnc::ir {

namespace {

using Value = std::variant<std::uint64_t, EncodedValue>;

std::uint64_t as_plain(const Value& v, const Instr& instr) {
  if (const auto* p = std::get_if<std::uint64_t>(&v)) return *p;
  throw TrapError("encoded value in plain context at line " +
                  std::to_string(instr.line));
}

const EncodedValue& as_encoded(const Value& v, const Instr& instr) {
  if (const auto* p = std::get_if<EncodedValue>(&v)) return *p;
  throw TrapError("plain value where an encoded one was expected at line " +
                  std::to_string(instr.line));
}

class Evaluator {
 public:
  Evaluator(const Module& m, InterpContext ctx) : module_(m), ctx_(ctx) {}

  std::uint64_t call(std::string_view name,
                     std::span<const std::uint64_t> args) {
    const Function* f = module_.find(name);
    if (f == nullptr) {
      throw Error("no function @" + std::string(name));
    }
    if (args.size() != f->params.size()) {
      throw Error("@" + f->name + " expects " +
                  std::to_string(f->params.size()) + " arguments");
    }
    std::unordered_map<std::string, Value> env;
    for (std::size_t i = 0; i < args.size(); ++i) {
      env[f->params[i].name] = args[i] & type_mask(f->params[i].type);
    }
    for (const Instr& instr : f->body) {
      if (instr.op == Opcode::kRet) {
        return as_plain(operand(instr.args[0], env, instr), instr) &
               type_mask(instr.type);
      }
      env[instr.result] = evaluate(instr, env);
    }
    throw TrapError("@" + f->name + " fell off the end without ret");
  }

 private:
  Value operand(const Operand& op,
                const std::unordered_map<std::string, Value>& env,
                const Instr& instr) const {
    if (!op.is_name()) return op.imm;
    const auto it = env.find(op.name);
    if (it == env.end()) {
      throw Error("%" + op.name + " is unbound at line " +
                  std::to_string(instr.line));
    }
    (void)instr;
    return it->second;
  }

  Value evaluate(const Instr& instr,
                 std::unordered_map<std::string, Value>& env) {
    const std::uint64_t mask = type_mask(instr.type);
    switch (instr.op) {
      case Opcode::kConst:
        return instr.args[0].imm & mask;
      case Opcode::kCall:
        return call_target(instr, env);
      default:
        break;
    }
    const std::uint64_t a =
        as_plain(operand(instr.args[0], env, instr), instr) & mask;
    const std::uint64_t b =
        as_plain(operand(instr.args[1], env, instr), instr) & mask;
    switch (instr.op) {
      case Opcode::kAdd:
        return (a + b) & mask;
      case Opcode::kSub:
        return (a - b) & mask;
      case Opcode::kMul:
        return (a * b) & mask;
      case Opcode::kEq:
        return static_cast<std::uint64_t>(a == b);
      case Opcode::kNe:
        return static_cast<std::uint64_t>(a != b);
      case Opcode::kDiv:
        if (b == 0) {
          throw TrapError("division by zero at line " +
                          std::to_string(instr.line));
        }
        return (a / b) & mask;
      case Opcode::kXor:
        return (a ^ b) & mask;
      case Opcode::kShl:
        return (a << (b % type_bits(instr.type))) & mask;
      default:
        throw Error("unexpected opcode");
    }
  }

  Value call_target(const Instr& instr,
                    std::unordered_map<std::string, Value>& env) {
    if (!is_intrinsic(instr.callee)) {
      std::vector<std::uint64_t> args;
      args.reserve(instr.args.size());
      for (const Operand& op : instr.args) {
        args.push_back(as_plain(operand(op, env, instr), instr));
      }
      return call(instr.callee, args) & type_mask(instr.type);
    }
    const ModuliSet* ms = ctx_.moduli;
    if (ms == nullptr) {
      throw Error("@" + instr.callee +
                  " needs a moduli set bound to the interpreter");
    }
    if (instr.callee == "rnc.encode") {
      const std::uint64_t v =
          as_plain(operand(instr.args[0], env, instr), instr) &
          type_mask(instr.type);
      return ctx_.rng != nullptr ? encode(*ms, v, *ctx_.rng) : encode(*ms, v);
    }
    if (instr.callee == "rnc.decode") {
      return decode(*ms, as_encoded(operand(instr.args[0], env, instr),
                                    instr)) &
             type_mask(instr.type);
    }
    if (instr.callee == "rnc.const") {
      if (instr.args.size() != ms->count()) {
        throw Error("@rnc.const expects one component per modulus");
      }
      EncodedValue v;
      v.moduli_id = ms->id();
      for (const Operand& op : instr.args) {
        v.components.push_back(as_plain(operand(op, env, instr), instr));
      }
      return v;
    }
    const EncodedValue& x =
        as_encoded(operand(instr.args[0], env, instr), instr);
    const EncodedValue& y =
        as_encoded(operand(instr.args[1], env, instr), instr);
    if (instr.callee == "rnc.add") return add_enc(*ms, x, y, ctx_.rng);
    if (instr.callee == "rnc.sub") return sub_enc(*ms, x, y, ctx_.rng);
    if (instr.callee == "rnc.mul") return mul_enc(*ms, x, y, ctx_.rng);
    if (instr.callee == "rnc.eq") {
      return static_cast<std::uint64_t>(eq_enc(*ms, x, y));
    }
    if (instr.callee == "rnc.ne") {
      return static_cast<std::uint64_t>(neq_enc(*ms, x, y));
    }
    throw Error("unknown intrinsic @" + instr.callee);
  }

  const Module& module_;
  InterpContext ctx_;
};

}  // namespace

std::uint64_t interpret(const Module& m, std::string_view function,
                        std::span<const std::uint64_t> args,
                        InterpContext ctx) {
  return Evaluator(m, ctx).call(function, args);
}

}  // namespace rnc::ir
