#include "rnc/ir_passes.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace rnc::ir {

namespace {

bool has_prefix(std::string_view name) {
  return name.starts_with(kSensitivePrefix);
}

TaintSet taint_function(const Function& f) {
  TaintSet tainted;
  for (const Param& p : f.params) {
    if (has_prefix(p.name)) tainted.insert(p.name);
  }
  // Straight-line code with defs before uses: one forward pass reaches the
  // fixpoint.
  for (const Instr& instr : f.body) {
    if (instr.result.empty()) continue;
    bool hot = has_prefix(instr.result);
    for (const Operand& op : instr.args) {
      if (op.is_name() && tainted.contains(op.name)) hot = true;
    }
    if (hot) tainted.insert(instr.result);
  }
  return tainted;
}

}  // namespace

TaintSet propagate_taint(const Module& m) {
  TaintSet all;
  for (const Function& f : m.functions) {
    TaintSet t = taint_function(f);
    all.insert(t.begin(), t.end());
  }
  return all;
}

ModuliSet select_moduli(unsigned bit_width) {
  if (bit_width < 1 || bit_width > 32) {
    throw OutOfRangeError("bit width must be in [1, 32]");
  }
  const unsigned __int128 target = static_cast<unsigned __int128>(1)
                                   << bit_width;
  for (std::uint64_t a = std::max<std::uint64_t>(2, std::uint64_t{1}
                                                        << (bit_width / 2));
       ; ++a) {
    for (std::uint64_t b = a + 1;; ++b) {
      if (static_cast<unsigned __int128>(a) * b < target) continue;
      if (std::gcd(a, b) == 1) return ModuliSet({a, b});
      // Products only grow with b; the first coprime b wins for this a.
      break;
    }
  }
}

namespace {

bool is_supported(Opcode op) {
  switch (op) {
    case Opcode::kAdd:
    case Opcode::kSub:
    case Opcode::kMul:
    case Opcode::kEq:
    case Opcode::kNe:
      return true;
    default:
      return false;
  }
}

std::string_view intrinsic_for(Opcode op) {
  switch (op) {
    case Opcode::kAdd: return "rnc.add";
    case Opcode::kSub: return "rnc.sub";
    case Opcode::kMul: return "rnc.mul";
    case Opcode::kEq: return "rnc.eq";
    case Opcode::kNe: return "rnc.ne";
    default: return "";
  }
}

class FunctionRewriter {
 public:
  FunctionRewriter(const Function& f, const TaintSet& tainted,
                   const ModuliSet& ms, Rng& rng)
      : tainted_(tainted), ms_(ms), rng_(rng) {
    for (const Param& p : f.params) used_names_.insert(p.name);
    for (const Instr& i : f.body) {
      if (!i.result.empty()) used_names_.insert(i.result);
    }
  }

  Function run(const Function& f) {
    Function out;
    out.name = f.name;
    out.params = f.params;
    for (const Instr& instr : f.body) rewrite(instr, out.body);
    return out;
  }

 private:
  bool operand_tainted(const Operand& op) const {
    return op.is_name() && tainted_.contains(op.name);
  }

  std::string fresh_name(const std::string& base) {
    if (used_names_.insert(base).second) return base;
    for (int i = 1;; ++i) {
      std::string candidate = base + "." + std::to_string(i);
      if (used_names_.insert(candidate).second) return candidate;
    }
  }

  // Component literals of a compile-time-encoded constant: residues with a
  // compile-time random multiple shift. Multipliers start at 1 so a small
  // constant never survives as its own residue literal.
  std::vector<Operand> compile_time_components(std::uint64_t value) {
    std::vector<Operand> comps;
    for (std::uint64_t m : ms_.moduli()) {
      const std::uint64_t r = 1 + rng_() % (kShiftMultiplierBound - 1);
      comps.push_back(Operand::of_imm(value % m + r * m));
    }
    return comps;
  }

  Instr const_intrinsic(std::string name, Type type, std::uint64_t value) {
    Instr instr;
    instr.result = std::move(name);
    instr.op = Opcode::kCall;
    instr.type = type;
    instr.callee = "rnc.const";
    instr.args = compile_time_components(value);
    return instr;
  }

  // Returns an operand naming an encoded value, inserting @rnc.encode or a
  // compile-time @rnc.const as needed. Plain values are re-encoded at every
  // consuming op; constants share one encoded twin.
  Operand ensure_encoded(const Operand& op, Type type,
                         std::vector<Instr>& out) {
    if (!op.is_name()) {
      const auto key = std::make_pair(op.imm, type);
      const auto it = imm_twins_.find(key);
      if (it != imm_twins_.end()) return Operand::of_name(it->second);
      std::string name = fresh_name("c" + std::to_string(op.imm) + "_e");
      out.push_back(const_intrinsic(name, type, op.imm));
      encoded_.insert(name);
      imm_twins_.emplace(key, name);
      return Operand::of_name(name);
    }
    const std::string current = resolve(op.name);
    if (encoded_.contains(current)) return Operand::of_name(current);
    const auto known = const_values_.find(op.name);
    if (known != const_values_.end()) {
      const auto twin = const_twins_.find(op.name);
      if (twin != const_twins_.end()) return Operand::of_name(twin->second);
      std::string name = fresh_name(op.name + "_e");
      out.push_back(const_intrinsic(name, type, known->second));
      const_twins_.emplace(op.name, name);
      encoded_.insert(name);
      return Operand::of_name(name);
    }
    std::string name = fresh_name(op.name + "_e");
    Instr enc;
    enc.result = name;
    enc.op = Opcode::kCall;
    enc.type = type;
    enc.callee = "rnc.encode";
    enc.args.push_back(Operand::of_name(current));
    out.push_back(std::move(enc));
    encoded_.insert(name);
    return Operand::of_name(name);
  }

  // Returns an operand naming a plain value, inserting @rnc.decode when the
  // current representation is encoded.
  Operand ensure_plain(const Operand& op, Type type,
                       std::vector<Instr>& out) {
    if (!op.is_name()) return op;
    const std::string current = resolve(op.name);
    if (!encoded_.contains(current)) return Operand::of_name(current);
    std::string name = fresh_name(op.name + "_d");
    Instr dec;
    dec.result = name;
    dec.op = Opcode::kCall;
    dec.type = type;
    dec.callee = "rnc.decode";
    dec.args.push_back(Operand::of_name(current));
    out.push_back(std::move(dec));
    return Operand::of_name(name);
  }

  std::string resolve(const std::string& name) const {
    const auto it = aliases_.find(name);
    return it == aliases_.end() ? name : it->second;
  }

  void rewrite(const Instr& instr, std::vector<Instr>& out) {
    if (instr.op == Opcode::kConst) {
      if (tainted_.contains(instr.result)) {
        std::string name = fresh_name(instr.result + "_e");
        out.push_back(const_intrinsic(name, instr.type, instr.args[0].imm));
        aliases_[instr.result] = name;
        encoded_.insert(name);
        return;
      }
      const_values_[instr.result] = instr.args[0].imm;
      out.push_back(instr);
      return;
    }

    if (instr.op == Opcode::kRet) {
      Instr ret = instr;
      ret.args[0] = ensure_plain(ret.args[0], ret.type, out);
      out.push_back(std::move(ret));
      return;
    }

    const bool touches_taint =
        (!instr.result.empty() && tainted_.contains(instr.result)) ||
        std::any_of(instr.args.begin(), instr.args.end(),
                    [&](const Operand& op) { return operand_tainted(op); });

    if (is_supported(instr.op) && touches_taint) {
      Instr call;
      call.result = instr.result;
      call.op = Opcode::kCall;
      call.type = instr.type;
      call.callee = std::string(intrinsic_for(instr.op));
      for (const Operand& op : instr.args) {
        call.args.push_back(ensure_encoded(op, instr.type, out));
      }
      out.push_back(std::move(call));
      // eq/ne come back as plain booleans; the arithmetic intrinsics keep
      // the value encoded.
      if (instr.op != Opcode::kEq && instr.op != Opcode::kNe) {
        encoded_.insert(instr.result);
      }
      return;
    }

    // Everything else (including ops with no tainted value and ops the pass
    // does not support) runs in plain form; encoded operands are decoded
    // first to preserve the program's behavior.
    Instr plain = instr;
    for (Operand& op : plain.args) {
      op = ensure_plain(op, instr.type, out);
    }
    out.push_back(std::move(plain));
  }

  const TaintSet& tainted_;
  const ModuliSet& ms_;
  Rng& rng_;
  std::unordered_set<std::string> used_names_;
  std::unordered_set<std::string> encoded_;
  std::unordered_map<std::string, std::string> aliases_;
  std::unordered_map<std::string, std::uint64_t> const_values_;
  std::unordered_map<std::string, std::string> const_twins_;
  std::map<std::pair<std::uint64_t, Type>, std::string> imm_twins_;
};

}  // namespace

Module transform(const Module& m, const ModuliSet& ms, Rng& rng) {
  for (const Function& f : m.functions) {
    for (const Instr& instr : f.body) {
      if (instr.type != Type::kU8 && instr.type != Type::kU32) {
        throw UnsupportedTypeError("only integer types are supported");
      }
    }
  }
  Module out;
  for (const Function& f : m.functions) {
    const TaintSet tainted = taint_function(f);
    FunctionRewriter rewriter(f, tainted, ms, rng);
    out.functions.push_back(rewriter.run(f));
  }
  return out;
}

std::string write_transformed(const Module& transformed, std::uint64_t seed,
                              const ModuliSet& ms) {
  std::ostringstream out;
  out << "; transform seed: " << seed << '\n';
  out << "; moduli:";
  for (std::size_t i = 0; i < ms.count(); ++i) {
    out << (i == 0 ? " " : ", ") << ms.modulus(i);
  }
  out << "\n\n";
  out << print_module(transformed);
  return out.str();
}

}  // namespace rnc::ir
