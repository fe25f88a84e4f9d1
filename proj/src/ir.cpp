#include "rnc/ir.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace rnc::ir {

std::string_view type_name(Type t) { return t == Type::kU8 ? "u8" : "u32"; }

std::uint64_t type_mask(Type t) {
  return t == Type::kU8 ? 0xFFull : 0xFFFFFFFFull;
}

unsigned type_bits(Type t) { return t == Type::kU8 ? 8 : 32; }

std::string_view opcode_name(Opcode op) {
  switch (op) {
    case Opcode::kConst: return "const";
    case Opcode::kAdd: return "add";
    case Opcode::kSub: return "sub";
    case Opcode::kMul: return "mul";
    case Opcode::kEq: return "eq";
    case Opcode::kNe: return "ne";
    case Opcode::kDiv: return "div";
    case Opcode::kXor: return "xor";
    case Opcode::kShl: return "shl";
    case Opcode::kRet: return "ret";
    case Opcode::kCall: return "call";
  }
  return "?";
}

const Function* Module::find(std::string_view name) const {
  for (const Function& f : functions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

bool is_intrinsic(std::string_view callee) {
  static const std::set<std::string_view> kNames = {
      "rnc.encode", "rnc.decode", "rnc.const", "rnc.add",
      "rnc.sub",    "rnc.mul",    "rnc.eq",    "rnc.ne",
  };
  return kNames.contains(callee);
}

namespace {

struct Token {
  enum class Kind {
    kWord,    // bare identifier / keyword
    kName,    // %ident
    kGlobal,  // @ident
    kInt,
    kPunct,  // single char: ( ) { } , : =
    kEnd,
  };
  Kind kind = Kind::kEnd;
  std::string text;
  std::uint64_t value = 0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  static bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           c == '.';
  }

  void advance() {
    skip_space_and_comments();
    current_ = Token{};
    current_.line = line_;
    current_.col = col_;
    if (pos_ >= text_.size()) {
      current_.kind = Token::Kind::kEnd;
      return;
    }
    const char c = text_[pos_];
    if (c == '%' || c == '@') {
      const int start_col = col_;
      consume();
      if (pos_ >= text_.size() || !ident_start(text_[pos_])) {
        throw SyntaxError("expected identifier after '" + std::string(1, c) +
                              "'",
                          line_, start_col);
      }
      std::string name;
      while (pos_ < text_.size() && ident_char(text_[pos_])) {
        name.push_back(text_[pos_]);
        consume();
      }
      current_.kind = c == '%' ? Token::Kind::kName : Token::Kind::kGlobal;
      current_.text = std::move(name);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits.push_back(text_[pos_]);
        consume();
      }
      std::uint64_t v = 0;
      const auto res =
          std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (res.ec != std::errc{}) {
        throw SyntaxError("integer literal out of range", current_.line,
                          current_.col);
      }
      current_.kind = Token::Kind::kInt;
      current_.value = v;
      current_.text = std::move(digits);
      return;
    }
    if (ident_start(c)) {
      std::string word;
      while (pos_ < text_.size() && ident_char(text_[pos_])) {
        word.push_back(text_[pos_]);
        consume();
      }
      current_.kind = Token::Kind::kWord;
      current_.text = std::move(word);
      return;
    }
    if (std::string_view("(){},:=").find(c) != std::string_view::npos) {
      current_.kind = Token::Kind::kPunct;
      current_.text = std::string(1, c);
      consume();
      return;
    }
    throw SyntaxError("unexpected character '" + std::string(1, c) + "'",
                      line_, col_);
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') consume();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        consume();
      } else {
        break;
      }
    }
  }

  void consume() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token current_;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) {}

  Module parse() {
    Module m;
    std::set<std::string> function_names;
    while (lex_.peek().kind != Token::Kind::kEnd) {
      Function f = parse_function();
      if (!function_names.insert(f.name).second) {
        throw RedefinitionError("function @" + f.name + " redefined", 0, 0);
      }
      m.functions.push_back(std::move(f));
    }
    for (const Function& f : m.functions) validate_function(m, f);
    return m;
  }

 private:
  Token expect_word(std::string_view word) {
    Token t = lex_.take();
    if (t.kind != Token::Kind::kWord || t.text != word) {
      throw SyntaxError("expected '" + std::string(word) + "'", t.line,
                        t.col);
    }
    return t;
  }

  Token expect_punct(char c) {
    Token t = lex_.take();
    if (t.kind != Token::Kind::kPunct || t.text[0] != c) {
      throw SyntaxError("expected '" + std::string(1, c) + "'", t.line,
                        t.col);
    }
    return t;
  }

  Type parse_type() {
    Token t = lex_.take();
    if (t.kind == Token::Kind::kWord) {
      if (t.text == "u8") return Type::kU8;
      if (t.text == "u32") return Type::kU32;
    }
    throw SyntaxError("expected type u8 or u32", t.line, t.col);
  }

  Operand parse_operand() {
    Token t = lex_.take();
    if (t.kind == Token::Kind::kName) return Operand::of_name(t.text);
    if (t.kind == Token::Kind::kInt) return Operand::of_imm(t.value);
    throw SyntaxError("expected operand (%name or integer)", t.line, t.col);
  }

  Function parse_function() {
    expect_word("func");
    Token name = lex_.take();
    if (name.kind != Token::Kind::kGlobal) {
      throw SyntaxError("expected function name after 'func'", name.line,
                        name.col);
    }
    Function f;
    f.name = name.text;
    expect_punct('(');
    if (lex_.peek().kind != Token::Kind::kPunct ||
        lex_.peek().text[0] != ')') {
      while (true) {
        Token p = lex_.take();
        if (p.kind != Token::Kind::kName) {
          throw SyntaxError("expected parameter name", p.line, p.col);
        }
        expect_punct(':');
        f.params.push_back(Param{p.text, parse_type()});
        if (lex_.peek().kind == Token::Kind::kPunct &&
            lex_.peek().text[0] == ',') {
          lex_.take();
          continue;
        }
        break;
      }
    }
    expect_punct(')');
    expect_punct('{');
    while (!(lex_.peek().kind == Token::Kind::kPunct &&
             lex_.peek().text[0] == '}')) {
      f.body.push_back(parse_instr());
    }
    lex_.take();  // '}'
    return f;
  }

  static Opcode opcode_from_word(const Token& t) {
    static const std::map<std::string_view, Opcode> kOps = {
        {"const", Opcode::kConst}, {"add", Opcode::kAdd},
        {"sub", Opcode::kSub},     {"mul", Opcode::kMul},
        {"eq", Opcode::kEq},       {"ne", Opcode::kNe},
        {"div", Opcode::kDiv},     {"xor", Opcode::kXor},
        {"shl", Opcode::kShl},     {"ret", Opcode::kRet},
        {"call", Opcode::kCall},
    };
    const auto it = kOps.find(t.text);
    if (t.kind != Token::Kind::kWord || it == kOps.end()) {
      throw SyntaxError("unknown opcode '" + t.text + "'", t.line, t.col);
    }
    return it->second;
  }

  Instr parse_instr() {
    Token first = lex_.take();
    Instr instr;
    instr.line = first.line;
    if (first.kind == Token::Kind::kWord && first.text == "ret") {
      instr.op = Opcode::kRet;
      instr.type = parse_type();
      instr.args.push_back(parse_operand());
      return instr;
    }
    if (first.kind != Token::Kind::kName) {
      throw SyntaxError("expected '%name =' or 'ret'", first.line, first.col);
    }
    instr.result = first.text;
    expect_punct('=');
    Token opt = lex_.take();
    instr.op = opcode_from_word(opt);
    if (instr.op == Opcode::kRet) {
      throw SyntaxError("ret has no result name", opt.line, opt.col);
    }
    instr.type = parse_type();
    if (instr.op == Opcode::kCall) {
      Token callee = lex_.take();
      if (callee.kind != Token::Kind::kGlobal) {
        throw SyntaxError("expected callee after 'call'", callee.line,
                          callee.col);
      }
      instr.callee = callee.text;
      // Arguments run to the end of the statement: next statement starts
      // with %name= / ret / '}'.
      if (starts_operand()) {
        instr.args.push_back(parse_operand());
        while (lex_.peek().kind == Token::Kind::kPunct &&
               lex_.peek().text[0] == ',') {
          lex_.take();
          instr.args.push_back(parse_operand());
        }
      }
      return instr;
    }
    if (instr.op == Opcode::kConst) {
      Token lit = lex_.take();
      if (lit.kind != Token::Kind::kInt) {
        throw SyntaxError("const expects an integer literal", lit.line,
                          lit.col);
      }
      if (lit.value > type_mask(instr.type)) {
        throw SyntaxError("literal does not fit " +
                              std::string(type_name(instr.type)),
                          lit.line, lit.col);
      }
      instr.args.push_back(Operand::of_imm(lit.value));
      return instr;
    }
    instr.args.push_back(parse_operand());
    expect_punct(',');
    instr.args.push_back(parse_operand());
    return instr;
  }

  bool starts_operand() const {
    const Token& t = lex_.peek();
    return t.kind == Token::Kind::kName || t.kind == Token::Kind::kInt;
  }

  static void validate_function(const Module& m, const Function& f) {
    std::map<std::string, Type> defined;
    for (const Param& p : f.params) {
      if (defined.contains(p.name)) {
        throw RedefinitionError("parameter %" + p.name + " redefined", 0, 0);
      }
      defined[p.name] = p.type;
    }
    for (const Instr& instr : f.body) {
      for (std::size_t a = 0; a < instr.args.size(); ++a) {
        const Operand& op = instr.args[a];
        if (op.is_name()) {
          const auto it = defined.find(op.name);
          if (it == defined.end()) {
            throw UseBeforeDefError("%" + op.name + " used before definition",
                                    instr.line, 1);
          }
          // Intrinsic calls may mix widths (component words); every other
          // opcode requires operand types to match the instruction type.
          if (instr.op != Opcode::kCall && it->second != instr.type) {
            throw SyntaxError("%" + op.name + " has type " +
                                  std::string(type_name(it->second)) +
                                  ", expected " +
                                  std::string(type_name(instr.type)),
                              instr.line, 1);
          }
        } else if (instr.op != Opcode::kCall && instr.op != Opcode::kConst) {
          if (op.imm > type_mask(instr.type)) {
            throw SyntaxError("immediate does not fit " +
                                  std::string(type_name(instr.type)),
                              instr.line, 1);
          }
        }
      }
      if (instr.op == Opcode::kCall) {
        if (is_intrinsic(instr.callee)) {
          validate_intrinsic_arity(instr);
        } else if (instr.callee.starts_with("rnc.")) {
          throw SyntaxError("unknown intrinsic @" + instr.callee, instr.line,
                            1);
        } else {
          const Function* callee = m.find(instr.callee);
          if (callee == nullptr) {
            throw UseBeforeDefError("call to undefined function @" +
                                        instr.callee,
                                    instr.line, 1);
          }
          if (callee->params.size() != instr.args.size()) {
            throw SyntaxError("call to @" + instr.callee + " expects " +
                                  std::to_string(callee->params.size()) +
                                  " arguments",
                              instr.line, 1);
          }
        }
      }
      if (!instr.result.empty()) {
        if (defined.contains(instr.result)) {
          throw RedefinitionError("%" + instr.result + " redefined",
                                  instr.line, 1);
        }
        defined[instr.result] = instr.type;
      }
    }
  }

  static void validate_intrinsic_arity(const Instr& instr) {
    std::size_t expected = 0;
    if (instr.callee == "rnc.encode" || instr.callee == "rnc.decode") {
      expected = 1;
    } else if (instr.callee == "rnc.const") {
      return;  // one component per modulus, only known at run time
    } else {
      expected = 2;
    }
    if (instr.args.size() != expected) {
      throw SyntaxError("@" + instr.callee + " expects " +
                            std::to_string(expected) + " arguments",
                        instr.line, 1);
    }
  }

  Lexer lex_;
};

void print_operand(std::ostringstream& out, const Operand& op) {
  if (op.is_name()) {
    out << '%' << op.name;
  } else {
    out << op.imm;
  }
}

}  // namespace

Module parse_module(std::string_view text) { return Parser(text).parse(); }

std::string print_module(const Module& m) {
  std::ostringstream out;
  bool first = true;
  for (const Function& f : m.functions) {
    if (!first) out << '\n';
    first = false;
    out << "func @" << f.name << '(';
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      if (i > 0) out << ", ";
      out << '%' << f.params[i].name << ": " << type_name(f.params[i].type);
    }
    out << ") {\n";
    for (const Instr& instr : f.body) {
      out << "  ";
      if (instr.op == Opcode::kRet) {
        out << "ret " << type_name(instr.type) << ' ';
        print_operand(out, instr.args[0]);
        out << '\n';
        continue;
      }
      out << '%' << instr.result << " = " << opcode_name(instr.op) << ' '
          << type_name(instr.type);
      if (instr.op == Opcode::kCall) out << " @" << instr.callee;
      for (std::size_t a = 0; a < instr.args.size(); ++a) {
        out << (a == 0 ? " " : ", ");
        print_operand(out, instr.args[a]);
      }
      out << '\n';
    }
    out << "}\n";
  }
  return out.str();
}

}  // namespace rnc::ir
