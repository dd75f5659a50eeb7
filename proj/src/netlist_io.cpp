// Simple-netlist and ASCII AIGER readers/writers.

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "falseprop/netlist.hpp"

namespace fprop {
namespace {

// ---------------------------------------------------------------------------
// Simple format

enum class Tok : std::uint8_t { Ident, Equals, LParen, RParen, Comma, Semi, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 0;
  std::size_t column = 0;
};

bool isIdentChar(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '$' || ch == '.' || ch == '[' ||
         ch == ']';
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size();) {
    char ch = text[i];
    if (ch == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++col;
      ++i;
      continue;
    }
    if (ch == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (isIdentChar(ch)) {
      std::size_t start = i;
      while (i < text.size() && isIdentChar(text[i])) ++i;
      t.kind = Tok::Ident;
      t.text = std::string(text.substr(start, i - start));
      col += i - start;
      out.push_back(std::move(t));
      continue;
    }
    switch (ch) {
      case '=': t.kind = Tok::Equals; break;
      case '(': t.kind = Tok::LParen; break;
      case ')': t.kind = Tok::RParen; break;
      case ',': t.kind = Tok::Comma; break;
      case ';': t.kind = Tok::Semi; break;
      default:
        throw ParseError(line, col, std::string("unexpected character '") + ch + "'");
    }
    t.text = std::string(1, ch);
    out.push_back(std::move(t));
    ++i;
    ++col;
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

class SimpleParser {
 public:
  SimpleParser(std::string_view text, std::string name) : toks_(tokenize(text)), builder_(std::move(name)) {}

  Circuit parse() {
    while (peek().kind != Tok::End) statement();
    return std::move(builder_).build();
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] void fail(const Token& t, const std::string& what) const {
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.line, t.column, what + ", found " + found);
  }

  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(peek(), std::string("expected ") + what);
    return take();
  }

  void statement() {
    const Token& head = peek();
    if (head.kind != Tok::Ident) fail(head, "expected a statement");
    bool isGate = peek(1).kind == Tok::Equals;
    if (!isGate && head.text == "input") {
      take();
      for (const std::string& n : nameList()) builder_.addInput(builder_.var(n));
    } else if (!isGate && head.text == "output") {
      take();
      for (const std::string& n : nameList()) builder_.addOutput(builder_.var(n));
    } else if (!isGate && head.text == "latch") {
      take();
      VarId q = builder_.var(expect(Tok::Ident, "latch state name").text);
      VarId d = builder_.var(expect(Tok::Ident, "latch next-state signal").text);
      LatchInit init = LatchInit::Zero;
      if (peek().kind == Tok::Ident && peek().text == "init") {
        take();
        const Token& v = expect(Tok::Ident, "init value");
        if (v.text == "0")
          init = LatchInit::Zero;
        else if (v.text == "1")
          init = LatchInit::One;
        else if (v.text == "x" || v.text == "X")
          init = LatchInit::Free;
        else
          fail(v, "expected init value 0, 1 or x");
      }
      expect(Tok::Semi, "';'");
      builder_.addLatch(q, d, init);
    } else if (isGate) {
      gate();
    } else {
      fail(head, "expected 'input', 'output', 'latch' or a gate assignment");
    }
  }

  std::vector<std::string> nameList() {
    std::vector<std::string> names;
    while (peek().kind == Tok::Ident) {
      names.push_back(take().text);
      if (peek().kind == Tok::Comma) take();
    }
    if (names.empty()) fail(peek(), "expected at least one signal name");
    expect(Tok::Semi, "';'");
    return names;
  }

  void gate() {
    const Token& out = take();
    take();  // '='
    const Token& kindTok = expect(Tok::Ident, "gate kind");
    auto kind = parseGateKind(kindTok.text);
    if (!kind) fail(kindTok, "unknown gate kind");
    expect(Tok::LParen, "'('");
    std::vector<VarId> fanin;
    if (peek().kind != Tok::RParen) {
      for (;;) {
        fanin.push_back(builder_.var(expect(Tok::Ident, "signal name").text));
        if (peek().kind != Tok::Comma) break;
        take();
      }
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Semi, "';'");
    VarId o = builder_.var(out.text);
    builder_.addGate(*kind, std::move(fanin), o);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  CircuitBuilder builder_;
};

// ---------------------------------------------------------------------------
// ASCII AIGER

class AigerParser {
 public:
  AigerParser(std::string_view text, std::string name) : builder_(std::move(name)) {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines_.emplace_back(line);
      start = end + 1;
    }
  }

  Circuit parse() {
    std::vector<unsigned> header = numbers(0, "aag");
    if (header.size() < 5) fail(0, "header needs M I L O A");
    for (std::size_t k = 5; k < header.size(); ++k)
      if (header[k] != 0) fail(0, "bad-state, constraint, justice and fairness sections are not supported");
    unsigned maxVar = header[0], ni = header[1], nl = header[2], no = header[3], na = header[4];
    std::size_t cursor = 1;
    auto nextLine = [&](const char* what) {
      if (cursor >= lines_.size()) fail(cursor, std::string("missing ") + what + " line");
      return cursor++;
    };

    std::vector<unsigned> inputLits, outputLits;
    struct RawLatch { unsigned lit, next; LatchInit init; };
    std::vector<RawLatch> latchLits;
    struct RawAnd { unsigned lhs, a, b; };
    std::vector<RawAnd> ands;
    for (unsigned k = 0; k < ni; ++k) {
      std::size_t ln = nextLine("input");
      auto v = numbers(ln);
      if (v.size() != 1 || v[0] < 2 || (v[0] & 1U)) fail(ln, "invalid input literal");
      inputLits.push_back(v[0]);
    }
    for (unsigned k = 0; k < nl; ++k) {
      std::size_t ln = nextLine("latch");
      auto v = numbers(ln);
      if (v.size() < 2 || v.size() > 3 || v[0] < 2 || (v[0] & 1U)) fail(ln, "invalid latch line");
      LatchInit init = LatchInit::Zero;
      if (v.size() == 3) {
        if (v[2] == 0) init = LatchInit::Zero;
        else if (v[2] == 1) init = LatchInit::One;
        else if (v[2] == v[0]) init = LatchInit::Free;
        else fail(ln, "invalid latch init value");
      }
      latchLits.push_back({v[0], v[1], init});
    }
    for (unsigned k = 0; k < no; ++k) {
      std::size_t ln = nextLine("output");
      auto v = numbers(ln);
      if (v.size() != 1) fail(ln, "invalid output line");
      outputLits.push_back(v[0]);
    }
    for (unsigned k = 0; k < na; ++k) {
      std::size_t ln = nextLine("AND");
      auto v = numbers(ln);
      if (v.size() != 3 || v[0] < 2 || (v[0] & 1U)) fail(ln, "invalid AND line");
      ands.push_back({v[0], v[1], v[2]});
    }

    std::map<std::pair<char, unsigned>, std::string> symbols;
    for (; cursor < lines_.size(); ++cursor) {
      const std::string& l = lines_[cursor];
      if (l.empty()) continue;
      if (l[0] == 'c') break;
      if (l[0] != 'i' && l[0] != 'l' && l[0] != 'o') fail(cursor, "invalid symbol table entry");
      std::size_t sp = l.find(' ');
      if (sp == std::string::npos || sp < 2) fail(cursor, "invalid symbol table entry");
      unsigned idx = 0;
      try {
        idx = static_cast<unsigned>(std::stoul(l.substr(1, sp - 1)));
      } catch (const std::exception&) {
        fail(cursor, "invalid symbol index");
      }
      symbols[{l[0], idx}] = l.substr(sp + 1);
    }
    std::set<std::string> taken;
    for (auto& [key, n] : symbols) taken.insert(n);
    auto fresh = [&](std::string base) {
      std::string n = base;
      for (int k = 1; taken.contains(n); ++k) n = base + "_" + std::to_string(k);
      taken.insert(n);
      return n;
    };
    auto symbolOr = [&](char kind, unsigned idx, const std::string& fallback) {
      auto it = symbols.find({kind, idx});
      return it != symbols.end() ? it->second : fresh(fallback);
    };

    std::vector<int> kindOf(maxVar + 1, 0);  // 1 input, 2 latch, 3 and
    auto claim = [&](unsigned lit, int kind, std::size_t ln) {
      unsigned v = lit >> 1;
      if (v > maxVar) fail(ln, "literal exceeds maximum variable index");
      if (kindOf[v] != 0) fail(ln, "variable defined twice");
      kindOf[v] = kind;
    };
    for (unsigned k = 0; k < ni; ++k) claim(inputLits[k], 1, 1 + k);
    for (unsigned k = 0; k < nl; ++k) claim(latchLits[k].lit, 2, 1 + ni + k);
    for (unsigned k = 0; k < na; ++k) claim(ands[k].lhs, 3, 1 + ni + nl + no + k);

    // An AND whose positive literal is an output takes the output's name.
    std::vector<std::string> baseName(maxVar + 1);
    std::vector<bool> outputDirect(no, false);
    std::set<unsigned> directVars;
    for (unsigned k = 0; k < no; ++k) {
      unsigned lit = outputLits[k], v = lit >> 1;
      if (v > maxVar) fail(1 + ni + nl + k, "output literal exceeds maximum variable index");
      if (!(lit & 1U) && kindOf[v] == 3 && !directVars.contains(v)) {
        directVars.insert(v);
        outputDirect[k] = true;
        baseName[v] = symbolOr('o', k, "o" + std::to_string(k));
      }
    }

    for (unsigned k = 0; k < ni; ++k) {
      unsigned v = inputLits[k] >> 1;
      baseName[v] = symbolOr('i', k, "i" + std::to_string(k));
      builder_.addInput(builder_.var(baseName[v]));
    }
    for (unsigned k = 0; k < nl; ++k) {
      unsigned v = latchLits[k].lit >> 1;
      baseName[v] = symbolOr('l', k, "l" + std::to_string(k));
      builder_.var(baseName[v]);
    }
    for (const RawAnd& a : ands) {
      unsigned v = a.lhs >> 1;
      if (baseName[v].empty()) baseName[v] = fresh("n" + std::to_string(v));
    }

    std::map<unsigned, VarId> litSignal;
    auto signal = [&](unsigned lit, std::size_t ln) -> VarId {
      if (auto it = litSignal.find(lit); it != litSignal.end()) return it->second;
      unsigned v = lit >> 1;
      if (v > maxVar) fail(ln, "literal exceeds maximum variable index");
      VarId s;
      if (v == 0) {
        s = builder_.var(fresh(lit ? "const1" : "const0"));
        builder_.addGate(lit ? GateKind::Const1 : GateKind::Const0, {}, s);
      } else if (kindOf[v] == 0) {
        fail(ln, "literal " + std::to_string(lit) + " is undefined");
      } else if (!(lit & 1U)) {
        s = builder_.var(baseName[v]);
      } else {
        VarId base = builder_.var(baseName[v]);
        s = builder_.var(fresh(baseName[v] + "_n"));
        builder_.addGate(GateKind::Not, {base}, s);
      }
      litSignal.emplace(lit, s);
      return s;
    };

    for (unsigned k = 0; k < na; ++k) {
      std::size_t ln = 1 + ni + nl + no + k;
      const RawAnd& a = ands[k];
      VarId out = builder_.var(baseName[a.lhs >> 1]);
      VarId x = signal(a.a, ln), y = signal(a.b, ln);
      builder_.addGate(GateKind::And, {x, y}, out);
    }
    for (unsigned k = 0; k < nl; ++k) {
      VarId q = builder_.var(baseName[latchLits[k].lit >> 1]);
      builder_.addLatch(q, signal(latchLits[k].next, 1 + ni + k), latchLits[k].init);
    }
    for (unsigned k = 0; k < no; ++k) {
      std::size_t ln = 1 + ni + nl + k;
      unsigned lit = outputLits[k];
      if (outputDirect[k]) {
        builder_.addOutput(builder_.var(baseName[lit >> 1]));
        continue;
      }
      std::string n = symbolOr('o', k, "o" + std::to_string(k));
      VarId out = builder_.var(n);
      if ((lit >> 1) != 0 && (lit & 1U)) {
        builder_.addGate(GateKind::Not, {signal(lit ^ 1U, ln)}, out);
      } else {
        builder_.addGate(GateKind::Buf, {signal(lit, ln)}, out);
      }
      builder_.addOutput(out);
    }
    return std::move(builder_).build();
  }

 private:
  [[noreturn]] void fail(std::size_t lineIdx, const std::string& what) const {
    throw ParseError(lineIdx + 1, 1, what);
  }

  std::vector<unsigned> numbers(std::size_t lineIdx, const char* magic = nullptr) const {
    if (lineIdx >= lines_.size()) fail(lineIdx, "unexpected end of file");
    std::istringstream in(lines_[lineIdx]);
    if (magic) {
      std::string m;
      in >> m;
      if (m != magic) fail(lineIdx, std::string("expected '") + magic + "' header (only ASCII AIGER is supported)");
    }
    std::vector<unsigned> out;
    std::string word;
    while (in >> word) {
      if (word.empty() || !std::all_of(word.begin(), word.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        fail(lineIdx, "expected unsigned integer, found '" + word + "'");
      out.push_back(static_cast<unsigned>(std::stoul(word)));
    }
    return out;
  }

  std::vector<std::string> lines_;
  CircuitBuilder builder_;
};

std::string emitSimple(const Circuit& c) {
  std::ostringstream os;
  os << "# circuit " << c.name() << "\n";
  auto list = [&](const char* kw, std::span<const VarId> vars) {
    if (vars.empty()) return;
    os << kw;
    for (VarId v : vars) os << ' ' << c.varName(v);
    os << ";\n";
  };
  list("input", c.inputs());
  list("output", c.outputs());
  for (const Latch& l : c.latches()) {
    os << "latch " << c.varName(l.state) << ' ' << c.varName(l.next) << " init "
       << (l.init == LatchInit::Zero ? "0" : l.init == LatchInit::One ? "1" : "x") << ";\n";
  }
  for (const Gate& g : c.gates()) {
    os << c.varName(g.output) << " = " << toString(g.kind) << '(';
    for (std::size_t i = 0; i < g.fanin.size(); ++i) os << (i ? ", " : "") << c.varName(g.fanin[i]);
    os << ");\n";
  }
  return os.str();
}

std::string emitAiger(const Circuit& c) {
  std::vector<unsigned> lit(c.numVars(), 0);
  unsigned nextVar = 1;
  for (VarId v : c.inputs()) lit[v] = 2 * nextVar++;
  for (const Latch& l : c.latches()) lit[l.state] = 2 * nextVar++;
  std::vector<std::array<unsigned, 3>> ands;
  auto mkAnd = [&](unsigned a, unsigned b) {
    if (a == 0 || b == 0) return 0U;
    if (a == 1) return b;
    if (b == 1) return a;
    unsigned o = 2 * nextVar++;
    ands.push_back({o, a, b});
    return o;
  };
  auto andAll = [&](const std::vector<unsigned>& in) {
    unsigned acc = in[0];
    for (std::size_t i = 1; i < in.size(); ++i) acc = mkAnd(acc, in[i]);
    return acc;
  };
  for (const Gate& g : c.gates()) {
    std::vector<unsigned> in, inv;
    for (VarId v : g.fanin) {
      in.push_back(lit[v]);
      inv.push_back(lit[v] ^ 1U);
    }
    unsigned o = 0;
    switch (g.kind) {
      case GateKind::And: o = andAll(in); break;
      case GateKind::Nand: o = andAll(in) ^ 1U; break;
      case GateKind::Or: o = andAll(inv) ^ 1U; break;
      case GateKind::Nor: o = andAll(inv); break;
      case GateKind::Xor:
      case GateKind::Xnor: {
        unsigned acc = in[0];
        for (std::size_t i = 1; i < in.size(); ++i) {
          unsigned p = mkAnd(acc, in[i] ^ 1U), q = mkAnd(acc ^ 1U, in[i]);
          acc = mkAnd(p ^ 1U, q ^ 1U) ^ 1U;
        }
        o = g.kind == GateKind::Xor ? acc : acc ^ 1U;
        break;
      }
      case GateKind::Not: o = in[0] ^ 1U; break;
      case GateKind::Buf: o = in[0]; break;
      case GateKind::Const0: o = 0; break;
      case GateKind::Const1: o = 1; break;
    }
    lit[g.output] = o;
  }
  std::ostringstream os;
  os << "aag " << nextVar - 1 << ' ' << c.inputs().size() << ' ' << c.latches().size() << ' ' << c.outputs().size()
     << ' ' << ands.size() << '\n';
  for (VarId v : c.inputs()) os << lit[v] << '\n';
  for (const Latch& l : c.latches()) {
    os << lit[l.state] << ' ' << lit[l.next];
    if (l.init == LatchInit::One) os << " 1";
    if (l.init == LatchInit::Free) os << ' ' << lit[l.state];
    os << '\n';
  }
  for (VarId v : c.outputs()) os << lit[v] << '\n';
  for (auto& a : ands) os << a[0] << ' ' << a[1] << ' ' << a[2] << '\n';
  for (std::size_t i = 0; i < c.inputs().size(); ++i) os << 'i' << i << ' ' << c.varName(c.inputs()[i]) << '\n';
  for (std::size_t i = 0; i < c.latches().size(); ++i) os << 'l' << i << ' ' << c.varName(c.latches()[i].state) << '\n';
  for (std::size_t i = 0; i < c.outputs().size(); ++i) os << 'o' << i << ' ' << c.varName(c.outputs()[i]) << '\n';
  return os.str();
}

}  // namespace

Circuit parseNetlist(std::string_view text, NetlistFormat format, std::string name) {
  if (format == NetlistFormat::AigerAscii) return AigerParser(text, std::move(name)).parse();
  return SimpleParser(text, std::move(name)).parse();
}

std::string emitNetlist(const Circuit& c, NetlistFormat format) {
  return format == NetlistFormat::AigerAscii ? emitAiger(c) : emitSimple(c);
}

}  // namespace fprop
