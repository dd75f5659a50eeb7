#include "falseprop/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace fprop {

Arity arityOf(GateKind kind) {
  switch (kind) {
    case GateKind::Const0:
    case GateKind::Const1:
      return Arity::Nullary;
    case GateKind::Not:
    case GateKind::Buf:
      return Arity::Unary;
    default:
      return Arity::Nary;
  }
}

std::string_view toString(GateKind kind) {
  switch (kind) {
    case GateKind::And: return "AND";
    case GateKind::Or: return "OR";
    case GateKind::Nand: return "NAND";
    case GateKind::Nor: return "NOR";
    case GateKind::Xor: return "XOR";
    case GateKind::Xnor: return "XNOR";
    case GateKind::Not: return "NOT";
    case GateKind::Buf: return "BUF";
    case GateKind::Const0: return "CONST0";
    case GateKind::Const1: return "CONST1";
  }
  return "?";
}

std::optional<GateKind> parseGateKind(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  for (GateKind k : kAllGateKinds)
    if (toString(k) == upper) return k;
  return std::nullopt;
}

bool evalGate(GateKind kind, const Bits& in) {
  switch (kind) {
    case GateKind::And:
      return std::all_of(in.begin(), in.end(), [](bool b) { return b; });
    case GateKind::Nand:
      return !std::all_of(in.begin(), in.end(), [](bool b) { return b; });
    case GateKind::Or:
      return std::any_of(in.begin(), in.end(), [](bool b) { return b; });
    case GateKind::Nor:
      return !std::any_of(in.begin(), in.end(), [](bool b) { return b; });
    case GateKind::Xor:
    case GateKind::Xnor: {
      bool parity = false;
      for (bool b : in) parity ^= b;
      return kind == GateKind::Xor ? parity : !parity;
    }
    case GateKind::Not: return !in.at(0);
    case GateKind::Buf: return in.at(0);
    case GateKind::Const0: return false;
    case GateKind::Const1: return true;
  }
  return false;
}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : NetlistError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

std::optional<VarId> Circuit::findVar(std::string_view name) const {
  auto it = byName_.find(std::string(name));
  if (it == byName_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Circuit::driverOf(VarId v) const {
  if (v >= driver_.size() || driver_[v] < 0) return std::nullopt;
  return static_cast<std::size_t>(driver_[v]);
}

std::optional<std::size_t> Circuit::findGate(std::string_view outputName) const {
  auto v = findVar(outputName);
  if (!v) return std::nullopt;
  return driverOf(*v);
}

// ---------------------------------------------------------------------------
// CircuitBuilder

CircuitBuilder::CircuitBuilder(std::string name) : name_(std::move(name)) {}

VarId CircuitBuilder::var(std::string_view name) {
  std::string key(name);
  if (auto it = byName_.find(key); it != byName_.end()) return it->second;
  auto id = static_cast<VarId>(names_.size());
  names_.push_back(key);
  byName_.emplace(std::move(key), id);
  return id;
}

void CircuitBuilder::addInput(VarId v) { inputs_.push_back(v); }
void CircuitBuilder::addOutput(VarId v) { outputs_.push_back(v); }
void CircuitBuilder::addLatch(VarId state, VarId next, LatchInit init) { latches_.push_back({state, next, init}); }
void CircuitBuilder::addGate(GateKind kind, std::vector<VarId> fanin, VarId output) {
  gates_.push_back({kind, std::move(fanin), output});
}

std::string CircuitBuilder::uniqueName(const std::string& base) {
  if (!byName_.contains(base)) return base;
  for (int k = 1;; ++k) {
    std::string candidate = base + std::to_string(k);
    if (!byName_.contains(candidate)) return candidate;
  }
}

Circuit CircuitBuilder::build() && {
  enum class Def : std::uint8_t { None, Input, State, Gate };
  std::vector<Def> def(names_.size(), Def::None);
  std::vector<std::int32_t> driver(names_.size(), -1);

  auto define = [&](VarId v, Def how) {
    if (def[v] != Def::None) throw NetlistError("multiple drivers for signal '" + names_[v] + "'");
    def[v] = how;
  };
  for (VarId v : inputs_) define(v, Def::Input);
  for (const Latch& l : latches_) define(l.state, Def::State);
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    const Gate& g = gates_[i];
    std::size_t n = g.fanin.size();
    switch (arityOf(g.kind)) {
      case Arity::Nullary:
        if (n != 0) throw NetlistError("gate '" + names_[g.output] + "': " + std::string(toString(g.kind)) + " takes no inputs");
        break;
      case Arity::Unary:
        if (n != 1) throw NetlistError("gate '" + names_[g.output] + "': " + std::string(toString(g.kind)) + " takes exactly one input");
        break;
      case Arity::Nary:
        if (n < 2) throw NetlistError("gate '" + names_[g.output] + "': " + std::string(toString(g.kind)) + " needs at least two inputs");
        break;
    }
    define(g.output, Def::Gate);
    driver[g.output] = static_cast<std::int32_t>(i);
  }
  for (VarId v = 0; v < names_.size(); ++v)
    if (def[v] == Def::None) throw NetlistError("undefined signal '" + names_[v] + "'");

  std::vector<bool> seenOutput(names_.size(), false);
  for (VarId v : outputs_) {
    if (seenOutput[v]) throw NetlistError("signal '" + names_[v] + "' declared as output twice");
    seenOutput[v] = true;
    if (def[v] != Def::Gate) throw NetlistError("output '" + names_[v] + "' must be driven by a gate");
  }

  // Each latch needs a next-state signal of its own: a gate output that is
  // neither a primary output nor shared with another latch.
  std::vector<bool> isOutput(names_.size(), false);
  for (VarId v : outputs_) isOutput[v] = true;
  std::vector<bool> usedAsNext(names_.size(), false);
  for (Latch& l : latches_) {
    if (def[l.next] != Def::Gate || isOutput[l.next] || usedAsNext[l.next]) {
      VarId buf = var(uniqueName(names_[l.state] + "$next"));
      def.push_back(Def::Gate);
      driver.push_back(static_cast<std::int32_t>(gates_.size()));
      isOutput.push_back(false);
      usedAsNext.push_back(false);
      gates_.push_back({GateKind::Buf, {l.next}, buf});
      l.next = buf;
    }
    usedAsNext[l.next] = true;
  }

  // Topological order by DFS in declaration order.
  std::vector<std::uint8_t> mark(gates_.size(), 0);
  std::vector<std::size_t> order;
  order.reserve(gates_.size());
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t root = 0; root < gates_.size(); ++root) {
    if (mark[root]) continue;
    stack.push_back({root, 0});
    mark[root] = 1;
    while (!stack.empty()) {
      auto& [gi, next] = stack.back();
      if (next < gates_[gi].fanin.size()) {
        VarId in = gates_[gi].fanin[next++];
        std::int32_t d = driver[in];
        if (d < 0) continue;
        if (mark[d] == 1) throw NetlistError("combinational cycle through signal '" + names_[in] + "'");
        if (mark[d] == 0) {
          mark[d] = 1;
          stack.push_back({static_cast<std::size_t>(d), 0});
        }
      } else {
        mark[gi] = 2;
        order.push_back(gi);
        stack.pop_back();
      }
    }
  }

  Circuit c;
  c.name_ = std::move(name_);
  c.names_ = std::move(names_);
  c.byName_ = std::move(byName_);
  c.inputs_ = std::move(inputs_);
  c.outputs_ = std::move(outputs_);
  c.latches_ = std::move(latches_);
  c.gates_.reserve(order.size());
  c.driver_.assign(c.names_.size(), -1);
  for (std::size_t gi : order) {
    c.driver_[gates_[gi].output] = static_cast<std::int32_t>(c.gates_.size());
    c.gates_.push_back(std::move(gates_[gi]));
  }
  return c;
}

// ---------------------------------------------------------------------------
// Simulation

Bits evaluate(const Circuit& c, const Bits& inputs, const Bits& state) {
  if (inputs.size() != c.inputs().size())
    throw std::invalid_argument("expected " + std::to_string(c.inputs().size()) + " input values, got " +
                                std::to_string(inputs.size()));
  if (state.size() != c.latches().size())
    throw std::invalid_argument("expected " + std::to_string(c.latches().size()) + " state values, got " +
                                std::to_string(state.size()));
  Bits value(c.numVars(), false);
  for (std::size_t i = 0; i < inputs.size(); ++i) value[c.inputs()[i]] = inputs[i];
  for (std::size_t i = 0; i < state.size(); ++i) value[c.latches()[i].state] = state[i];
  Bits fanin;
  for (const Gate& g : c.gates()) {
    fanin.clear();
    for (VarId v : g.fanin) fanin.push_back(value[v]);
    value[g.output] = evalGate(g.kind, fanin);
  }
  return value;
}

SimResult simulate(const Circuit& c, const Bits& inputs, const Bits& state) {
  Bits value = evaluate(c, inputs, state);
  SimResult r;
  for (VarId v : c.outputs()) r.outputs.push_back(value[v]);
  for (const Latch& l : c.latches()) r.nextState.push_back(value[l.next]);
  return r;
}

Bits bitsOf(std::uint64_t row, std::size_t width) {
  Bits b(width);
  for (std::size_t i = 0; i < width; ++i) b[i] = (row >> i) & 1U;
  return b;
}

std::uint64_t rowOf(const Bits& bits) {
  std::uint64_t row = 0;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) row |= std::uint64_t{1} << i;
  return row;
}

Circuit readNetlistFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NetlistError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string stem = path;
  if (auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
  std::string ext;
  if (auto dot = stem.find_last_of('.'); dot != std::string::npos) {
    ext = stem.substr(dot);
    stem = stem.substr(0, dot);
  }
  NetlistFormat fmt = ext == ".aag" ? NetlistFormat::AigerAscii : NetlistFormat::Simple;
  return parseNetlist(buf.str(), fmt, stem);
}

}  // namespace fprop
