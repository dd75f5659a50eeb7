#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fprop {

/// Dense circuit signal identifier. Doubles as the CNF variable index.
using VarId = std::uint32_t;

using Bits = std::vector<bool>;

enum class GateKind : std::uint8_t { And, Or, Nand, Nor, Xor, Xnor, Not, Buf, Const0, Const1 };

inline constexpr GateKind kAllGateKinds[] = {GateKind::And,  GateKind::Or,    GateKind::Nand, GateKind::Nor,
                                             GateKind::Xor,  GateKind::Xnor,  GateKind::Not,  GateKind::Buf,
                                             GateKind::Const0, GateKind::Const1};

enum class Arity : std::uint8_t { Nullary, Unary, Nary };

Arity arityOf(GateKind kind);
std::string_view toString(GateKind kind);
std::optional<GateKind> parseGateKind(std::string_view text);

/// Truth-table semantics of a single gate.
bool evalGate(GateKind kind, const Bits& fanin);

struct Gate {
  GateKind kind = GateKind::Buf;
  std::vector<VarId> fanin;
  VarId output = 0;
};

enum class LatchInit : std::uint8_t { Zero, One, Free };

struct Latch {
  VarId state = 0;  ///< present-state signal
  VarId next = 0;   ///< signal driving the next state
  LatchInit init = LatchInit::Zero;
};

class NetlistError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public NetlistError {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Gate-level netlist. Immutable once built; gates are stored in
/// topological order.
class Circuit {
 public:
  Circuit() = default;

  const std::string& name() const { return name_; }
  std::size_t numVars() const { return names_.size(); }

  std::span<const VarId> inputs() const { return inputs_; }
  std::span<const VarId> outputs() const { return outputs_; }
  std::span<const Latch> latches() const { return latches_; }
  std::span<const Gate> gates() const { return gates_; }

  bool isSequential() const { return !latches_.empty(); }

  const std::string& varName(VarId v) const { return names_.at(v); }
  std::optional<VarId> findVar(std::string_view name) const;

  /// Index (into gates()) of the gate driving `v`, if any.
  std::optional<std::size_t> driverOf(VarId v) const;
  /// Gate index looked up by the name of its output signal.
  std::optional<std::size_t> findGate(std::string_view outputName) const;

 private:
  friend class CircuitBuilder;

  std::string name_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, VarId> byName_;
  std::vector<VarId> inputs_;
  std::vector<VarId> outputs_;
  std::vector<Latch> latches_;
  std::vector<Gate> gates_;
  std::vector<std::int32_t> driver_;
};

/// Incremental construction of a Circuit. Names get ids in order of first
/// appearance; build() validates and sorts gates topologically.
class CircuitBuilder {
 public:
  explicit CircuitBuilder(std::string name = "top");

  VarId var(std::string_view name);
  bool hasVar(std::string_view name) const { return byName_.contains(std::string(name)); }

  void addInput(VarId v);
  void addOutput(VarId v);
  void addLatch(VarId state, VarId next, LatchInit init = LatchInit::Zero);
  void addGate(GateKind kind, std::vector<VarId> fanin, VarId output);

  /// Throws NetlistError on multiple drivers, undefined references,
  /// combinational cycles or arity violations. A latch whose next-state
  /// signal is not a dedicated gate output gets an implicit BUF.
  Circuit build() &&;

 private:
  std::string uniqueName(const std::string& base);

  std::string name_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, VarId> byName_;
  std::vector<VarId> inputs_;
  std::vector<VarId> outputs_;
  std::vector<Latch> latches_;
  std::vector<Gate> gates_;
};

enum class NetlistFormat : std::uint8_t { Simple, AigerAscii };

Circuit parseNetlist(std::string_view text, NetlistFormat format, std::string name = "top");
std::string emitNetlist(const Circuit& c, NetlistFormat format);

/// Reads a netlist file; the format follows the extension (.aag is AIGER).
Circuit readNetlistFile(const std::string& path);

struct SimResult {
  Bits outputs;
  Bits nextState;
};

/// Values of every signal, indexed by VarId.
Bits evaluate(const Circuit& c, const Bits& inputs, const Bits& state = {});
SimResult simulate(const Circuit& c, const Bits& inputs, const Bits& state = {});

/// Helpers for exhaustive enumeration: bit i of `row` is element i.
Bits bitsOf(std::uint64_t row, std::size_t width);
std::uint64_t rowOf(const Bits& bits);

}  // namespace fprop
