#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "falseprop/netlist.hpp"

namespace fprop {

using Var = VarId;
using IndexSet = std::vector<std::size_t>;

/// A literal packed MiniSat style: index = 2 * var + negative.
class Lit {
 public:
  constexpr Lit() = default;
  constexpr Lit(Var v, bool negative) : code_(2 * v + (negative ? 1U : 0U)) {}

  static constexpr Lit pos(Var v) { return Lit(v, false); }
  static constexpr Lit neg(Var v) { return Lit(v, true); }
  static constexpr Lit fromIndex(std::uint32_t index) {
    Lit l;
    l.code_ = index;
    return l;
  }
  /// DIMACS literals are 1-based: variable v prints as v+1.
  static Lit fromDimacs(int d);

  constexpr Var var() const { return code_ >> 1; }
  constexpr bool negative() const { return code_ & 1U; }
  constexpr std::uint32_t index() const { return code_; }
  constexpr Lit operator~() const { return fromIndex(code_ ^ 1U); }
  int toDimacs() const { return negative() ? -static_cast<int>(var() + 1) : static_cast<int>(var() + 1); }

  /// True under `value` assigned to var().
  constexpr bool satisfiedBy(bool value) const { return value != negative(); }

  constexpr auto operator<=>(const Lit&) const = default;

 private:
  std::uint32_t code_ = 0;
};

/// Disjunction of literals over distinct variables.
struct Clause {
  std::vector<Lit> lits;
  std::optional<std::uint32_t> origin;  ///< gate group that produced the clause

  /// Drops repeated literals; returns nullopt for a tautology.
  static std::optional<Clause> make(std::vector<Lit> lits, std::optional<std::uint32_t> origin = std::nullopt);

  std::size_t size() const { return lits.size(); }
  bool empty() const { return lits.empty(); }
  bool contains(Lit l) const;
  bool mentions(Var v) const;
  /// Evaluates the clause under a full assignment indexed by variable.
  bool satisfiedBy(const Bits& assignment) const;
  /// Same literal set, ignoring order and origin.
  bool sameLiterals(const Clause& other) const;
  /// Literals sorted by variable then polarity.
  std::vector<Lit> sorted() const;
  /// True when every literal of this clause occurs in `other`.
  bool subsumes(const Clause& other) const;
};

std::string toString(const Clause& c);

enum class Role : std::uint8_t { Input, Internal, Output, State, NextState };

std::string_view roleTag(Role r);  // x y z s sn

/// Role, time frame and name of every variable. Each role keeps its own
/// ordered member list (inputs in circuit order, and so on).
class VarMap {
 public:
  VarMap() = default;

  std::size_t size() const { return roles_.size(); }
  Var addVar(Role role, std::uint32_t frame = 0, std::string name = {});
  void setRole(Var v, Role role);
  void setFrame(Var v, std::uint32_t frame) { frames_.at(v) = frame; }
  void setName(Var v, std::string name) { names_.at(v) = std::move(name); }

  Role role(Var v) const { return roles_.at(v); }
  std::uint32_t frame(Var v) const { return frames_.at(v); }
  /// Falls back to "v<dimacs id>" for unnamed variables.
  std::string name(Var v) const;
  bool hasName(Var v) const { return !names_.at(v).empty(); }
  std::optional<Var> findByName(std::string_view name) const;

  std::span<const Var> withRole(Role r) const { return byRole_[static_cast<std::size_t>(r)]; }
  std::span<const Var> inputs() const { return withRole(Role::Input); }
  std::span<const Var> outputs() const { return withRole(Role::Output); }

 private:
  std::vector<Role> roles_;
  std::vector<std::uint32_t> frames_;
  std::vector<std::string> names_;
  std::vector<Var> byRole_[5];
};

/// Clauses that encode one gate instance (per frame, once unrolled).
struct GateGroup {
  GateKind kind = GateKind::Buf;
  std::vector<Var> fanin;
  Var output = 0;
  std::uint32_t frame = 0;
  std::uint32_t circuitGate = 0;  ///< index into Circuit::gates()
  IndexSet clauses;
};

class CnfFormula {
 public:
  CnfFormula() = default;
  explicit CnfFormula(VarMap vars) : vars_(std::move(vars)) {}

  std::size_t numVars() const { return vars_.size(); }
  const VarMap& vars() const { return vars_; }
  VarMap& vars() { return vars_; }

  std::span<const Clause> clauses() const { return clauses_; }
  const Clause& clause(std::size_t i) const { return clauses_.at(i); }
  std::size_t size() const { return clauses_.size(); }

  std::size_t addClause(Clause c);

  std::span<const GateGroup> groups() const { return groups_; }
  const GateGroup& group(std::size_t g) const { return groups_.at(g); }
  std::size_t addGroup(GateGroup g);
  /// Group whose output variable is `v`, if any.
  std::optional<std::size_t> groupOfOutput(Var v) const;

  /// Vars(H): variables that occur in at least one clause, ascending.
  std::vector<Var> occurringVars() const;

  /// Formula restricted to the given clauses (same VarMap, no groups).
  CnfFormula subset(std::span<const std::size_t> indices) const;

 private:
  VarMap vars_;
  std::vector<Clause> clauses_;
  std::vector<GateGroup> groups_;
};

/// Tseitin clauses of a single gate: satisfied exactly by truth-table rows.
std::vector<Clause> encodeGate(const Gate& g);
std::vector<Clause> encodeGate(GateKind kind, std::span<const Var> fanin, Var output);

/// F = G_1 & ... & G_m with roles taken from the circuit. Z and S' are the
/// driving gates' own output variables.
CnfFormula encodeCircuit(const Circuit& c);

/// F* = G* & F' where F' = F \ G. F' keeps its relative order and comes
/// first; G* follows.
struct MutatedFormula {
  CnfFormula formula;
  IndexSet gStar;
  IndexSet fPrime;
  IndexSet fPrimeOrigin;  ///< index in the source formula of each F' clause
};

MutatedFormula replaceGroup(const CnfFormula& f, std::span<const std::size_t> group, std::span<const Clause> gStar);

class DimacsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// DIMACS CNF with `c role`, `c name`, `c frame`, `c gate` and `c group`
/// comment lines so that the variable map survives a round trip.
std::string exportDimacs(const CnfFormula& f);
CnfFormula importDimacs(std::string_view text);

}  // namespace fprop
