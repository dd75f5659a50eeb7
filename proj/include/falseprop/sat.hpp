#pragma once

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "falseprop/cnf.hpp"

namespace fprop {

enum class SatStatus : std::uint8_t { Sat, Unsat, Unknown };

struct SatResult {
  SatStatus status = SatStatus::Unknown;
  Bits model;              ///< total over the solver's variables when Sat
  std::vector<Lit> core;   ///< failed assumptions when Unsat

  bool sat() const { return status == SatStatus::Sat; }
  bool unsat() const { return status == SatStatus::Unsat; }
};

struct SolveLimits {
  std::optional<std::uint64_t> conflictBudget;  ///< per solve() call
};

struct SolverStats {
  std::uint64_t solves = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t restarts = 0;
};

/// Incremental CDCL solver: two watched literals, first-UIP learning,
/// VSIDS with lowest-index tie breaking, phase saving and Luby restarts.
/// Clauses may be added between solve() calls.
class Solver {
 public:
  explicit Solver(std::size_t numVars = 0);
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;
  Solver(Solver&&) noexcept;
  Solver& operator=(Solver&&) noexcept;
  ~Solver();

  std::size_t numVars() const;
  Var newVar();
  void ensureVars(std::size_t n);

  /// Returns false once the clause database is unsatisfiable at level 0.
  bool addClause(std::span<const Lit> lits);
  bool addClause(const Clause& c) { return addClause(c.lits); }
  void addFormula(const CnfFormula& f);
  void addClauses(const CnfFormula& f, std::span<const std::size_t> indices);

  SatResult solve(std::span<const Lit> assumptions = {}, SolveLimits limits = {});
  SatResult solve(std::initializer_list<Lit> assumptions) { return solve(std::span<const Lit>(assumptions.begin(), assumptions.size())); }

  const SolverStats& stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SatResult solve(const CnfFormula& f, std::span<const Lit> assumptions = {}, SolveLimits limits = {});

/// f => c, decided as UNSAT(f & ~c).
bool implies(const CnfFormula& f, const Clause& c);

/// A model of f falsifying clause `clause` of the property.
struct Breaker {
  Bits model;
  std::size_t clause = 0;
};

/// Tries every clause C of q in order with SAT(f & ~C); nullopt iff f => q.
std::optional<Breaker> breakImplication(const CnfFormula& f, std::span<const Clause> q);

}  // namespace fprop
