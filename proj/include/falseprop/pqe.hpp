#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "falseprop/cnf.hpp"
#include "falseprop/sat.hpp"

namespace fprop {

/// Take G* out of the scope of quantifiers in Exists(quantified)(G* & F').
/// Every variable not listed in `free` is quantified.
struct PqeProblem {
  CnfFormula fStar;
  IndexSet gStar;
  IndexSet fPrime;
  std::vector<Var> free;
  /// The unmutated formula F. Only consulted by early stopping.
  std::optional<CnfFormula> original;

  std::vector<Var> quantified() const;
};

PqeProblem makePqeProblem(const MutatedFormula& m, std::vector<Var> free);

struct PqeStats {
  std::uint64_t satCalls = 0;
  std::uint64_t generalizationSteps = 0;
  std::uint64_t iterations = 0;
};

struct PqeSolution {
  std::vector<Clause> q;
  bool certificateChecked = false;
  bool partial = false;         ///< stopped before Q was complete
  bool earlyStopped = false;    ///< stopped on a clause not implied by F
  bool budgetExceeded = false;  ///< clause or conflict budget ran out
  PqeStats stats;
  /// With early stop: the clause that F does not imply and a model of F & ~B.
  std::optional<Clause> breakerClause;
  Bits breakerModel;
};

class EnumerationBoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultEnumerationBound = 20;

/// Row r assigns bitsOf(r, vars.size()) to `vars`.
struct TruthTable {
  std::vector<Var> vars;
  std::vector<bool> rows;

  std::size_t size() const { return rows.size(); }
  bool operator[](std::uint64_t r) const { return rows[r]; }
  std::size_t countOnes() const;
  /// Row index of the free-variable values in a full assignment.
  std::uint64_t rowOf(const Bits& assignment) const;
};

/// Exists(every var outside `free`).f as a table over `free`.
TruthTable qeEnumerate(const CnfFormula& f, std::span<const Var> free, std::size_t bound = kDefaultEnumerationBound);
TruthTable qeEnumerate(const CnfFormula& f, std::span<const std::size_t> clauses, std::span<const Var> free,
                       std::size_t bound = kDefaultEnumerationBound);

/// Q = (Exists F*) | ~(Exists F') computed row by row, turned into clauses and
/// checked against the defining equivalence.
PqeSolution pqeOracle(const PqeProblem& p, std::size_t bound = kDefaultEnumerationBound);

/// Exists(F*) == Q & Exists(F') on every free row.
bool verifyPqeSolution(const PqeProblem& p, std::span<const Clause> q, std::size_t bound = kDefaultEnumerationBound);

struct PqeOptions {
  bool earlyStop = false;
  std::optional<std::size_t> clauseBudget;
  std::optional<std::uint64_t> conflictBudget;  ///< per SAT call
};

/// Counterexample guided PQE. Rows of F' & Q are sampled; a row excluded by
/// F* yields a clause generalized from the UNSAT core, a row allowed by F*
/// is blocked together with a lifted cube of rows that F* also allows.
PqeSolution pqeCegar(const PqeProblem& p, PqeOptions options = {});

/// Drops every clause of q implied by fPrime alone.
std::vector<Clause> noiseFilter(std::span<const Clause> q, const CnfFormula& fPrime);
std::vector<Clause> noiseFilter(std::span<const Clause> q, const CnfFormula& f, std::span<const std::size_t> fPrime);

/// Removes duplicates and clauses subsumed by another clause, keeping order.
std::vector<Clause> removeSubsumed(std::span<const Clause> q);

/// Every input row x extends to a model of f (inputs are the X role vars).
bool checkTotality(const CnfFormula& f);
bool checkTotalityEnumerate(const CnfFormula& f, std::size_t bound = kDefaultEnumerationBound);

/// Free-variable literals of `model` that alone keep the listed clauses of f
/// satisfied when every other variable keeps its value in `model`.
std::vector<Lit> liftCube(const CnfFormula& f, std::span<const std::size_t> clauses, const Bits& model,
                          const std::vector<bool>& isFree);

}  // namespace fprop
