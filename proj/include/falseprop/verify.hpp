#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "falseprop/cnf.hpp"
#include "falseprop/mutate.hpp"
#include "falseprop/netlist.hpp"
#include "falseprop/pqe.hpp"

namespace fprop {

enum class PropertyStatus : std::uint8_t { True, False, Unknown };

std::string_view toString(PropertyStatus s);

/// Input vector with the outputs it produces. x follows the formula's input
/// order, z its output order.
struct TestVector {
  Bits x;
  Bits z;
  std::size_t brokenClause = 0;
  std::optional<std::size_t> secondClause;  ///< joint tests: clause of the second property
};

struct Property {
  std::vector<Clause> clauses;
  PropertyStatus status = PropertyStatus::Unknown;
  std::string provenance;
  std::optional<TestVector> witness;
  std::size_t inputOnlyDropped = 0;
};

/// Variables of f with the input or output role, ascending.
std::vector<Var> externalVars(const CnfFormula& f);

/// Every variable of c is an input (the empty clause included).
bool isInputOnly(const CnfFormula& f, const Clause& c);

TestVector testFromModel(const CnfFormula& f, const Bits& model, std::size_t brokenClause);

/// Drops input-only clauses, then looks for a model of f falsifying one of
/// the remaining clauses.
Property classifyProperty(const CnfFormula& f, std::span<const Clause> q, std::string provenance = {});

/// A named clause set over circuit pins that the design is meant to satisfy.
struct NamedProperty {
  std::string name;
  std::vector<Clause> clauses;
};

struct Specification {
  std::vector<NamedProperty> phrd;
  std::optional<Circuit> golden;
};

enum class GateOutcome : std::uint8_t { FalseProp, TrueProp, Skipped };

std::string_view toString(GateOutcome o);

struct GateRecord {
  std::size_t group = 0;
  std::string gate;      ///< output signal name
  std::string mutation;  ///< id of the mutation the property came from
  GateOutcome outcome = GateOutcome::Skipped;
  Property property;
  bool total = true;     ///< every input row still has an output row under F*
  bool partial = false;
  PqeStats stats;
};

struct CompsetOptions {
  MutationPolicy policy = MutationPolicy::AllGateSubst;
  bool continueAfterBug = false;
  unsigned jobs = 1;
  PqeOptions pqe;
};

struct CompsetReport {
  std::optional<TestVector> tst;
  std::string reason;              ///< why tst exposes a bug
  std::optional<std::size_t> tstGate;
  std::vector<TestVector> tests;   ///< T, unique by x
  std::vector<Property> pfls;
  std::vector<GateRecord> gates;   ///< one per processed gate, in gate order
  std::vector<std::size_t> gatesProcessed;
  std::vector<TestVector> bugs;    ///< every bug-exposing test when continuing after a bug
};

/// The input and output signature of the golden circuit must match n.
void checkSpecification(const Specification& spec, const Circuit& n);

/// A witness breaks a hard property when (x, z) falsifies one of its clauses.
std::optional<std::string> violatedProperty(const Specification& spec, const CnfFormula& f, const TestVector& t);

/// The structural completeness loop: one property per gate, bugs reported
/// through tst.
CompsetReport compset(const Specification& spec, const Circuit& n, const CompsetOptions& options = {});

/// First lexicographic clause pair (C1, C2) with F & ~C1 & ~C2 satisfiable.
std::optional<TestVector> jointTest(const CnfFormula& f, std::span<const Clause> q1, std::span<const Clause> q2);

struct AtpgResult {
  std::size_t gate = 0;
  bool value = false;
  std::optional<TestVector> test;
  bool budgetExceeded = false;
  std::optional<Clause> breaker;
  PqeStats stats;

  bool detected() const { return test.has_value(); }
};

/// Stuck-at test generation by PQE with early stop on the first clause of the
/// property that F does not imply.
AtpgResult atpgStuckAt(const Circuit& n, std::size_t gate, bool value, const PqeOptions& options = {});
std::vector<AtpgResult> atpgAllFaults(const Circuit& n, const PqeOptions& options = {}, unsigned jobs = 1);

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. fn must be safe
/// to call concurrently for distinct i.
void parallelFor(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace fprop
