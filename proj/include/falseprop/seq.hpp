#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "falseprop/cnf.hpp"
#include "falseprop/mutate.hpp"
#include "falseprop/netlist.hpp"
#include "falseprop/pqe.hpp"
#include "falseprop/verify.hpp"

namespace fprop {

/// I_1 & F_1 & ... & F_n. Frame i (1-based) owns copies of X, Y and Z; the
/// next-state variables of frame i are the present-state variables of frame
/// i+1, and those of frame n form S_{n+1}.
struct UnrolledCnf {
  CnfFormula formula;
  /// frameMaps[i-1][circuit var] is the copy of that signal in frame i. The
  /// present-state entries point at the previous frame's next-state copies.
  std::vector<std::vector<Var>> frameMaps;
  IndexSet i1;
  IndexSet transition;
  std::size_t n = 0;
  Circuit circuit;

  /// S_k in latch order, k in [1, n+1].
  std::vector<Var> stateVars(std::size_t k) const;
  std::vector<Var> inputVars(std::size_t frame) const;
  std::vector<Var> finalState() const { return stateVars(n + 1); }
  /// Group of gate `gate` in frame `frame`.
  std::size_t groupOf(std::size_t frame, std::size_t gate) const;
};

UnrolledCnf unroll(const Circuit& m, std::size_t n);

/// The same change applied to the copy of the gate in every frame.
Mutation replicateAcrossFrames(const UnrolledCnf& u, const Mutation& frameMutation);

struct SafetyProperty {
  std::vector<Clause> clauses;   ///< over the circuit's latch state variables
  std::vector<Clause> unrolled;  ///< the same clauses over S_{n+1}
  std::string provenance;
  PqeSolution solution;
};

/// PQE on Exists(W_{1,n})(I_1 & G* & F'_{1,n}) with S_{n+1} free, noise
/// filtered against I_1 & F'_{1,n} and renamed back to S.
SafetyProperty falseSafetyProp(const UnrolledCnf& u, const Mutation& mu, const PqeOptions& options = {});

struct CexTrace {
  std::vector<Bits> states;  ///< s^1 .. s^{n+1}
  std::vector<Bits> inputs;  ///< x^1 .. x^n
  std::vector<Bits> outputs; ///< z^1 .. z^n
  std::size_t brokenClause = 0;
};

/// A run of n steps from an initial state ending in a state that falsifies
/// a clause of q (clauses over latch state variables). Validated by replay.
std::optional<CexTrace> findCounterexample(const UnrolledCnf& u, std::span<const Clause> q);

/// Replays the trace on the circuit; true when it starts in an initial state,
/// follows the transition function, and ends outside q.
bool replayTrace(const Circuit& m, const CexTrace& t, std::span<const Clause> q);

struct ReachSet {
  /// frames[k]: states reachable in exactly k steps, as rows over the
  /// latches (bit i = latch i), ascending.
  std::vector<std::vector<std::uint64_t>> frames;
  std::vector<std::uint64_t> reachable;
  bool closed = false;
  std::size_t diameter = 0;
};

class StateSpaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Explicit breadth first search. Frames are computed until the union stops
/// growing and at least `minFrames` frames past the initial one exist.
ReachSet reachOracle(const Circuit& m, std::uint64_t maxStates = std::uint64_t{1} << 16, std::size_t minFrames = 0);

struct SeqGateRecord {
  std::size_t gate = 0;
  std::string name;
  std::string mutation;
  GateOutcome outcome = GateOutcome::Skipped;
  std::vector<Clause> clauses;
  std::optional<CexTrace> trace;
  bool partial = false;
  PqeStats stats;
};

struct SeqCompsetOptions {
  MutationPolicy policy = MutationPolicy::AllGateSubst;
  bool continueAfterBug = false;
  bool replicate = false;
  unsigned jobs = 1;
  PqeOptions pqe;
};

struct SeqCompsetReport {
  std::size_t frames = 0;
  std::optional<CexTrace> tst;
  std::string reason;
  std::optional<std::size_t> tstGate;
  std::vector<CexTrace> traces;
  std::vector<SeqGateRecord> gates;
  std::vector<std::size_t> gatesProcessed;
};

/// Hard properties are clause sets over latch state variables; the golden
/// model is compared output by output along each trace.
SeqCompsetReport seqCompset(const Specification& spec, const Circuit& m, std::size_t n,
                            const SeqCompsetOptions& options = {});

}  // namespace fprop
