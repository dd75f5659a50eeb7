#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "falseprop/cnf.hpp"

namespace fprop {

enum class MutationKind : std::uint8_t { GateSubst, ClauseFlip, StuckAt0, StuckAt1, Custom };

std::string_view toString(MutationKind k);

/// Replacement of the clause set G (indices into F) by G*.
struct Mutation {
  MutationKind kind = MutationKind::Custom;
  std::optional<std::size_t> group;  ///< gate group of F the mutation targets
  IndexSet target;
  std::vector<Clause> gStar;
  std::optional<GateKind> newKind;
  std::size_t clauseIndex = 0;
  std::size_t literalIndex = 0;
  bool identity = false;  ///< G* equals G as a clause set
  std::string id;
};

class MutationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Alternative kinds with the same arity class. N-ary kinds only swap among
/// themselves, NOT with BUF, CONST0 with CONST1.
std::vector<GateKind> substitutes(GateKind kind);

Mutation gateSubst(const CnfFormula& f, std::size_t group, GateKind newKind);

/// Flips the output literal of every clause of the gate whose output literal
/// has the wrong polarity, so G* forces the output to `value` on every input
/// row. G is just the flipped clauses.
Mutation stuckAt(const CnfFormula& f, std::size_t group, bool value);

Mutation clauseFlip(const CnfFormula& f, std::size_t clauseIndex, std::size_t literalIndex);

Mutation customMutation(const CnfFormula& f, IndexSet target, std::vector<Clause> gStar, std::string id = "custom");

MutatedFormula applyMutation(const CnfFormula& f, const Mutation& m);

enum class MutationPolicy : std::uint8_t { AllGateSubst, AllStuckAt, AllClauseFlips, Mixed };

std::string_view toString(MutationPolicy p);
std::optional<MutationPolicy> parseMutationPolicy(std::string_view text);

/// All non-identity mutations of every gate group under the policy, ordered
/// by group then kind. Mixed is the deduplicated union of the other three.
std::vector<Mutation> enumerateMutations(const CnfFormula& f, MutationPolicy policy);
std::vector<Mutation> mutationsOfGroup(const CnfFormula& f, std::size_t group, MutationPolicy policy);

/// Same G and same G* as clause sets.
bool sameMutation(const Mutation& a, const Mutation& b);

}  // namespace fprop
