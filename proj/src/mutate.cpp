#include "falseprop/mutate.hpp"

#include <algorithm>

namespace fprop {

namespace {

bool sameClauseSet(const std::vector<Clause>& a, const std::vector<Clause>& b) {
  auto covered = [](const std::vector<Clause>& x, const std::vector<Clause>& y) {
    return std::all_of(x.begin(), x.end(), [&](const Clause& c) {
      return std::any_of(y.begin(), y.end(), [&](const Clause& d) { return c.sameLiterals(d); });
    });
  };
  return covered(a, b) && covered(b, a);
}

std::vector<Clause> clausesAt(const CnfFormula& f, const IndexSet& idx) {
  std::vector<Clause> out;
  for (std::size_t i : idx) out.push_back(f.clause(i));
  return out;
}

std::string gateLabel(const CnfFormula& f, std::size_t group) {
  const GateGroup& g = f.group(group);
  std::string label = f.vars().name(g.output);
  if (g.frame != 0 && label.find('@') == std::string::npos) label += "@" + std::to_string(g.frame);
  return label;
}

void tag(std::vector<Clause>& cs, std::optional<std::size_t> group) {
  for (Clause& c : cs) c.origin = group ? std::optional<std::uint32_t>(static_cast<std::uint32_t>(*group)) : std::nullopt;
}

}  // namespace

std::string_view toString(MutationKind k) {
  switch (k) {
    case MutationKind::GateSubst:
      return "gate-subst";
    case MutationKind::ClauseFlip:
      return "clause-flip";
    case MutationKind::StuckAt0:
      return "stuck-at-0";
    case MutationKind::StuckAt1:
      return "stuck-at-1";
    case MutationKind::Custom:
      return "custom";
  }
  return "?";
}

std::vector<GateKind> substitutes(GateKind kind) {
  std::vector<GateKind> out;
  for (GateKind k : kAllGateKinds)
    if (k != kind && arityOf(k) == arityOf(kind)) out.push_back(k);
  return out;
}

Mutation gateSubst(const CnfFormula& f, std::size_t group, GateKind newKind) {
  const GateGroup& g = f.group(group);
  if (arityOf(newKind) != arityOf(g.kind))
    throw MutationError("cannot replace " + std::string(toString(g.kind)) + " by " + std::string(toString(newKind)) +
                        ": arity differs");
  Mutation m;
  m.kind = MutationKind::GateSubst;
  m.group = group;
  m.target = g.clauses;
  m.gStar = encodeGate(newKind, g.fanin, g.output);
  tag(m.gStar, group);
  m.newKind = newKind;
  m.identity = sameClauseSet(clausesAt(f, m.target), m.gStar);
  m.id = gateLabel(f, group) + ":" + std::string(toString(g.kind)) + "->" + std::string(toString(newKind));
  return m;
}

Mutation stuckAt(const CnfFormula& f, std::size_t group, bool value) {
  const GateGroup& g = f.group(group);
  Mutation m;
  m.kind = value ? MutationKind::StuckAt1 : MutationKind::StuckAt0;
  m.group = group;
  // Clauses that can force the output to !value carry the output literal
  // with polarity !value; negate it there.
  Lit wrong(g.output, value);
  for (std::size_t i : g.clauses) {
    const Clause& c = f.clause(i);
    if (!c.contains(wrong)) continue;
    std::vector<Lit> lits = c.lits;
    for (Lit& l : lits)
      if (l == wrong) l = ~wrong;
    auto flipped = Clause::make(std::move(lits), c.origin);
    m.target.push_back(i);
    if (flipped) m.gStar.push_back(std::move(*flipped));
  }
  m.identity = m.target.empty();
  m.id = gateLabel(f, group) + (value ? ":sa1" : ":sa0");
  return m;
}

Mutation clauseFlip(const CnfFormula& f, std::size_t clauseIndex, std::size_t literalIndex) {
  const Clause& c = f.clause(clauseIndex);
  if (literalIndex >= c.size())
    throw std::out_of_range("literal " + std::to_string(literalIndex) + " of clause " + std::to_string(clauseIndex));
  Mutation m;
  m.kind = MutationKind::ClauseFlip;
  if (c.origin) m.group = *c.origin;
  m.target = {clauseIndex};
  std::vector<Lit> lits = c.lits;
  lits[literalIndex] = ~lits[literalIndex];
  m.gStar.push_back(*Clause::make(std::move(lits), c.origin));
  m.clauseIndex = clauseIndex;
  m.literalIndex = literalIndex;
  std::string where = m.group ? gateLabel(f, *m.group) : "clause";
  m.id = where + ":flip:" + std::to_string(clauseIndex) + "." + std::to_string(literalIndex);
  return m;
}

Mutation customMutation(const CnfFormula& f, IndexSet target, std::vector<Clause> gStar, std::string id) {
  for (std::size_t i : target) (void)f.clause(i);
  Mutation m;
  m.kind = MutationKind::Custom;
  m.target = std::move(target);
  m.gStar = std::move(gStar);
  m.identity = sameClauseSet(clausesAt(f, m.target), m.gStar);
  m.id = std::move(id);
  return m;
}

MutatedFormula applyMutation(const CnfFormula& f, const Mutation& m) { return replaceGroup(f, m.target, m.gStar); }

std::string_view toString(MutationPolicy p) {
  switch (p) {
    case MutationPolicy::AllGateSubst:
      return "all-gate-subst";
    case MutationPolicy::AllStuckAt:
      return "all-stuck-at";
    case MutationPolicy::AllClauseFlips:
      return "all-clause-flips";
    case MutationPolicy::Mixed:
      return "mixed";
  }
  return "?";
}

std::optional<MutationPolicy> parseMutationPolicy(std::string_view text) {
  for (MutationPolicy p :
       {MutationPolicy::AllGateSubst, MutationPolicy::AllStuckAt, MutationPolicy::AllClauseFlips, MutationPolicy::Mixed})
    if (text == toString(p)) return p;
  return std::nullopt;
}

bool sameMutation(const Mutation& a, const Mutation& b) {
  IndexSet ta = a.target, tb = b.target;
  std::sort(ta.begin(), ta.end());
  std::sort(tb.begin(), tb.end());
  return ta == tb && sameClauseSet(a.gStar, b.gStar);
}

std::vector<Mutation> mutationsOfGroup(const CnfFormula& f, std::size_t group, MutationPolicy policy) {
  std::vector<Mutation> out;
  auto push = [&](Mutation m) {
    if (m.identity) return;
    if (std::any_of(out.begin(), out.end(), [&](const Mutation& o) { return sameMutation(o, m); })) return;
    out.push_back(std::move(m));
  };
  const GateGroup& g = f.group(group);
  bool mixed = policy == MutationPolicy::Mixed;
  if (mixed || policy == MutationPolicy::AllGateSubst)
    for (GateKind k : substitutes(g.kind)) push(gateSubst(f, group, k));
  if (mixed || policy == MutationPolicy::AllStuckAt) {
    push(stuckAt(f, group, false));
    push(stuckAt(f, group, true));
  }
  if (mixed || policy == MutationPolicy::AllClauseFlips)
    for (std::size_t i : g.clauses)
      for (std::size_t l = 0; l < f.clause(i).size(); ++l) push(clauseFlip(f, i, l));
  return out;
}

std::vector<Mutation> enumerateMutations(const CnfFormula& f, MutationPolicy policy) {
  std::vector<Mutation> out;
  for (std::size_t g = 0; g < f.groups().size(); ++g) {
    auto ms = mutationsOfGroup(f, g, policy);
    std::move(ms.begin(), ms.end(), std::back_inserter(out));
  }
  return out;
}

}  // namespace fprop
