#include <gtest/gtest.h>

#include <random>
#include <set>

#include "falseprop/mutate.hpp"
#include "falseprop/random.hpp"
#include "falseprop/sat.hpp"
#include "support/oracles.hpp"

using namespace fprop;

namespace {

Circuit toy1() { return readNetlistFile(FALSEPROP_DATA_DIR "/toy1.net"); }
Circuit andGate() { return parseNetlist("input v1 v2; output v3; v3 = AND(v1, v2);", NetlistFormat::Simple, "and"); }

Clause cl(std::initializer_list<int> dimacs) {
  std::vector<Lit> lits;
  for (int d : dimacs) lits.push_back(Lit::fromDimacs(d));
  return *Clause::make(lits);
}

// Each model of the mutated formula, restricted to inputs, must match the
// simulation of the rebuilt circuit.
void expectEncodes(const CnfFormula& mutated, const Circuit& reference) {
  CnfFormula ref = encodeCircuit(reference);
  ASSERT_EQ(mutated.numVars(), ref.numVars());
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << mutated.numVars()); ++r) {
    Bits a = bitsOf(r, mutated.numVars());
    EXPECT_EQ(oracle::evalFormula(mutated, a), oracle::evalFormula(ref, a)) << r;
  }
}

}  // namespace

TEST(Mutate, Toy1Counts) {
  CnfFormula f = encodeCircuit(toy1());
  EXPECT_EQ(enumerateMutations(f, MutationPolicy::AllStuckAt).size(), 4u);
  EXPECT_EQ(enumerateMutations(f, MutationPolicy::AllGateSubst).size(), 10u);
  std::size_t literals = 0;
  for (const Clause& c : f.clauses()) literals += c.size();
  EXPECT_EQ(enumerateMutations(f, MutationPolicy::AllClauseFlips).size(), literals);
}

TEST(Mutate, SubstituteClasses) {
  auto s = substitutes(GateKind::And);
  EXPECT_EQ(s.size(), 5u);
  EXPECT_EQ(std::count(s.begin(), s.end(), GateKind::And), 0);
  EXPECT_EQ(substitutes(GateKind::Not), std::vector<GateKind>{GateKind::Buf});
  EXPECT_EQ(substitutes(GateKind::Buf), std::vector<GateKind>{GateKind::Not});
  EXPECT_EQ(substitutes(GateKind::Const0), std::vector<GateKind>{GateKind::Const1});
}

TEST(Mutate, AndToNandEncodesNand) {
  CnfFormula f = encodeCircuit(andGate());
  Mutation m = gateSubst(f, 0, GateKind::Nand);
  EXPECT_EQ(m.id, "v3:AND->NAND");
  EXPECT_FALSE(m.identity);
  expectEncodes(applyMutation(f, m).formula, oracle::withGateKind(andGate(), 0, GateKind::Nand));
}

TEST(Mutate, GateSubstArityMismatchThrows) {
  CnfFormula f = encodeCircuit(andGate());
  EXPECT_THROW(gateSubst(f, 0, GateKind::Not), MutationError);
  EXPECT_THROW(gateSubst(f, 5, GateKind::Or), std::out_of_range);
}

TEST(Mutate, StuckAtZeroOnAndFlipsOneClause) {
  CnfFormula f = encodeCircuit(andGate());
  Mutation m = stuckAt(f, 0, false);
  EXPECT_EQ(m.id, "v3:sa0");
  ASSERT_EQ(m.target.size(), 1u);
  ASSERT_EQ(m.gStar.size(), 1u);
  EXPECT_TRUE(m.gStar[0].sameLiterals(cl({-1, -2, -3})));
  // Together with the untouched clauses the gate resolves to ~v3.
  MutatedFormula mf = applyMutation(f, m);
  EXPECT_TRUE(implies(mf.formula, cl({-3})));
}

TEST(Mutate, StuckAtOneOnOrForcesOutput) {
  Circuit c = parseNetlist("input a b; output o; o = OR(a, b);", NetlistFormat::Simple);
  CnfFormula f = encodeCircuit(c);
  MutatedFormula mf = applyMutation(f, stuckAt(f, 0, true));
  EXPECT_TRUE(implies(mf.formula, cl({3})));
}

TEST(Mutate, StuckAtMatchesConstantGate) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 30; ++round) {
    Circuit c = randomCircuit(rng, RandomCircuitShape{3, 5, 2, 0, true});
    CnfFormula f = encodeCircuit(c);
    std::size_t g = rng() % c.gates().size();
    bool v = rng() % 2;
    MutatedFormula mf = applyMutation(f, stuckAt(f, g, v));
    Circuit faulty = oracle::withStuckAt(c, g, v);
    for (std::uint64_t r = 0; r < (std::uint64_t{1} << c.inputs().size()); ++r) {
      Bits x = bitsOf(r, c.inputs().size());
      std::vector<Lit> assume;
      for (std::size_t i = 0; i < x.size(); ++i) assume.push_back(Lit(c.inputs()[i], !x[i]));
      auto m = oracle::dpll(mf.formula.clauses(), f.numVars(), assume);
      ASSERT_TRUE(m.has_value());
      Bits z;
      for (VarId o : c.outputs()) z.push_back((*m)[o]);
      EXPECT_EQ(z, oracle::outputsOf(faulty, x)) << round << " row " << r;
    }
  }
}

TEST(Mutate, StuckAtOnConstantIsIdentity) {
  Circuit c = parseNetlist("input a; output o; k = CONST0(); o = OR(a, k);", NetlistFormat::Simple);
  CnfFormula f = encodeCircuit(c);
  std::size_t kGroup = 0;
  for (std::size_t i = 0; i < f.groups().size(); ++i)
    if (f.groups()[i].kind == GateKind::Const0) kGroup = i;
  Mutation m = stuckAt(f, kGroup, false);
  EXPECT_TRUE(m.identity);
  EXPECT_TRUE(m.gStar.empty());
  auto ms = mutationsOfGroup(f, kGroup, MutationPolicy::AllStuckAt);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].id, "k:sa1");
}

TEST(Mutate, ClauseFlipIsAnInvolution) {
  CnfFormula f = encodeCircuit(toy1());
  for (std::size_t i = 0; i < f.clauses().size(); ++i)
    for (std::size_t j = 0; j < f.clause(i).size(); ++j) {
      Mutation m = clauseFlip(f, i, j);
      CnfFormula once = applyMutation(f, m).formula;
      // The mutated clause sits at the end of the replaced layout.
      std::size_t at = once.clauses().size() - 1;
      const Clause& flipped = once.clause(at);
      std::size_t pos = 0;
      while (pos < flipped.size() && flipped.lits[pos] != ~f.clause(i).lits[j]) ++pos;
      ASSERT_LT(pos, flipped.size());
      CnfFormula twice = applyMutation(once, clauseFlip(once, at, pos)).formula;
      std::multiset<std::vector<Lit>> a, b;
      for (const Clause& c : f.clauses()) a.insert(c.lits);
      for (const Clause& c : twice.clauses()) b.insert(c.lits);
      EXPECT_EQ(a, b);
    }
}

TEST(Mutate, GateSubstKeepsFormulaFunctional) {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 20; ++round) {
    Circuit c = randomCircuit(rng, RandomCircuitShape{3, 6, 2, 0, true});
    CnfFormula f = encodeCircuit(c);
    for (const Mutation& m : enumerateMutations(f, MutationPolicy::AllGateSubst)) {
      CnfFormula fs = applyMutation(f, m).formula;
      std::vector<Var> in(f.vars().inputs().begin(), f.vars().inputs().end());
      auto t = oracle::existsTable(fs.clauses(), fs.numVars(), in);
      EXPECT_TRUE(std::all_of(t.begin(), t.end(), [](bool b) { return b; })) << m.id;
    }
  }
}

TEST(Mutate, GStarUsesOnlyVariablesOfG) {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 20; ++round) {
    Circuit c = randomCircuit(rng, RandomCircuitShape{4, 8, 3, 0, true});
    CnfFormula f = encodeCircuit(c);
    for (const Mutation& m : enumerateMutations(f, MutationPolicy::Mixed)) {
      std::set<Var> gv;
      for (std::size_t i : m.target)
        for (Lit l : f.clause(i).lits) gv.insert(l.var());
      if (m.group)
        for (std::size_t i : f.group(*m.group).clauses)
          for (Lit l : f.clause(i).lits) gv.insert(l.var());
      for (const Clause& c2 : m.gStar)
        for (Lit l : c2.lits) EXPECT_TRUE(gv.count(l.var())) << m.id;
      EXPECT_FALSE(m.identity) << m.id;
    }
  }
}

TEST(Mutate, MixedIsDedupedUnion) {
  CnfFormula f = encodeCircuit(toy1());
  auto mixed = enumerateMutations(f, MutationPolicy::Mixed);
  std::size_t total = 0;
  for (auto p : {MutationPolicy::AllGateSubst, MutationPolicy::AllStuckAt, MutationPolicy::AllClauseFlips})
    total += enumerateMutations(f, p).size();
  EXPECT_LE(mixed.size(), total);
  for (std::size_t i = 0; i < mixed.size(); ++i)
    for (std::size_t j = i + 1; j < mixed.size(); ++j) EXPECT_FALSE(sameMutation(mixed[i], mixed[j]));
  for (auto p : {MutationPolicy::AllGateSubst, MutationPolicy::AllStuckAt, MutationPolicy::AllClauseFlips})
    for (const Mutation& m : enumerateMutations(f, p))
      EXPECT_TRUE(std::any_of(mixed.begin(), mixed.end(), [&](const Mutation& x) { return sameMutation(x, m); }));
}

TEST(Mutate, PolicyNames) {
  for (auto p : {MutationPolicy::AllGateSubst, MutationPolicy::AllStuckAt, MutationPolicy::AllClauseFlips,
                 MutationPolicy::Mixed})
    EXPECT_EQ(parseMutationPolicy(toString(p)), p);
  EXPECT_FALSE(parseMutationPolicy("bogus").has_value());
}

TEST(Mutate, CustomMutationRejectsBadIndex) {
  CnfFormula f = encodeCircuit(andGate());
  EXPECT_THROW(customMutation(f, {99}, {}), std::exception);
  Mutation m = customMutation(f, {0}, {cl({-3})});
  MutatedFormula mf = applyMutation(f, m);
  EXPECT_EQ(mf.gStar.size(), 1u);
  EXPECT_EQ(mf.fPrime.size(), f.clauses().size() - 1);
}
