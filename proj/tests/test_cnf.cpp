#include <gtest/gtest.h>

#include <random>

#include "falseprop/cnf.hpp"
#include "support/oracles.hpp"

using namespace fprop;

namespace {

Clause cl(std::initializer_list<int> dimacs) {
  std::vector<Lit> lits;
  for (int d : dimacs) lits.push_back(Lit::fromDimacs(d));
  return *Clause::make(lits);
}

// Gate semantics check: the encoding is satisfied exactly by truth-table rows.
void expectExactEncoding(GateKind kind, std::size_t fanin) {
  std::vector<Var> in;
  for (std::size_t i = 0; i < fanin; ++i) in.push_back(static_cast<Var>(i));
  Var out = static_cast<Var>(fanin);
  auto clauses = encodeGate(kind, in, out);
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << (fanin + 1)); ++r) {
    Bits a = bitsOf(r, fanin + 1);
    Bits x(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(fanin));
    bool expected = a[out] == evalGate(kind, x);
    EXPECT_EQ(oracle::evalClauses(clauses, a), expected) << toString(kind) << " row " << r;
  }
}

}  // namespace

TEST(Literal, Packing) {
  Lit a = Lit::pos(3);
  EXPECT_EQ(a.var(), 3u);
  EXPECT_FALSE(a.negative());
  EXPECT_TRUE((~a).negative());
  EXPECT_EQ(~~a, a);
  EXPECT_EQ(a.toDimacs(), 4);
  EXPECT_EQ(Lit::fromDimacs(-4), ~a);
}

TEST(ClauseMake, DedupAndTautology) {
  auto c = Clause::make({Lit::pos(0), Lit::pos(0), Lit::neg(1)});
  ASSERT_TRUE(c);
  EXPECT_EQ(c->size(), 2u);
  EXPECT_FALSE(Clause::make({Lit::pos(0), Lit::neg(0)}).has_value());
  EXPECT_TRUE(cl({1}).subsumes(cl({1, -2})));
  EXPECT_FALSE(cl({1, -2}).subsumes(cl({1})));
  EXPECT_TRUE(cl({1, -2}).sameLiterals(cl({-2, 1})));
}

TEST(GateEncoding, AndMatchesExampleOrder) {
  auto clauses = encodeGate(GateKind::And, std::vector<Var>{0, 1}, 2);
  ASSERT_EQ(clauses.size(), 3u);
  EXPECT_TRUE(clauses[0].sameLiterals(cl({1, -3})));
  EXPECT_TRUE(clauses[1].sameLiterals(cl({2, -3})));
  EXPECT_TRUE(clauses[2].sameLiterals(cl({-1, -2, 3})));
}

TEST(GateEncoding, EveryKindIsExact) {
  for (GateKind k : kAllGateKinds) {
    switch (arityOf(k)) {
      case Arity::Nullary:
        expectExactEncoding(k, 0);
        break;
      case Arity::Unary:
        expectExactEncoding(k, 1);
        break;
      case Arity::Nary:
        for (std::size_t n = 1; n <= 4; ++n) expectExactEncoding(k, n);
        break;
    }
  }
}

TEST(CircuitEncoding, RolesAndGroups) {
  Circuit c = readNetlistFile(FALSEPROP_DATA_DIR "/toy1.net");
  CnfFormula f = encodeCircuit(c);
  EXPECT_EQ(f.vars().inputs().size(), 3u);
  EXPECT_EQ(f.vars().outputs().size(), 1u);
  EXPECT_EQ(f.vars().withRole(Role::Internal).size(), 1u);
  ASSERT_EQ(f.groups().size(), 2u);
  std::size_t total = 0;
  for (std::size_t g = 0; g < f.groups().size(); ++g) {
    for (std::size_t i : f.group(g).clauses) EXPECT_EQ(f.clause(i).origin, g);
    total += f.group(g).clauses.size();
  }
  EXPECT_EQ(total, f.size());
  EXPECT_EQ(f.groupOfOutput(c.outputs()[0]), 1u);
}

TEST(CircuitEncoding, SatisfyingAssignmentsAreSimulations) {
  Circuit c = readNetlistFile(FALSEPROP_DATA_DIR "/adder2.net");
  CnfFormula f = encodeCircuit(c);
  std::size_t n = f.numVars();
  std::size_t models = 0;
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << n); ++r) {
    Bits a = bitsOf(r, n);
    if (!oracle::evalFormula(f, a)) continue;
    ++models;
    Bits x;
    for (auto v : c.inputs()) x.push_back(a[v]);
    EXPECT_EQ(evaluate(c, x), a);
  }
  EXPECT_EQ(models, std::size_t{1} << c.inputs().size());
}

TEST(SequentialEncoding, StateRoles) {
  Circuit c = readNetlistFile(FALSEPROP_DATA_DIR "/counter3.net");
  CnfFormula f = encodeCircuit(c);
  EXPECT_EQ(f.vars().withRole(Role::State).size(), 2u);
  EXPECT_EQ(f.vars().withRole(Role::NextState).size(), 2u);
  EXPECT_EQ(f.vars().inputs().size(), 0u);
}

TEST(ReplaceGroup, LayoutAndOrigins) {
  Circuit c = readNetlistFile(FALSEPROP_DATA_DIR "/toy1.net");
  CnfFormula f = encodeCircuit(c);
  const auto& g0 = f.group(0).clauses;
  std::vector<Clause> gStar = {cl({-1, -2, -4})};
  MutatedFormula m = replaceGroup(f, std::vector<std::size_t>{g0[2]}, gStar);
  EXPECT_EQ(m.formula.size(), f.size());
  ASSERT_EQ(m.gStar.size(), 1u);
  EXPECT_EQ(m.gStar[0], f.size() - 1);
  ASSERT_EQ(m.fPrime.size(), f.size() - 1);
  for (std::size_t i = 0; i < m.fPrime.size(); ++i) {
    EXPECT_EQ(m.fPrime[i], i);
    EXPECT_TRUE(m.formula.clause(i).sameLiterals(f.clause(m.fPrimeOrigin[i])));
  }
  EXPECT_TRUE(m.formula.clause(m.gStar[0]).sameLiterals(gStar[0]));
  EXPECT_THROW(replaceGroup(f, std::vector<std::size_t>{99}, gStar), std::out_of_range);
}

TEST(Dimacs, RoundTripKeepsVarMapAndGroups) {
  Circuit c = readNetlistFile(FALSEPROP_DATA_DIR "/counter3.net");
  CnfFormula f = encodeCircuit(c);
  std::string text = exportDimacs(f);
  CnfFormula g = importDimacs(text);
  EXPECT_EQ(exportDimacs(g), text);
  ASSERT_EQ(g.numVars(), f.numVars());
  for (Var v = 0; v < f.numVars(); ++v) {
    EXPECT_EQ(g.vars().role(v), f.vars().role(v));
    EXPECT_EQ(g.vars().name(v), f.vars().name(v));
  }
  ASSERT_EQ(g.size(), f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_TRUE(g.clause(i).sameLiterals(f.clause(i)));
    EXPECT_EQ(g.clause(i).origin, f.clause(i).origin);
  }
}

TEST(Dimacs, PlainInput) {
  CnfFormula f = importDimacs("c hello\np cnf 3 2\n1 -2 0\n2 3 0\n");
  EXPECT_EQ(f.numVars(), 3u);
  EXPECT_EQ(f.size(), 2u);
  EXPECT_THROW(importDimacs("p cnf 2 1\n1 3 0\n"), DimacsError);
  EXPECT_THROW(importDimacs("p cnf 2 2\n1 2 0\n"), DimacsError);
  EXPECT_THROW(importDimacs("p cnf 2 1\n1 2\n"), DimacsError);
}

TEST(Formula, SubsetAndOccurringVars) {
  VarMap vm;
  for (int i = 0; i < 4; ++i) vm.addVar(Role::Internal);
  CnfFormula f(vm);
  f.addClause(cl({1, 2}));
  f.addClause(cl({-4}));
  EXPECT_EQ(f.occurringVars(), (std::vector<Var>{0, 1, 3}));
  EXPECT_EQ(f.subset(std::vector<std::size_t>{1}).size(), 1u);
  EXPECT_THROW(f.addClause(cl({5})), std::out_of_range);
}
