#include <gtest/gtest.h>

#include <random>

#include "falseprop/sat.hpp"
#include "support/oracles.hpp"

using namespace fprop;

namespace {

Clause cl(std::initializer_list<int> dimacs) {
  std::vector<Lit> lits;
  for (int d : dimacs) lits.push_back(Lit::fromDimacs(d));
  return *Clause::make(lits);
}

CnfFormula formulaOf(std::size_t n, const std::vector<Clause>& cs) {
  VarMap vm;
  for (std::size_t i = 0; i < n; ++i) vm.addVar(Role::Internal);
  CnfFormula f(vm);
  for (const auto& c : cs) f.addClause(c);
  return f;
}

// Example from the introduction: v3 = AND(v1, v2).
CnfFormula andGate() { return formulaOf(3, {cl({1, -3}), cl({2, -3}), cl({-1, -2, 3})}); }

}  // namespace

TEST(Solver, AgreesWithBruteForceOnRandom3Cnf) {
  std::mt19937_64 rng(7);
  int sat = 0;
  for (int round = 0; round < 200; ++round) {
    auto clauses = oracle::randomCnf(rng, 20, 85 + round % 10, 3);
    Solver s(20);
    for (const auto& c : clauses) s.addClause(c);
    SatResult r = s.solve();
    bool expected = oracle::dpll(clauses, 20).has_value();
    ASSERT_EQ(r.sat(), expected) << "round " << round;
    if (r.sat()) {
      ++sat;
      EXPECT_TRUE(oracle::evalClauses(clauses, r.model));
    }
  }
  EXPECT_GT(sat, 20);
  EXPECT_LT(sat, 180);
}

TEST(Solver, DpllOracleAgreesWithEnumeration) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 50; ++round) {
    auto clauses = oracle::randomCnf(rng, 10, 43, 3);
    EXPECT_EQ(oracle::dpll(clauses, 10).has_value(), oracle::bruteSat(clauses, 10).has_value());
  }
}

TEST(Solver, ExampleAndGate) {
  CnfFormula f = andGate();
  Solver s(3);
  s.addFormula(f);
  SatResult r = s.solve({Lit::pos(0), Lit::pos(1)});
  ASSERT_TRUE(r.sat());
  EXPECT_TRUE(r.model[2]);
  EXPECT_TRUE(s.solve({Lit::pos(0), Lit::pos(1), Lit::neg(2)}).unsat());
  EXPECT_TRUE(implies(f, cl({-3, 1})));
  EXPECT_FALSE(implies(f, cl({-3})));
}

TEST(Solver, IncrementalAssumptionsAndCores) {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 100; ++round) {
    auto clauses = oracle::randomCnf(rng, 14, 40, 3);
    Solver s(14);
    for (const auto& c : clauses) s.addClause(c);
    for (int q = 0; q < 5; ++q) {
      std::vector<Lit> assumptions;
      for (Var v = 0; v < 14; ++v)
        if (rng() % 3 == 0) assumptions.emplace_back(v, (rng() & 1U) != 0);
      SatResult r = s.solve(assumptions);
      bool expected = oracle::dpll(clauses, 14, assumptions).has_value();
      ASSERT_EQ(r.sat(), expected);
      if (r.sat()) {
        EXPECT_TRUE(oracle::evalClauses(clauses, r.model));
        for (Lit l : assumptions) EXPECT_TRUE(l.satisfiedBy(r.model[l.var()]));
      } else {
        for (Lit l : r.core) EXPECT_NE(std::find(assumptions.begin(), assumptions.end(), l), assumptions.end());
        EXPECT_FALSE(oracle::dpll(clauses, 14, r.core).has_value());
      }
    }
  }
}

TEST(Solver, AddingClausesBetweenSolves) {
  Solver s(2);
  s.addClause(cl({1, 2}));
  EXPECT_TRUE(s.solve().sat());
  s.addClause(cl({-1}));
  SatResult r = s.solve();
  ASSERT_TRUE(r.sat());
  EXPECT_TRUE(r.model[1]);
  EXPECT_FALSE(s.addClause(cl({-2})));
  EXPECT_TRUE(s.solve().unsat());
}

TEST(Solver, ConflictBudgetGivesUnknown) {
  // Pigeonhole 7 into 6 needs many conflicts.
  const int p = 7, h = 6;
  auto var = [&](int i, int j) { return i * h + j + 1; };
  std::vector<Clause> cs;
  for (int i = 0; i < p; ++i) {
    std::vector<Lit> lits;
    for (int j = 0; j < h; ++j) lits.push_back(Lit::fromDimacs(var(i, j)));
    cs.push_back(*Clause::make(lits));
  }
  for (int j = 0; j < h; ++j)
    for (int a = 0; a < p; ++a)
      for (int b = a + 1; b < p; ++b) cs.push_back(cl({-var(a, j), -var(b, j)}));
  Solver s(p * h);
  for (const auto& c : cs) s.addClause(c);
  SatResult r = s.solve({}, SolveLimits{10});
  EXPECT_EQ(r.status, SatStatus::Unknown);
  EXPECT_TRUE(s.solve().unsat());
}

TEST(Solver, BreakImplicationFindsFirstBrokenClause) {
  CnfFormula f = andGate();
  std::vector<Clause> q = {cl({-3, 1}), cl({3}), cl({-1})};
  auto b = breakImplication(f, q);
  ASSERT_TRUE(b.has_value());
  EXPECT_EQ(b->clause, 1u);
  EXPECT_TRUE(oracle::evalFormula(f, b->model));
  EXPECT_FALSE(q[1].satisfiedBy(b->model));
  std::vector<Clause> implied = {cl({-3, 1}), cl({-3, 2})};
  EXPECT_FALSE(breakImplication(f, implied).has_value());
}

TEST(Solver, EmptyClauseAndEmptyFormula) {
  Solver s(0);
  EXPECT_TRUE(s.solve().sat());
  Solver t(1);
  std::vector<Lit> none;
  EXPECT_FALSE(t.addClause(none));
  EXPECT_TRUE(t.solve().unsat());
}
