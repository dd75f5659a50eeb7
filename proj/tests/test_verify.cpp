#include <gtest/gtest.h>

#include <random>
#include <set>

#include "falseprop/mutate.hpp"
#include "falseprop/pqe.hpp"
#include "falseprop/random.hpp"
#include "falseprop/verify.hpp"
#include "support/oracles.hpp"

using namespace fprop;

namespace {

Circuit toy1() { return readNetlistFile(FALSEPROP_DATA_DIR "/toy1.net"); }
Circuit toy1Buggy() { return readNetlistFile(FALSEPROP_DATA_DIR "/toy1_buggy.net"); }

std::vector<Clause> propertyOf(const CnfFormula& f, const Mutation& m) {
  MutatedFormula mf = applyMutation(f, m);
  PqeProblem p = makePqeProblem(mf, externalVars(f));
  return noiseFilter(pqeCegar(p).q, mf.formula, mf.fPrime);
}

void expectWitnessValid(const Circuit& c, const CnfFormula& f, const Property& p) {
  ASSERT_TRUE(p.witness.has_value());
  const TestVector& t = *p.witness;
  EXPECT_EQ(simulate(c, t.x).outputs, t.z);
  Bits a(f.numVars(), false);
  for (std::size_t i = 0; i < t.x.size(); ++i) a[c.inputs()[i]] = t.x[i];
  for (std::size_t i = 0; i < t.z.size(); ++i) a[c.outputs()[i]] = t.z[i];
  EXPECT_FALSE(p.clauses.at(t.brokenClause).satisfiedBy(a));
}

// Inputs on which the faulty circuit differs from c.
std::set<Bits> breakingSet(const Circuit& c, std::size_t gate, bool value) {
  auto d = oracle::distinguishingInputs(c, oracle::withStuckAt(c, gate, value));
  return {d.begin(), d.end()};
}

}  // namespace

TEST(Classify, EmptyPropertyIsTrue) {
  CnfFormula f = encodeCircuit(toy1());
  Property p = classifyProperty(f, std::vector<Clause>{});
  EXPECT_EQ(p.status, PropertyStatus::True);
  EXPECT_FALSE(p.witness.has_value());
}

TEST(Classify, Toy1AndToOrIsFalse) {
  Circuit c = toy1();
  CnfFormula f = encodeCircuit(c);
  Property p = classifyProperty(f, propertyOf(f, gateSubst(f, 0, GateKind::Or)), "y:AND->OR");
  ASSERT_EQ(p.status, PropertyStatus::False);
  expectWitnessValid(c, f, p);
  const Bits& x = p.witness->x;
  EXPECT_TRUE((x == Bits{true, false, false}) || (x == Bits{false, true, false}));
  EXPECT_EQ(p.witness->z, Bits{false});
  EXPECT_EQ(p.provenance, "y:AND->OR");
}

TEST(Classify, DropsInputOnlyClauses) {
  CnfFormula f = encodeCircuit(toy1());
  Var x1 = *f.vars().findByName("x1");
  Var z = *f.vars().findByName("z");
  std::vector<Clause> q = {Clause{{Lit::neg(x1)}, std::nullopt}, Clause{{Lit::pos(x1), Lit::pos(z)}, std::nullopt}};
  Property p = classifyProperty(f, q);
  EXPECT_EQ(p.inputOnlyDropped, 1u);
  ASSERT_EQ(p.clauses.size(), 1u);
  for (const Clause& c : p.clauses) EXPECT_FALSE(isInputOnly(f, c));
}

TEST(Classify, VerdictMatchesTruthTablesForFunctionalMutations) {
  std::mt19937_64 rng(41);
  for (int round = 0; round < 40; ++round) {
    Circuit c = randomCircuit(rng, RandomCircuitShape{2 + rng() % 3, 3 + rng() % 5, 1 + rng() % 2, 0, true});
    CnfFormula f = encodeCircuit(c);
    auto ms = enumerateMutations(f, rng() % 2 ? MutationPolicy::AllStuckAt : MutationPolicy::AllGateSubst);
    if (ms.empty()) continue;
    const Mutation& m = ms[rng() % ms.size()];
    Property p = classifyProperty(f, propertyOf(f, m));
    // Functional G*: TBL and TBL* differ iff the output functions differ.
    std::size_t gate = f.group(*m.group).circuitGate;
    Circuit mutant = m.newKind ? oracle::withGateKind(c, gate, *m.newKind)
                               : oracle::withStuckAt(c, gate, m.kind == MutationKind::StuckAt1);
    bool differ = !oracle::distinguishingInputs(c, mutant).empty();
    EXPECT_EQ(p.status == PropertyStatus::False, differ) << m.id;
    if (p.status == PropertyStatus::False) expectWitnessValid(c, f, p);
  }
}

TEST(Compset, Toy1ProcessesEveryGate) {
  Circuit c = toy1();
  CompsetReport r = compset(Specification{}, c);
  EXPECT_EQ(r.gatesProcessed, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(r.gates.size(), 2u);
  EXPECT_FALSE(r.pfls.empty());
  EXPECT_FALSE(r.tst.has_value());
  CnfFormula f = encodeCircuit(c);
  for (const Property& p : r.pfls) {
    expectWitnessValid(c, f, p);
    for (const Clause& cl : p.clauses) EXPECT_FALSE(isInputOnly(f, cl));
  }
  std::set<Bits> xs;
  for (const TestVector& t : r.tests) EXPECT_TRUE(xs.insert(t.x).second);
}

TEST(Compset, GoldenEqualToDesignFindsNoBug) {
  Circuit c = toy1();
  Specification spec;
  spec.golden = c;
  CompsetReport a = compset(Specification{}, c);
  CompsetReport b = compset(spec, c);
  EXPECT_FALSE(b.tst.has_value());
  ASSERT_EQ(a.tests.size(), b.tests.size());
  for (std::size_t i = 0; i < a.tests.size(); ++i) EXPECT_EQ(a.tests[i].x, b.tests[i].x);
}

TEST(Compset, SeededBugIsExposedByGolden) {
  Circuit buggy = toy1Buggy();
  Specification spec;
  spec.golden = toy1();
  CompsetReport r = compset(spec, buggy);
  ASSERT_TRUE(r.tst.has_value());
  auto differing = oracle::distinguishingInputs(buggy, toy1());
  EXPECT_TRUE(std::find(differing.begin(), differing.end(), r.tst->x) != differing.end());
  EXPECT_NE(r.reason.find("golden"), std::string::npos);
}

TEST(Compset, HardPropertyViolation) {
  Circuit c = toy1();
  CnfFormula f = encodeCircuit(c);
  // "z is never 0": false, so the first false property's witness breaks it.
  Specification spec;
  spec.phrd.push_back({"z-high", {Clause{{Lit::pos(*f.vars().findByName("z"))}, std::nullopt}}});
  CompsetReport r = compset(spec, c);
  ASSERT_TRUE(r.tst.has_value());
  EXPECT_EQ(r.tst->z, Bits{false});
  EXPECT_NE(r.reason.find("z-high"), std::string::npos);
}

TEST(Compset, PhrdOverInternalSignalRejected) {
  Circuit c = toy1();
  CnfFormula f = encodeCircuit(c);
  Specification spec;
  spec.phrd.push_back({"bad", {Clause{{Lit::pos(*f.vars().findByName("y"))}, std::nullopt}}});
  EXPECT_THROW(compset(spec, c), std::invalid_argument);
}

TEST(Compset, GoldenSignatureChecked) {
  Specification spec;
  spec.golden = parseNetlist("input a b; output o; o = AND(a, b);", NetlistFormat::Simple);
  EXPECT_THROW(compset(spec, toy1()), std::invalid_argument);
}

TEST(Compset, ParallelRunMatchesSerial) {
  std::mt19937_64 rng(8);
  for (int round = 0; round < 5; ++round) {
    Circuit c = randomCircuit(rng, RandomCircuitShape{5, 14, 3, 0, true});
    CompsetOptions serial;
    CompsetOptions par;
    par.jobs = 4;
    CompsetReport a = compset(Specification{}, c, serial);
    CompsetReport b = compset(Specification{}, c, par);
    ASSERT_EQ(a.gates.size(), b.gates.size());
    for (std::size_t i = 0; i < a.gates.size(); ++i) {
      EXPECT_EQ(a.gates[i].mutation, b.gates[i].mutation);
      EXPECT_EQ(a.gates[i].outcome, b.gates[i].outcome);
    }
    ASSERT_EQ(a.tests.size(), b.tests.size());
    for (std::size_t i = 0; i < a.tests.size(); ++i) EXPECT_EQ(a.tests[i].x, b.tests[i].x);
  }
}

TEST(Compset, BudgetSkipsGates) {
  CompsetOptions o;
  o.pqe.clauseBudget = 0;
  CompsetReport r = compset(Specification{}, toy1(), o);
  EXPECT_EQ(r.gatesProcessed.size(), 2u);
  for (const GateRecord& g : r.gates) EXPECT_EQ(g.outcome, GateOutcome::Skipped);
}

TEST(Compset, ContinueAfterBugCollectsAll) {
  Specification spec;
  spec.golden = toy1();
  CompsetOptions o;
  o.continueAfterBug = true;
  CompsetReport r = compset(spec, toy1Buggy(), o);
  EXPECT_TRUE(r.tst.has_value());
  EXPECT_EQ(r.gatesProcessed.size(), 2u);
  EXPECT_GE(r.bugs.size(), 1u);
}

TEST(JointTest, SamePropertyGivesItsOwnTest) {
  Circuit c = toy1();
  CnfFormula f = encodeCircuit(c);
  auto q = propertyOf(f, gateSubst(f, 0, GateKind::Or));
  auto t = jointTest(f, q, q);
  ASSERT_TRUE(t.has_value());
  EXPECT_EQ(simulate(c, t->x).outputs, t->z);
}

TEST(JointTest, Toy1StuckAtZeroPair) {
  Circuit c = toy1();
  CnfFormula f = encodeCircuit(c);
  auto q1 = propertyOf(f, stuckAt(f, 0, false));
  auto q2 = propertyOf(f, stuckAt(f, 1, false));
  auto b1 = breakingSet(c, 0, false);
  auto b2 = breakingSet(c, 1, false);
  bool common = std::any_of(b1.begin(), b1.end(), [&](const Bits& x) { return b2.count(x) > 0; });
  auto t = jointTest(f, q1, q2);
  EXPECT_EQ(t.has_value(), common);
  if (t) {
    EXPECT_TRUE(b1.count(t->x));
    EXPECT_TRUE(b2.count(t->x));
  }
}

TEST(JointTest, DisjointBreakingSetsGiveNothing) {
  Circuit c = parseNetlist("input a b; output o p; o = BUF(a); p = BUF(b);", NetlistFormat::Simple);
  CnfFormula f = encodeCircuit(c);
  // o sa0 is detected only by a=1, o sa1 only by a=0.
  auto q1 = propertyOf(f, stuckAt(f, 0, false));
  auto q2 = propertyOf(f, stuckAt(f, 0, true));
  EXPECT_FALSE(jointTest(f, q1, q2).has_value());
}

TEST(JointTest, RandomPairsMatchEnumeration) {
  std::mt19937_64 rng(77);
  int checked = 0;
  while (checked < 20) {
    Circuit c = randomCircuit(rng, RandomCircuitShape{3 + rng() % 4, 6 + rng() % 5, 1 + rng() % 3, 0, true});
    CnfFormula f = encodeCircuit(c);
    std::size_t g1 = rng() % c.gates().size(), g2 = rng() % c.gates().size();
    bool v1 = rng() % 2, v2 = rng() % 2;
    auto b1 = breakingSet(c, g1, v1);
    auto b2 = breakingSet(c, g2, v2);
    if (b1.empty() || b2.empty()) continue;
    ++checked;
    auto q1 = propertyOf(f, stuckAt(f, g1, v1));
    auto q2 = propertyOf(f, stuckAt(f, g2, v2));
    bool common = std::any_of(b1.begin(), b1.end(), [&](const Bits& x) { return b2.count(x) > 0; });
    auto t = jointTest(f, q1, q2);
    EXPECT_EQ(t.has_value(), common);
    if (t) EXPECT_TRUE(b1.count(t->x) && b2.count(t->x));
  }
}

TEST(Atpg, AndGateStuckAtZero) {
  Circuit c = readNetlistFile(FALSEPROP_DATA_DIR "/and1.net");
  AtpgResult r = atpgStuckAt(c, 0, false);
  ASSERT_TRUE(r.detected());
  EXPECT_EQ(r.test->x, (Bits{true, true}));
  EXPECT_EQ(r.test->z, Bits{true});
}

TEST(Atpg, MaskedFaultIsUndetectable) {
  Circuit c = parseNetlist("input a b; output o; k = CONST0(); m = XOR(a, b); o = AND(m, k);",
                           NetlistFormat::Simple);
  std::size_t m = 0;
  for (std::size_t i = 0; i < c.gates().size(); ++i)
    if (c.varName(c.gates()[i].output) == "m") m = i;
  EXPECT_FALSE(atpgStuckAt(c, m, false).detected());
  EXPECT_FALSE(atpgStuckAt(c, m, true).detected());
}

TEST(Atpg, MatchesMiterOnRandomCircuits) {
  std::mt19937_64 rng(12);
  for (int round = 0; round < 15; ++round) {
    Circuit c = randomCircuit(rng, RandomCircuitShape{3 + rng() % 5, 12, 3, 0, true});
    auto results = atpgAllFaults(c, {}, 2);
    ASSERT_EQ(results.size(), 2 * c.gates().size());
    for (const AtpgResult& r : results) {
      Circuit faulty = oracle::withStuckAt(c, r.gate, r.value);
      bool miter = !oracle::distinguishingInputs(c, faulty).empty();
      EXPECT_EQ(r.detected(), miter) << "gate " << r.gate << " sa" << r.value;
      if (r.test) {
        EXPECT_NE(oracle::outputsOf(c, r.test->x), oracle::outputsOf(faulty, r.test->x));
        EXPECT_EQ(oracle::outputsOf(c, r.test->x), r.test->z);
      }
    }
  }
}

TEST(ParallelFor, RethrowsErrors) {
  EXPECT_THROW(parallelFor(10, 3, [](std::size_t i) { if (i == 7) throw std::runtime_error("x"); }),
               std::runtime_error);
  std::vector<int> hit(50, 0);
  parallelFor(50, 4, [&](std::size_t i) { hit[i]++; });
  EXPECT_TRUE(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
}
