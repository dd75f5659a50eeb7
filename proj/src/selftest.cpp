#include "falseprop/selftest.hpp"

#include <algorithm>
#include <random>

#include "falseprop/random.hpp"

namespace fprop {

bool SelftestReport::ok() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed == s.cases; });
}

namespace {

void record(SuiteResult& s, bool pass, const std::string& what) {
  ++s.cases;
  if (pass)
    ++s.passed;
  else
    s.failures.push_back(what);
}

std::string caseName(std::size_t i, const std::string& extra) { return "case " + std::to_string(i) + ": " + extra; }

// Exhaustive simulation decides whether any input tells the circuits apart.
bool distinguishable(const Circuit& a, const Circuit& b, const Bits* test) {
  if (test) return simulate(a, *test).outputs != simulate(b, *test).outputs;
  std::size_t n = a.inputs().size();
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << n); ++r) {
    Bits x = bitsOf(r, n);
    if (simulate(a, x).outputs != simulate(b, x).outputs) return true;
  }
  return false;
}

Circuit withConstantGate(const Circuit& c, std::size_t gate, bool value) {
  CircuitBuilder b(c.name());
  for (VarId v = 0; v < c.numVars(); ++v) b.var(c.varName(v));
  for (VarId v : c.inputs()) b.addInput(v);
  for (std::size_t i = 0; i < c.gates().size(); ++i) {
    const Gate& g = c.gates()[i];
    if (i == gate)
      b.addGate(value ? GateKind::Const1 : GateKind::Const0, {}, g.output);
    else
      b.addGate(g.kind, g.fanin, g.output);
  }
  for (VarId v : c.outputs()) b.addOutput(v);
  return std::move(b).build();
}

}  // namespace

SelftestReport runSelftest(const SelftestOptions& options) {
  SelftestReport report;
  report.seed = options.seed;
  std::mt19937_64 rng(options.seed);

  SuiteResult pqe{"pqe-equivalence", 0, 0, {}};
  SuiteResult prop{"false-property-verdict", 0, 0, {}};
  for (std::size_t i = 0; i < options.cases; ++i) {
    RandomCircuitShape shape;
    shape.inputs = 2 + rng() % 5;
    shape.gates = 3 + rng() % 10;
    shape.maxOutputs = 1 + rng() % 3;
    Circuit c = randomCircuit(rng, shape, "sel" + std::to_string(i));
    CnfFormula f = encodeCircuit(c);
    auto ms = enumerateMutations(f, MutationPolicy::Mixed);
    if (ms.empty()) continue;
    const Mutation& m = ms[rng() % ms.size()];
    MutatedFormula mf = applyMutation(f, m);
    PqeProblem p = makePqeProblem(mf, externalVars(f));
    PqeSolution sol = pqeCegar(p);
    record(pqe, !sol.partial && verifyPqeSolution(p, sol.q), caseName(i, m.id));

    std::vector<Clause> q = noiseFilter(sol.q, mf.formula, mf.fPrime);
    Property verdict = classifyProperty(f, q, m.id);
    TruthTable tbl = qeEnumerate(f, externalVars(f));
    TruthTable tblStar = qeEnumerate(mf.formula, externalVars(f));
    TruthTable inputsStar = qeEnumerate(mf.formula, f.vars().inputs());
    // Rows of TBL missing from TBL*; "alive" ones keep some output row
    // under F* for their input, so no input-only clause can exclude them.
    bool incompatible = false;
    bool incompatibleAlive = false;
    for (std::uint64_t r = 0; r < tbl.size(); ++r) {
      if (!tbl[r] || tblStar[r]) continue;
      incompatible = true;
      Bits a(f.numVars(), false);
      for (std::size_t k = 0; k < tbl.vars.size(); ++k) a[tbl.vars[k]] = ((r >> k) & 1U) != 0;
      incompatibleAlive = incompatibleAlive || inputsStar[inputsStar.rowOf(a)];
    }
    bool unfilteredFalse = breakImplication(f, q).has_value();
    bool filteredFalse = verdict.status == PropertyStatus::False;
    record(prop, unfilteredFalse == incompatible && (!incompatibleAlive || filteredFalse) && (!filteredFalse || incompatible),
           caseName(i, m.id));
  }

  SuiteResult atpg{"stuck-at-tests", 0, 0, {}};
  for (std::size_t i = 0; i < options.cases; ++i) {
    RandomCircuitShape shape;
    shape.inputs = 2 + rng() % 5;
    shape.gates = 3 + rng() % 8;
    shape.maxOutputs = 1 + rng() % 2;
    Circuit c = randomCircuit(rng, shape, "atpg" + std::to_string(i));
    auto results = atpgAllFaults(c, {}, options.jobs);
    for (const AtpgResult& r : results) {
      Circuit faulty = withConstantGate(c, r.gate, r.value);
      bool detectable = distinguishable(c, faulty, nullptr);
      bool ok = r.test ? distinguishable(c, faulty, &r.test->x) : !detectable && !r.budgetExceeded;
      record(atpg, ok, caseName(i, c.varName(c.gates()[r.gate].output) + (r.value ? " sa1" : " sa0")));
    }
  }

  SuiteResult seq{"unrolled-reachability", 0, 0, {}};
  for (std::size_t i = 0; i < options.cases; ++i) {
    RandomCircuitShape shape;
    shape.inputs = rng() % 3;
    shape.latches = 1 + rng() % 3;
    shape.gates = 3 + rng() % 6;
    shape.maxOutputs = 1;
    Circuit c = randomCircuit(rng, shape, "seq" + std::to_string(i));
    std::size_t n = 1 + rng() % 3;
    UnrolledCnf u = unroll(c, n);
    ReachSet reach = reachOracle(c, std::uint64_t{1} << 16, n);
    TruthTable t = qeEnumerate(u.formula, u.finalState());
    std::vector<std::uint64_t> rows;
    for (std::uint64_t r = 0; r < t.size(); ++r)
      if (t[r]) rows.push_back(r);
    record(seq, rows == reach.frames.at(n), caseName(i, "n=" + std::to_string(n)));
  }

  report.suites = {std::move(pqe), std::move(prop), std::move(atpg), std::move(seq)};
  return report;
}

Json selftestJson(const SelftestReport& r) {
  Json suites = Json::array();
  for (const SuiteResult& s : r.suites)
    suites.push_back(Json{{"name", s.name}, {"cases", s.cases}, {"passed", s.passed}, {"failures", s.failures}});
  return Json{{"seed", r.seed}, {"ok", r.ok()}, {"suites", std::move(suites)}};
}

}  // namespace fprop
