#include "falseprop/verify.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

#include "falseprop/sat.hpp"

namespace fprop {

std::string_view toString(PropertyStatus s) {
  switch (s) {
    case PropertyStatus::True:
      return "true";
    case PropertyStatus::False:
      return "false";
    case PropertyStatus::Unknown:
      return "unknown";
  }
  return "?";
}

std::string_view toString(GateOutcome o) {
  switch (o) {
    case GateOutcome::FalseProp:
      return "false-prop";
    case GateOutcome::TrueProp:
      return "true-prop";
    case GateOutcome::Skipped:
      return "skipped";
  }
  return "?";
}

std::vector<Var> externalVars(const CnfFormula& f) {
  std::vector<Var> vs(f.vars().inputs().begin(), f.vars().inputs().end());
  vs.insert(vs.end(), f.vars().outputs().begin(), f.vars().outputs().end());
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  return vs;
}

bool isInputOnly(const CnfFormula& f, const Clause& c) {
  return std::all_of(c.lits.begin(), c.lits.end(), [&](Lit l) { return f.vars().role(l.var()) == Role::Input; });
}

TestVector testFromModel(const CnfFormula& f, const Bits& model, std::size_t brokenClause) {
  TestVector t;
  for (Var v : f.vars().inputs()) t.x.push_back(model.at(v));
  for (Var v : f.vars().outputs()) t.z.push_back(model.at(v));
  t.brokenClause = brokenClause;
  return t;
}

Property classifyProperty(const CnfFormula& f, std::span<const Clause> q, std::string provenance) {
  Property p;
  p.provenance = std::move(provenance);
  for (const Clause& c : q) {
    if (isInputOnly(f, c))
      ++p.inputOnlyDropped;
    else
      p.clauses.push_back(c);
  }
  if (auto b = breakImplication(f, p.clauses)) {
    p.status = PropertyStatus::False;
    p.witness = testFromModel(f, b->model, b->clause);
  } else {
    p.status = PropertyStatus::True;
  }
  return p;
}

void checkSpecification(const Specification& spec, const Circuit& n) {
  if (!spec.golden) return;
  const Circuit& g = *spec.golden;
  auto sameNames = [&](std::span<const VarId> a, std::span<const VarId> b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (n.varName(a[i]) != g.varName(b[i])) return false;
    return true;
  };
  if (g.isSequential() != n.isSequential() || !sameNames(n.inputs(), g.inputs()) ||
      !sameNames(n.outputs(), g.outputs()))
    throw std::invalid_argument("golden circuit '" + g.name() + "' does not have the input/output signature of '" +
                                n.name() + "'");
}

namespace {

Bits externalAssignment(const CnfFormula& f, const TestVector& t) {
  Bits a(f.numVars(), false);
  auto in = f.vars().inputs();
  auto out = f.vars().outputs();
  for (std::size_t i = 0; i < in.size(); ++i) a[in[i]] = t.x.at(i);
  for (std::size_t i = 0; i < out.size(); ++i) a[out[i]] = t.z.at(i);
  return a;
}

void checkPhrd(const Specification& spec, const CnfFormula& f) {
  for (const NamedProperty& p : spec.phrd)
    for (const Clause& c : p.clauses)
      for (Lit l : c.lits) {
        if (l.var() >= f.numVars())
          throw std::invalid_argument("property '" + p.name + "' uses an unknown variable");
        Role r = f.vars().role(l.var());
        if (r != Role::Input && r != Role::Output)
          throw std::invalid_argument("property '" + p.name + "' mentions internal signal '" +
                                      f.vars().name(l.var()) + "'");
      }
}

struct GateEval {
  GateRecord record;
  std::optional<TestVector> bug;
  std::string reason;
};

GateEval evaluateGate(const Specification& spec, const CnfFormula& f, std::size_t group,
                      const CompsetOptions& options) {
  GateEval out;
  GateRecord& rec = out.record;
  rec.group = group;
  rec.gate = f.vars().name(f.group(group).output);
  std::vector<Var> free = externalVars(f);
  auto candidates = mutationsOfGroup(f, group, options.policy);
  for (const Mutation& m : candidates) {
    MutatedFormula mf = applyMutation(f, m);
    PqeProblem p = makePqeProblem(mf, free);
    PqeOptions po = options.pqe;
    po.earlyStop = false;
    PqeSolution sol = pqeCegar(p, po);
    rec.mutation = m.id;
    rec.stats = sol.stats;
    rec.partial = sol.partial;
    if (sol.budgetExceeded) {
      rec.outcome = GateOutcome::Skipped;
      rec.property = Property{};
      rec.property.provenance = m.id;
      return out;
    }
    std::vector<Clause> q = noiseFilter(sol.q, mf.formula, mf.fPrime);
    rec.property = classifyProperty(f, q, m.id);
    rec.total = m.kind != MutationKind::ClauseFlip || checkTotality(mf.formula);
    if (rec.property.status == PropertyStatus::False) {
      rec.outcome = GateOutcome::FalseProp;
      const TestVector& t = *rec.property.witness;
      if (auto name = violatedProperty(spec, f, t)) {
        out.bug = t;
        out.reason = "breaks property '" + *name + "'";
      } else if (spec.golden) {
        Bits z = simulate(*spec.golden, t.x).outputs;
        if (z != t.z) {
          out.bug = t;
          out.reason = "disagrees with golden model '" + spec.golden->name() + "'";
        }
      }
      return out;
    }
    rec.outcome = GateOutcome::TrueProp;
  }
  return out;
}

}  // namespace

std::optional<std::string> violatedProperty(const Specification& spec, const CnfFormula& f, const TestVector& t) {
  Bits a = externalAssignment(f, t);
  for (const NamedProperty& p : spec.phrd)
    for (const Clause& c : p.clauses)
      if (!c.satisfiedBy(a)) return p.name;
  return std::nullopt;
}

void parallelFor(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex errorMutex;
  {
    std::vector<std::jthread> workers;
    unsigned n = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
    for (unsigned w = 0; w < n; ++w)
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(errorMutex);
            if (!error) error = std::current_exception();
          }
        }
      });
  }
  if (error) std::rethrow_exception(error);
}

CompsetReport compset(const Specification& spec, const Circuit& n, const CompsetOptions& options) {
  if (n.isSequential()) throw std::invalid_argument("compset expects a combinational circuit; use the sequential mode");
  checkSpecification(spec, n);
  CnfFormula f = encodeCircuit(n);
  checkPhrd(spec, f);

  const std::size_t gates = f.groups().size();
  std::vector<std::optional<GateEval>> evals(gates);
  std::atomic<std::size_t> firstBug{std::numeric_limits<std::size_t>::max()};
  parallelFor(gates, options.jobs, [&](std::size_t g) {
    if (!options.continueAfterBug && g > firstBug.load()) return;
    GateEval e = evaluateGate(spec, f, g, options);
    if (e.bug && !options.continueAfterBug) {
      std::size_t cur = firstBug.load();
      while (g < cur && !firstBug.compare_exchange_weak(cur, g)) {
      }
    }
    evals[g] = std::move(e);
  });

  CompsetReport report;
  std::set<Bits> seen;
  for (std::size_t g = 0; g < gates; ++g) {
    GateEval& e = *evals[g];
    report.gatesProcessed.push_back(g);
    if (e.record.outcome == GateOutcome::FalseProp) report.pfls.push_back(e.record.property);
    report.gates.push_back(e.record);
    if (e.bug) {
      report.bugs.push_back(*e.bug);
      if (!report.tst) {
        report.tst = e.bug;
        report.reason = e.reason;
        report.tstGate = g;
      }
      if (!options.continueAfterBug) break;
      continue;
    }
    if (e.record.outcome == GateOutcome::FalseProp) {
      const TestVector& t = *e.record.property.witness;
      if (seen.insert(t.x).second) report.tests.push_back(t);
    }
  }
  return report;
}

std::optional<TestVector> jointTest(const CnfFormula& f, std::span<const Clause> q1, std::span<const Clause> q2) {
  Solver s(f.numVars());
  s.addFormula(f);
  for (std::size_t i = 0; i < q1.size(); ++i)
    for (std::size_t j = 0; j < q2.size(); ++j) {
      std::vector<Lit> a;
      for (Lit l : q1[i].lits) a.push_back(~l);
      for (Lit l : q2[j].lits) a.push_back(~l);
      SatResult r = s.solve(a);
      if (!r.sat()) continue;
      TestVector t = testFromModel(f, r.model, i);
      t.secondClause = j;
      return t;
    }
  return std::nullopt;
}

AtpgResult atpgStuckAt(const Circuit& n, std::size_t gate, bool value, const PqeOptions& options) {
  if (n.isSequential()) throw std::invalid_argument("stuck-at test generation expects a combinational circuit");
  if (gate >= n.gates().size()) throw std::out_of_range("gate index " + std::to_string(gate));
  CnfFormula f = encodeCircuit(n);
  AtpgResult res;
  res.gate = gate;
  res.value = value;
  Mutation m = stuckAt(f, gate, value);
  if (m.identity) return res;
  MutatedFormula mf = applyMutation(f, m);
  PqeProblem p = makePqeProblem(mf, externalVars(f));
  p.original = f;
  PqeOptions po = options;
  po.earlyStop = true;
  PqeSolution sol = pqeCegar(p, po);
  res.stats = sol.stats;
  if (sol.earlyStopped) {
    res.breaker = sol.breakerClause;
    res.test = testFromModel(f, sol.breakerModel, 0);
    return res;
  }
  if (sol.budgetExceeded) {
    res.budgetExceeded = true;
    return res;
  }
  // Complete run: F implies every clause, so only noise can remain.
  std::vector<Clause> q = noiseFilter(sol.q, mf.formula, mf.fPrime);
  if (auto b = breakImplication(f, q)) {
    res.breaker = q[b->clause];
    res.test = testFromModel(f, b->model, 0);
  }
  return res;
}

std::vector<AtpgResult> atpgAllFaults(const Circuit& n, const PqeOptions& options, unsigned jobs) {
  std::vector<AtpgResult> out(2 * n.gates().size());
  parallelFor(out.size(), jobs, [&](std::size_t i) { out[i] = atpgStuckAt(n, i / 2, (i % 2) == 1, options); });
  return out;
}

}  // namespace fprop
