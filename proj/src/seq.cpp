#include "falseprop/seq.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <set>

#include "falseprop/sat.hpp"

namespace fprop {

namespace {

constexpr Var kUnset = std::numeric_limits<Var>::max();

std::string framed(const std::string& name, std::size_t k) { return name + "@" + std::to_string(k); }

// Renames the variables of a clause through `map` (entries of kUnset reject).
Clause renamed(const Clause& c, const std::vector<Var>& map) {
  std::vector<Lit> lits;
  for (Lit l : c.lits) {
    if (l.var() >= map.size() || map[l.var()] == kUnset)
      throw std::invalid_argument("clause " + toString(c) + " mentions a variable outside the renaming");
    lits.emplace_back(map[l.var()], l.negative());
  }
  return *Clause::make(std::move(lits), c.origin);
}

std::vector<Clause> renamedAll(std::span<const Clause> cs, const std::vector<Var>& map) {
  std::vector<Clause> out;
  for (const Clause& c : cs) out.push_back(renamed(c, map));
  return out;
}

}  // namespace

std::vector<Var> UnrolledCnf::stateVars(std::size_t k) const {
  if (k < 1 || k > n + 1) throw std::out_of_range("state frame " + std::to_string(k));
  std::vector<Var> out;
  for (const Latch& l : circuit.latches())
    out.push_back(k <= n ? frameMaps[k - 1][l.state] : frameMaps[n - 1][l.next]);
  return out;
}

std::vector<Var> UnrolledCnf::inputVars(std::size_t frame) const {
  std::vector<Var> out;
  for (VarId v : circuit.inputs()) out.push_back(frameMaps.at(frame - 1)[v]);
  return out;
}

std::size_t UnrolledCnf::groupOf(std::size_t frame, std::size_t gate) const {
  if (frame < 1 || frame > n || gate >= circuit.gates().size()) throw std::out_of_range("no such gate copy");
  return (frame - 1) * circuit.gates().size() + gate;
}

UnrolledCnf unroll(const Circuit& m, std::size_t n) {
  if (!m.isSequential()) throw std::invalid_argument("unrolling needs a sequential circuit");
  if (n < 1) throw std::invalid_argument("frame count must be at least 1");
  UnrolledCnf u;
  u.n = n;
  u.circuit = m;
  u.frameMaps.assign(n, std::vector<Var>(m.numVars(), kUnset));

  std::vector<Role> role(m.numVars(), Role::Internal);
  for (VarId v : m.outputs()) role[v] = Role::Output;
  std::vector<std::optional<std::size_t>> latchOfNext(m.numVars());
  for (std::size_t k = 0; k < m.latches().size(); ++k) latchOfNext[m.latches()[k].next] = k;

  VarMap vm;
  for (const Latch& l : m.latches()) u.frameMaps[0][l.state] = vm.addVar(Role::State, 1, framed(m.varName(l.state), 1));
  for (std::size_t i = 1; i <= n; ++i) {
    auto& fm = u.frameMaps[i - 1];
    if (i > 1)
      for (const Latch& l : m.latches()) fm[l.state] = u.frameMaps[i - 2][l.next];
    for (VarId v : m.inputs()) fm[v] = vm.addVar(Role::Input, static_cast<std::uint32_t>(i), framed(m.varName(v), i));
    for (const Gate& g : m.gates()) {
      if (auto k = latchOfNext[g.output]) {
        Role r = i < n ? Role::State : Role::NextState;
        fm[g.output] = vm.addVar(r, static_cast<std::uint32_t>(i + 1), framed(m.varName(m.latches()[*k].state), i + 1));
      } else {
        fm[g.output] = vm.addVar(role[g.output], static_cast<std::uint32_t>(i), framed(m.varName(g.output), i));
      }
    }
  }

  CnfFormula f(std::move(vm));
  for (std::size_t i = 1; i <= n; ++i) {
    const auto& fm = u.frameMaps[i - 1];
    for (std::size_t gi = 0; gi < m.gates().size(); ++gi) {
      const Gate& g = m.gates()[gi];
      std::vector<Var> fanin;
      for (VarId v : g.fanin) fanin.push_back(fm[v]);
      GateGroup group{g.kind, fanin, fm[g.output], static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(gi), {}};
      auto origin = static_cast<std::uint32_t>(f.groups().size());
      for (Clause& c : encodeGate(g.kind, fanin, fm[g.output])) {
        c.origin = origin;
        std::size_t idx = f.addClause(std::move(c));
        group.clauses.push_back(idx);
        u.transition.push_back(idx);
      }
      f.addGroup(std::move(group));
    }
  }
  for (const Latch& l : m.latches()) {
    if (l.init == LatchInit::Free) continue;
    Var s = u.frameMaps[0][l.state];
    u.i1.push_back(f.addClause(Clause{{Lit(s, l.init == LatchInit::Zero)}, std::nullopt}));
  }
  u.formula = std::move(f);
  return u;
}

Mutation replicateAcrossFrames(const UnrolledCnf& u, const Mutation& mu) {
  if (!mu.group) throw std::invalid_argument("only gate mutations can be replicated");
  const GateGroup& src = u.formula.group(*mu.group);
  std::size_t gate = src.circuitGate;
  // Unrolled var of the source frame -> circuit var.
  std::vector<Var> toCircuit(u.formula.numVars(), kUnset);
  const auto& srcMap = u.frameMaps[src.frame - 1];
  for (Var cv = 0; cv < srcMap.size(); ++cv) toCircuit[srcMap[cv]] = cv;

  Mutation out = mu;
  out.target.clear();
  out.gStar.clear();
  out.id = mu.id + ":all-frames";
  for (std::size_t i = 1; i <= u.n; ++i) {
    std::size_t h = u.groupOf(i, gate);
    const GateGroup& dst = u.formula.group(h);
    for (std::size_t t : mu.target) {
      auto pos = std::find(src.clauses.begin(), src.clauses.end(), t);
      if (pos == src.clauses.end()) throw std::invalid_argument("mutation target is not inside its gate group");
      out.target.push_back(dst.clauses[static_cast<std::size_t>(pos - src.clauses.begin())]);
    }
    std::vector<Var> map(u.formula.numVars(), kUnset);
    for (Var v = 0; v < toCircuit.size(); ++v)
      if (toCircuit[v] != kUnset) map[v] = u.frameMaps[i - 1][toCircuit[v]];
    for (const Clause& c : mu.gStar) {
      Clause r = renamed(c, map);
      r.origin = static_cast<std::uint32_t>(h);
      out.gStar.push_back(std::move(r));
    }
  }
  return out;
}

SafetyProperty falseSafetyProp(const UnrolledCnf& u, const Mutation& mu, const PqeOptions& options) {
  for (std::size_t t : mu.target)
    if (std::find(u.i1.begin(), u.i1.end(), t) != u.i1.end())
      throw std::invalid_argument("mutations may not touch the initial state clauses");
  MutatedFormula mf = applyMutation(u.formula, mu);
  PqeProblem p = makePqeProblem(mf, u.finalState());
  SafetyProperty out;
  out.provenance = mu.id;
  PqeOptions po = options;
  po.earlyStop = false;
  out.solution = pqeCegar(p, po);
  out.unrolled = noiseFilter(out.solution.q, mf.formula, mf.fPrime);
  std::vector<Var> back(u.formula.numVars(), kUnset);
  std::vector<Var> fin = u.finalState();
  for (std::size_t k = 0; k < fin.size(); ++k) back[fin[k]] = u.circuit.latches()[k].state;
  out.clauses = renamedAll(out.unrolled, back);
  return out;
}

bool replayTrace(const Circuit& m, const CexTrace& t, std::span<const Clause> q) {
  if (t.states.size() != t.inputs.size() + 1 || t.states.empty()) return false;
  const auto latches = m.latches();
  for (std::size_t k = 0; k < latches.size(); ++k) {
    if (latches[k].init == LatchInit::Zero && t.states[0][k]) return false;
    if (latches[k].init == LatchInit::One && !t.states[0][k]) return false;
  }
  for (std::size_t i = 0; i < t.inputs.size(); ++i) {
    SimResult r = simulate(m, t.inputs[i], t.states[i]);
    if (r.nextState != t.states[i + 1]) return false;
    if (i < t.outputs.size() && r.outputs != t.outputs[i]) return false;
  }
  Bits a(m.numVars(), false);
  for (std::size_t k = 0; k < latches.size(); ++k) a[latches[k].state] = t.states.back()[k];
  return !std::all_of(q.begin(), q.end(), [&](const Clause& c) { return c.satisfiedBy(a); });
}

std::optional<CexTrace> findCounterexample(const UnrolledCnf& u, std::span<const Clause> q) {
  std::vector<Var> toFinal(u.circuit.numVars(), kUnset);
  std::vector<Var> fin = u.finalState();
  for (std::size_t k = 0; k < fin.size(); ++k) toFinal[u.circuit.latches()[k].state] = fin[k];
  std::vector<Clause> qn = renamedAll(q, toFinal);
  auto b = breakImplication(u.formula, qn);
  if (!b) return std::nullopt;
  CexTrace t;
  t.brokenClause = b->clause;
  for (std::size_t k = 1; k <= u.n + 1; ++k) {
    Bits s;
    for (Var v : u.stateVars(k)) s.push_back(b->model[v]);
    t.states.push_back(std::move(s));
  }
  for (std::size_t i = 1; i <= u.n; ++i) {
    Bits x, z;
    for (Var v : u.inputVars(i)) x.push_back(b->model[v]);
    for (VarId v : u.circuit.outputs()) z.push_back(b->model[u.frameMaps[i - 1][v]]);
    t.inputs.push_back(std::move(x));
    t.outputs.push_back(std::move(z));
  }
  if (!replayTrace(u.circuit, t, q)) throw std::logic_error("counterexample failed to replay");
  return t;
}

ReachSet reachOracle(const Circuit& m, std::uint64_t maxStates, std::size_t minFrames) {
  const auto latches = m.latches();
  const std::size_t ns = latches.size();
  const std::size_t ni = m.inputs().size();
  if (ns >= 63 || (std::uint64_t{1} << ns) > maxStates)
    throw StateSpaceError(std::to_string(ns) + " latches exceed the state bound of " + std::to_string(maxStates));
  if (ni > 20) throw StateSpaceError(std::to_string(ni) + " inputs are too many for explicit image computation");

  std::set<std::uint64_t> init;
  std::uint64_t base = 0;
  std::vector<std::size_t> freeLatches;
  for (std::size_t k = 0; k < ns; ++k) {
    if (latches[k].init == LatchInit::One) base |= std::uint64_t{1} << k;
    if (latches[k].init == LatchInit::Free) freeLatches.push_back(k);
  }
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << freeLatches.size()); ++r) {
    std::uint64_t s = base;
    for (std::size_t j = 0; j < freeLatches.size(); ++j)
      if ((r >> j) & 1U) s |= std::uint64_t{1} << freeLatches[j];
    init.insert(s);
  }

  ReachSet out;
  out.frames.emplace_back(init.begin(), init.end());
  std::set<std::uint64_t> all = init;
  std::set<std::uint64_t> cur = init;
  for (std::size_t k = 1;; ++k) {
    std::set<std::uint64_t> next;
    for (std::uint64_t s : cur) {
      Bits sb = bitsOf(s, ns);
      for (std::uint64_t x = 0; x < (std::uint64_t{1} << ni); ++x)
        next.insert(rowOf(simulate(m, bitsOf(x, ni), sb).nextState));
    }
    bool grew = false;
    for (std::uint64_t s : next) grew = all.insert(s).second || grew;
    if (grew) out.diameter = k;
    if (!grew && k > minFrames) break;
    out.frames.emplace_back(next.begin(), next.end());
    cur = std::move(next);
  }
  out.closed = true;
  out.reachable.assign(all.begin(), all.end());
  return out;
}

namespace {

struct SeqGateEval {
  SeqGateRecord record;
  bool bug = false;
  std::string reason;
};

std::optional<std::string> seqBug(const Specification& spec, const Circuit& m, const CexTrace& t) {
  Bits a(m.numVars(), false);
  for (std::size_t k = 0; k < m.latches().size(); ++k) a[m.latches()[k].state] = t.states.back()[k];
  for (const NamedProperty& p : spec.phrd)
    for (const Clause& c : p.clauses)
      if (!c.satisfiedBy(a)) return "breaks property '" + p.name + "'";
  if (spec.golden) {
    const Circuit& g = *spec.golden;
    Bits s = t.states.front();
    for (std::size_t i = 0; i < t.inputs.size(); ++i) {
      SimResult r = simulate(g, t.inputs[i], s);
      if (r.outputs != t.outputs[i])
        return "disagrees with golden model '" + g.name() + "' at frame " + std::to_string(i + 1);
      s = r.nextState;
    }
  }
  return std::nullopt;
}

void checkSeqPhrd(const Specification& spec, const Circuit& m) {
  std::vector<bool> isState(m.numVars(), false);
  for (const Latch& l : m.latches()) isState[l.state] = true;
  for (const NamedProperty& p : spec.phrd)
    for (const Clause& c : p.clauses)
      for (Lit l : c.lits)
        if (l.var() >= m.numVars() || !isState[l.var()])
          throw std::invalid_argument("property '" + p.name + "' must only mention latch outputs");
  if (spec.golden && spec.golden->latches().size() != m.latches().size())
    throw std::invalid_argument("golden circuit has a different number of latches");
}

}  // namespace

SeqCompsetReport seqCompset(const Specification& spec, const Circuit& m, std::size_t n,
                            const SeqCompsetOptions& options) {
  checkSpecification(spec, m);
  checkSeqPhrd(spec, m);
  UnrolledCnf u = unroll(m, n);
  const std::size_t gates = m.gates().size();
  std::vector<std::optional<SeqGateEval>> evals(gates);
  std::atomic<std::size_t> firstBug{std::numeric_limits<std::size_t>::max()};

  parallelFor(gates, options.jobs, [&](std::size_t gi) {
    if (!options.continueAfterBug && gi > firstBug.load()) return;
    SeqGateEval e;
    SeqGateRecord& rec = e.record;
    rec.gate = gi;
    rec.name = m.varName(m.gates()[gi].output);
    for (const Mutation& base : mutationsOfGroup(u.formula, u.groupOf(1, gi), options.policy)) {
      Mutation mu = options.replicate ? replicateAcrossFrames(u, base) : base;
      SafetyProperty sp = falseSafetyProp(u, mu, options.pqe);
      rec.mutation = mu.id;
      rec.stats = sp.solution.stats;
      rec.partial = sp.solution.partial;
      if (sp.solution.budgetExceeded) {
        rec.outcome = GateOutcome::Skipped;
        rec.clauses.clear();
        break;
      }
      rec.clauses = sp.clauses;
      if (auto t = findCounterexample(u, sp.clauses)) {
        rec.outcome = GateOutcome::FalseProp;
        rec.trace = t;
        if (auto why = seqBug(spec, m, *t)) {
          e.bug = true;
          e.reason = *why;
        }
        break;
      }
      rec.outcome = GateOutcome::TrueProp;
    }
    if (e.bug && !options.continueAfterBug) {
      std::size_t cur = firstBug.load();
      while (gi < cur && !firstBug.compare_exchange_weak(cur, gi)) {
      }
    }
    evals[gi] = std::move(e);
  });

  SeqCompsetReport report;
  report.frames = n;
  for (std::size_t gi = 0; gi < gates; ++gi) {
    SeqGateEval& e = *evals[gi];
    report.gatesProcessed.push_back(gi);
    report.gates.push_back(e.record);
    if (e.bug) {
      if (!report.tst) {
        report.tst = e.record.trace;
        report.reason = e.reason;
        report.tstGate = gi;
      }
      if (!options.continueAfterBug) break;
      continue;
    }
    if (e.record.trace) report.traces.push_back(*e.record.trace);
  }
  return report;
}

}  // namespace fprop
