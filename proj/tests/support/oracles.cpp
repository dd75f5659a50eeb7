#include "support/oracles.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace oracle {

using fprop::bitsOf;
using fprop::Circuit;
using fprop::CircuitBuilder;
using fprop::GateKind;

bool evalClauses(std::span<const Clause> clauses, const Bits& a) {
  for (const Clause& c : clauses) {
    bool sat = false;
    for (Lit l : c.lits) sat = sat || l.satisfiedBy(a[l.var()]);
    if (!sat) return false;
  }
  return true;
}

bool evalFormula(const CnfFormula& f, const Bits& a) { return evalClauses(f.clauses(), a); }

namespace {

// 0 unassigned, 1 true, 2 false
using Assign = std::vector<std::uint8_t>;

bool litTrue(const Assign& a, Lit l) { return a[l.var()] == (l.negative() ? 2 : 1); }
bool litFalse(const Assign& a, Lit l) { return a[l.var()] == (l.negative() ? 1 : 2); }
void setLit(Assign& a, Lit l) { a[l.var()] = l.negative() ? 2 : 1; }

bool dpllRec(std::span<const Clause> clauses, Assign a, Bits& out) {
  for (;;) {
    bool changed = false;
    for (const Clause& c : clauses) {
      std::size_t open = 0;
      Lit last;
      bool sat = false;
      for (Lit l : c.lits) {
        if (litTrue(a, l)) {
          sat = true;
          break;
        }
        if (!litFalse(a, l)) {
          ++open;
          last = l;
        }
      }
      if (sat) continue;
      if (open == 0) return false;
      if (open == 1) {
        setLit(a, last);
        changed = true;
      }
    }
    if (!changed) break;
  }
  auto it = std::find(a.begin(), a.end(), 0);
  if (it == a.end()) {
    out.assign(a.size(), false);
    for (std::size_t v = 0; v < a.size(); ++v) out[v] = a[v] == 1;
    return true;
  }
  auto v = static_cast<std::size_t>(it - a.begin());
  for (std::uint8_t val : {std::uint8_t{2}, std::uint8_t{1}}) {
    Assign b = a;
    b[v] = val;
    if (dpllRec(clauses, std::move(b), out)) return true;
  }
  return false;
}

}  // namespace

std::optional<Bits> dpll(std::span<const Clause> clauses, std::size_t numVars, std::span<const Lit> assumptions) {
  Assign a(numVars, 0);
  for (Lit l : assumptions) {
    if (litFalse(a, l)) return std::nullopt;
    setLit(a, l);
  }
  Bits out;
  if (dpllRec(clauses, std::move(a), out)) return out;
  return std::nullopt;
}

std::optional<Bits> bruteSat(std::span<const Clause> clauses, std::size_t numVars) {
  if (numVars > 24) throw std::invalid_argument("bruteSat: too many variables");
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << numVars); ++r) {
    Bits a = bitsOf(r, numVars);
    if (evalClauses(clauses, a)) return a;
  }
  return std::nullopt;
}

std::vector<bool> existsTable(std::span<const Clause> clauses, std::size_t numVars, std::span<const Var> free) {
  std::vector<Var> bound;
  std::vector<bool> isFree(numVars, false);
  for (Var v : free) isFree[v] = true;
  for (Var v = 0; v < numVars; ++v)
    if (!isFree[v]) bound.push_back(v);
  if (numVars > 24) throw std::invalid_argument("existsTable: too many variables");
  std::vector<bool> table(std::size_t{1} << free.size(), false);
  Bits a(numVars, false);
  for (std::uint64_t r = 0; r < table.size(); ++r) {
    Bits fb = bitsOf(r, free.size());
    for (std::size_t i = 0; i < free.size(); ++i) a[free[i]] = fb[i];
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << bound.size()); ++s) {
      Bits bb = bitsOf(s, bound.size());
      for (std::size_t i = 0; i < bound.size(); ++i) a[bound[i]] = bb[i];
      if (evalClauses(clauses, a)) {
        table[r] = true;
        break;
      }
    }
  }
  return table;
}

std::vector<bool> clauseTable(std::span<const Clause> clauses, std::span<const Var> vars) {
  Var maxVar = 0;
  for (Var v : vars) maxVar = std::max(maxVar, v);
  for (const Clause& c : clauses)
    for (Lit l : c.lits) maxVar = std::max(maxVar, l.var());
  std::vector<bool> table(std::size_t{1} << vars.size());
  Bits a(maxVar + 1, false);
  for (std::uint64_t r = 0; r < table.size(); ++r) {
    Bits b = bitsOf(r, vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = b[i];
    table[r] = evalClauses(clauses, a);
  }
  return table;
}

bool bruteImplies(std::span<const Clause> h1, std::span<const Clause> h2, std::size_t numVars) {
  if (numVars > 24) throw std::invalid_argument("bruteImplies: too many variables");
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << numVars); ++r) {
    Bits a = bitsOf(r, numVars);
    if (evalClauses(h1, a) && !evalClauses(h2, a)) return false;
  }
  return true;
}

std::vector<Clause> randomCnf(std::mt19937_64& rng, std::size_t numVars, std::size_t numClauses, std::size_t width) {
  std::vector<Clause> out;
  while (out.size() < numClauses) {
    std::vector<Lit> lits;
    for (std::size_t k = 0; k < width; ++k)
      lits.emplace_back(static_cast<Var>(rng() % numVars), (rng() & 1U) != 0);
    if (auto c = Clause::make(std::move(lits))) out.push_back(std::move(*c));
  }
  return out;
}

namespace {

Circuit rebuild(const Circuit& c, std::size_t gate, std::optional<GateKind> kind, bool stuckValue) {
  CircuitBuilder b(c.name());
  for (fprop::VarId v = 0; v < c.numVars(); ++v) b.var(c.varName(v));
  for (auto v : c.inputs()) b.addInput(v);
  for (const auto& l : c.latches()) b.addLatch(l.state, l.next, l.init);
  for (std::size_t i = 0; i < c.gates().size(); ++i) {
    const auto& g = c.gates()[i];
    if (i != gate) {
      b.addGate(g.kind, g.fanin, g.output);
    } else if (kind) {
      b.addGate(*kind, g.fanin, g.output);
    } else {
      b.addGate(stuckValue ? GateKind::Const1 : GateKind::Const0, {}, g.output);
    }
  }
  for (auto v : c.outputs()) b.addOutput(v);
  return std::move(b).build();
}

}  // namespace

Circuit withStuckAt(const Circuit& c, std::size_t gate, bool value) { return rebuild(c, gate, std::nullopt, value); }

Circuit withGateKind(const Circuit& c, std::size_t gate, GateKind kind) { return rebuild(c, gate, kind, false); }

Bits outputsOf(const Circuit& c, const Bits& inputs) { return fprop::simulate(c, inputs).outputs; }

std::vector<Bits> distinguishingInputs(const Circuit& a, const Circuit& b) {
  std::vector<Bits> out;
  std::size_t n = a.inputs().size();
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << n); ++r) {
    Bits x = bitsOf(r, n);
    if (outputsOf(a, x) != outputsOf(b, x)) out.push_back(x);
  }
  return out;
}

Reach explicitReach(const Circuit& c, std::size_t maxFrames) {
  const auto latches = c.latches();
  std::size_t ns = latches.size();
  std::size_t ni = c.inputs().size();
  std::set<std::uint64_t> init;
  std::vector<std::size_t> freeLatches;
  std::uint64_t base = 0;
  for (std::size_t i = 0; i < ns; ++i) {
    if (latches[i].init == fprop::LatchInit::One) base |= std::uint64_t{1} << i;
    if (latches[i].init == fprop::LatchInit::Free) freeLatches.push_back(i);
  }
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << freeLatches.size()); ++r) {
    std::uint64_t s = base;
    for (std::size_t k = 0; k < freeLatches.size(); ++k)
      if ((r >> k) & 1U) s |= std::uint64_t{1} << freeLatches[k];
    init.insert(s);
  }
  Reach out;
  out.frames.emplace_back(init.begin(), init.end());
  std::set<std::uint64_t> seen = init;
  std::set<std::uint64_t> cur = init;
  for (std::size_t k = 1; k <= maxFrames; ++k) {
    std::set<std::uint64_t> next;
    for (std::uint64_t s : cur)
      for (std::uint64_t x = 0; x < (std::uint64_t{1} << ni); ++x)
        next.insert(fprop::rowOf(fprop::simulate(c, bitsOf(x, ni), bitsOf(s, ns)).nextState));
    bool grew = false;
    for (std::uint64_t s : next) grew = seen.insert(s).second || grew;
    if (grew && out.diameter == k - 1) out.diameter = k;
    out.frames.emplace_back(next.begin(), next.end());
    cur = std::move(next);
  }
  return out;
}

}  // namespace oracle
