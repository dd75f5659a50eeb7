#include "falseprop/pqe.hpp"

#include <algorithm>
#include <numeric>

namespace fprop {

namespace {

std::vector<bool> freeMask(std::size_t numVars, std::span<const Var> free) {
  std::vector<bool> mask(numVars, false);
  for (Var v : free) {
    if (v >= numVars) throw std::out_of_range("free variable " + std::to_string(v + 1) + " is not in the formula");
    mask[v] = true;
  }
  return mask;
}

void checkBound(std::size_t width, std::size_t bound) {
  if (width > bound)
    throw EnumerationBoundError(std::to_string(width) + " free variables exceed the enumeration bound of " +
                                std::to_string(bound));
}

std::vector<Lit> rowLits(std::span<const Var> vars, std::uint64_t row) {
  std::vector<Lit> lits;
  lits.reserve(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) lits.emplace_back(vars[i], ((row >> i) & 1U) == 0);
  return lits;
}

std::vector<Lit> negated(std::span<const Lit> lits) {
  std::vector<Lit> out;
  out.reserve(lits.size());
  for (Lit l : lits) out.push_back(~l);
  return out;
}

void sortByVar(std::vector<Lit>& lits) { std::sort(lits.begin(), lits.end()); }

// Index set 0..n-1.
IndexSet allClauses(const CnfFormula& f) {
  IndexSet all(f.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return all;
}

}  // namespace

std::vector<Var> PqeProblem::quantified() const {
  std::vector<bool> mask = freeMask(fStar.numVars(), free);
  std::vector<Var> out;
  for (Var v = 0; v < fStar.numVars(); ++v)
    if (!mask[v]) out.push_back(v);
  return out;
}

PqeProblem makePqeProblem(const MutatedFormula& m, std::vector<Var> free) {
  PqeProblem p;
  p.fStar = m.formula;
  p.gStar = m.gStar;
  p.fPrime = m.fPrime;
  p.free = std::move(free);
  return p;
}

std::size_t TruthTable::countOnes() const { return static_cast<std::size_t>(std::count(rows.begin(), rows.end(), true)); }

std::uint64_t TruthTable::rowOf(const Bits& assignment) const {
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (assignment.at(vars[i])) r |= std::uint64_t{1} << i;
  return r;
}

TruthTable qeEnumerate(const CnfFormula& f, std::span<const std::size_t> clauses, std::span<const Var> free,
                       std::size_t bound) {
  checkBound(free.size(), bound);
  freeMask(f.numVars(), free);
  TruthTable t;
  t.vars.assign(free.begin(), free.end());
  t.rows.assign(std::size_t{1} << free.size(), false);
  Solver s(f.numVars());
  s.addClauses(f, clauses);
  for (std::uint64_t r = 0; r < t.rows.size(); ++r) {
    std::vector<Lit> a = rowLits(free, r);
    t.rows[r] = s.solve(a).sat();
  }
  return t;
}

TruthTable qeEnumerate(const CnfFormula& f, std::span<const Var> free, std::size_t bound) {
  IndexSet all = allClauses(f);
  return qeEnumerate(f, all, free, bound);
}

std::vector<Clause> removeSubsumed(std::span<const Clause> q) {
  std::vector<Clause> out;
  for (std::size_t i = 0; i < q.size(); ++i) {
    bool drop = false;
    for (std::size_t j = 0; j < q.size() && !drop; ++j) {
      if (i == j || !q[j].subsumes(q[i])) continue;
      drop = q[j].size() < q[i].size() || j < i;
    }
    if (!drop) out.push_back(q[i]);
  }
  return out;
}

std::vector<Clause> noiseFilter(std::span<const Clause> q, const CnfFormula& f, std::span<const std::size_t> fPrime) {
  std::vector<Clause> out;
  if (q.empty()) return out;
  Solver s(f.numVars());
  s.addClauses(f, fPrime);
  for (const Clause& c : q) {
    std::vector<Lit> a = negated(c.lits);
    if (!s.solve(a).unsat()) out.push_back(c);
  }
  return out;
}

std::vector<Clause> noiseFilter(std::span<const Clause> q, const CnfFormula& fPrime) {
  IndexSet all = allClauses(fPrime);
  return noiseFilter(q, fPrime, all);
}

namespace {

// Greedy literal dropping over an oracle table: widen the clause while
// every row it falsifies is still a row excluded by F*.
std::vector<Lit> widenAgainstTable(const TruthTable& tStar, std::uint64_t row) {
  const std::size_t n = tStar.vars.size();
  std::uint64_t fixedMask = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
  auto cubeAllZero = [&](std::uint64_t mask) {
    // Rows agreeing with `row` on `mask`.
    std::uint64_t freeBits = ~mask & ((std::uint64_t{1} << n) - 1);
    std::uint64_t base = row & mask;
    std::uint64_t sub = 0;
    do {
      if (tStar[base | sub]) return false;
      sub = (sub - freeBits) & freeBits;
    } while (sub != 0);
    return true;
  };
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t trial = fixedMask & ~(std::uint64_t{1} << i);
    if (cubeAllZero(trial)) fixedMask = trial;
  }
  std::vector<Lit> lits;
  for (std::size_t i = 0; i < n; ++i)
    if ((fixedMask >> i) & 1U) lits.emplace_back(tStar.vars[i], ((row >> i) & 1U) != 0);
  return lits;
}

bool clauseFalsifiedByRow(const Clause& c, const TruthTable& t, std::uint64_t row) {
  for (Lit l : c.lits) {
    auto it = std::find(t.vars.begin(), t.vars.end(), l.var());
    auto i = static_cast<std::size_t>(it - t.vars.begin());
    if (l.satisfiedBy(((row >> i) & 1U) != 0)) return false;
  }
  return true;
}

bool mentionsOnly(const Clause& c, const std::vector<bool>& mask) {
  return std::all_of(c.lits.begin(), c.lits.end(), [&](Lit l) { return l.var() < mask.size() && mask[l.var()]; });
}

}  // namespace

PqeSolution pqeOracle(const PqeProblem& p, std::size_t bound) {
  checkBound(p.free.size(), bound);
  std::vector<Var> free = p.free;
  std::sort(free.begin(), free.end());
  TruthTable tStar = qeEnumerate(p.fStar, free, bound);
  TruthTable tPrime = qeEnumerate(p.fStar, p.fPrime, free, bound);
  PqeSolution sol;
  sol.stats.satCalls = 2 * tStar.size();
  std::vector<Clause> raw;
  for (std::uint64_t r = 0; r < tStar.size(); ++r) {
    if (tStar[r] || !tPrime[r]) continue;
    bool covered = std::any_of(raw.begin(), raw.end(), [&](const Clause& c) { return clauseFalsifiedByRow(c, tStar, r); });
    if (covered) continue;
    raw.push_back(*Clause::make(widenAgainstTable(tStar, r)));
    ++sol.stats.generalizationSteps;
  }
  sol.q = removeSubsumed(noiseFilter(raw, p.fStar, p.fPrime));
  sol.certificateChecked = verifyPqeSolution(p, sol.q, bound);
  return sol;
}

bool verifyPqeSolution(const PqeProblem& p, std::span<const Clause> q, std::size_t bound) {
  checkBound(p.free.size(), bound);
  std::vector<bool> mask = freeMask(p.fStar.numVars(), p.free);
  for (const Clause& c : q)
    if (!mentionsOnly(c, mask)) return false;
  TruthTable tStar = qeEnumerate(p.fStar, p.free, bound);
  TruthTable tPrime = qeEnumerate(p.fStar, p.fPrime, p.free, bound);
  Bits a(p.fStar.numVars(), false);
  for (std::uint64_t r = 0; r < tStar.size(); ++r) {
    for (std::size_t i = 0; i < p.free.size(); ++i) a[p.free[i]] = ((r >> i) & 1U) != 0;
    bool qr = std::all_of(q.begin(), q.end(), [&](const Clause& c) { return c.satisfiedBy(a); });
    if (tStar[r] != (qr && tPrime[r])) return false;
  }
  return true;
}

std::vector<Lit> liftCube(const CnfFormula& f, std::span<const std::size_t> clauses, const Bits& model,
                          const std::vector<bool>& isFree) {
  std::vector<bool> chosen(f.numVars(), false);
  for (std::size_t i : clauses) {
    const Clause& c = f.clause(i);
    bool done = false;
    std::optional<Lit> pick;
    for (Lit l : c.lits) {
      if (!l.satisfiedBy(model[l.var()])) continue;
      if (!isFree[l.var()] || chosen[l.var()]) {
        done = true;
        break;
      }
      if (!pick || l.var() < pick->var()) pick = l;
    }
    if (done) continue;
    if (!pick) throw std::logic_error("liftCube: model does not satisfy the formula");
    chosen[pick->var()] = true;
  }
  std::vector<Lit> cube;
  for (Var v = 0; v < f.numVars(); ++v)
    if (chosen[v]) cube.emplace_back(v, !model[v]);
  return cube;
}

PqeSolution pqeCegar(const PqeProblem& p, PqeOptions options) {
  const std::size_t n = p.fStar.numVars();
  std::vector<bool> isFree = freeMask(n, p.free);
  std::vector<Var> free = p.free;
  std::sort(free.begin(), free.end());
  free.erase(std::unique(free.begin(), free.end()), free.end());
  if (options.earlyStop && !p.original)
    throw std::invalid_argument("early stop needs the original formula");

  SolveLimits limits{options.conflictBudget};
  Solver search(n);
  search.addClauses(p.fStar, p.fPrime);
  Solver check(n);
  check.addFormula(p.fStar);
  std::optional<Solver> reference;
  if (options.earlyStop) {
    reference.emplace(std::max(n, p.original->numVars()));
    reference->addFormula(*p.original);
  }
  IndexSet all = allClauses(p.fStar);

  PqeSolution sol;
  auto stopPartial = [&](bool budget) {
    sol.partial = true;
    sol.budgetExceeded = sol.budgetExceeded || budget;
  };

  for (;;) {
    ++sol.stats.iterations;
    ++sol.stats.satCalls;
    SatResult m = search.solve({}, limits);
    if (m.status == SatStatus::Unknown) {
      stopPartial(true);
      break;
    }
    if (m.unsat()) break;

    std::vector<Lit> row;
    row.reserve(free.size());
    for (Var v : free) row.emplace_back(v, !m.model[v]);
    ++sol.stats.satCalls;
    SatResult c = check.solve(row, limits);
    if (c.status == SatStatus::Unknown) {
      stopPartial(true);
      break;
    }
    if (c.sat()) {
      std::vector<Lit> cube = liftCube(p.fStar, all, c.model, isFree);
      search.addClause(negated(cube));
      continue;
    }

    if (options.clauseBudget && sol.q.size() >= *options.clauseBudget) {
      stopPartial(true);
      break;
    }
    std::vector<Lit> core = c.core;
    sortByVar(core);
    for (std::size_t k = 0; k < core.size();) {
      std::vector<Lit> trial;
      for (std::size_t j = 0; j < core.size(); ++j)
        if (j != k) trial.push_back(core[j]);
      ++sol.stats.generalizationSteps;
      ++sol.stats.satCalls;
      SatResult g = check.solve(trial, limits);
      if (g.unsat()) {
        // The new core lies inside trial; literals before k were already kept.
        Lit dropped = core[k];
        core = g.core;
        sortByVar(core);
        k = static_cast<std::size_t>(std::lower_bound(core.begin(), core.end(), dropped) - core.begin());
      } else {
        ++k;
      }
    }
    Clause b = *Clause::make(negated(core));
    sol.q.push_back(b);
    search.addClause(b);

    if (reference) {
      ++sol.stats.satCalls;
      SatResult r = reference->solve(core, limits);
      if (r.sat()) {
        sol.breakerClause = b;
        sol.breakerModel = r.model;
        sol.breakerModel.resize(p.original->numVars());
        sol.earlyStopped = true;
        sol.partial = true;
        break;
      }
      if (r.status == SatStatus::Unknown) {
        stopPartial(true);
        break;
      }
    }
  }
  if (!sol.partial) sol.q = removeSubsumed(sol.q);
  return sol;
}

bool checkTotalityEnumerate(const CnfFormula& f, std::size_t bound) {
  TruthTable t = qeEnumerate(f, f.vars().inputs(), bound);
  return std::all_of(t.rows.begin(), t.rows.end(), [](bool b) { return b; });
}

bool checkTotality(const CnfFormula& f) {
  const std::size_t n = f.numVars();
  auto inputs = f.vars().inputs();
  std::vector<bool> isFree = freeMask(n, inputs);
  IndexSet all = allClauses(f);
  Solver rows(n);
  Solver check(n);
  check.addFormula(f);
  for (;;) {
    SatResult m = rows.solve();
    if (m.unsat()) return true;
    std::vector<Lit> x;
    for (Var v : inputs) x.emplace_back(v, !m.model[v]);
    SatResult c = check.solve(x);
    if (c.unsat()) return false;
    rows.addClause(negated(liftCube(f, all, c.model, isFree)));
  }
}

}  // namespace fprop
