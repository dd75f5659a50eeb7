#include "falseprop/sat.hpp"

#include <algorithm>
#include <cassert>

namespace fprop {

namespace {

constexpr std::int32_t kNoReason = -1;

struct ClauseData {
  std::vector<Lit> lits;
  double activity = 0;
  bool learnt = false;
  bool deleted = false;
};

struct Watcher {
  std::int32_t cref;
  Lit blocker;
};

/// Max-heap on activity; ties go to the lower variable index.
class VarOrder {
 public:
  explicit VarOrder(const std::vector<double>& activity) : act_(activity) {}

  bool contains(Var v) const { return v < pos_.size() && pos_[v] >= 0; }
  bool empty() const { return heap_.empty(); }

  void grow(std::size_t n) {
    if (pos_.size() < n) pos_.resize(n, -1);
  }

  void insert(Var v) {
    grow(v + 1);
    if (contains(v)) return;
    pos_[v] = static_cast<std::int32_t>(heap_.size());
    heap_.push_back(v);
    up(heap_.size() - 1);
  }

  void increased(Var v) {
    if (contains(v)) up(static_cast<std::size_t>(pos_[v]));
  }

  Var pop() {
    Var top = heap_.front();
    heap_.front() = heap_.back();
    pos_[heap_.front()] = 0;
    heap_.pop_back();
    pos_[top] = -1;
    if (!heap_.empty()) down(0);
    return top;
  }

 private:
  bool before(Var a, Var b) const { return act_[a] > act_[b] || (act_[a] == act_[b] && a < b); }

  void up(std::size_t i) {
    Var v = heap_[i];
    while (i > 0) {
      std::size_t parent = (i - 1) / 2;
      if (!before(v, heap_[parent])) break;
      heap_[i] = heap_[parent];
      pos_[heap_[i]] = static_cast<std::int32_t>(i);
      i = parent;
    }
    heap_[i] = v;
    pos_[v] = static_cast<std::int32_t>(i);
  }

  void down(std::size_t i) {
    Var v = heap_[i];
    for (;;) {
      std::size_t child = 2 * i + 1;
      if (child >= heap_.size()) break;
      if (child + 1 < heap_.size() && before(heap_[child + 1], heap_[child])) ++child;
      if (!before(heap_[child], v)) break;
      heap_[i] = heap_[child];
      pos_[heap_[i]] = static_cast<std::int32_t>(i);
      i = child;
    }
    heap_[i] = v;
    pos_[v] = static_cast<std::int32_t>(i);
  }

  const std::vector<double>& act_;
  std::vector<Var> heap_;
  std::vector<std::int32_t> pos_;
};

double luby(double y, std::uint64_t x) {
  std::uint64_t size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

}  // namespace

struct Solver::Impl {
  // Per variable: +1 true, -1 false, 0 unassigned.
  std::vector<std::int8_t> assigns;
  std::vector<std::int32_t> level;
  std::vector<std::int32_t> reason;
  std::vector<bool> phase;
  std::vector<double> activity;
  std::vector<std::uint8_t> seen;
  VarOrder order{activity};

  std::vector<ClauseData> db;
  std::vector<std::int32_t> learnts;
  std::vector<std::vector<Watcher>> watches;

  std::vector<Lit> trail;
  std::vector<std::size_t> trailLim;
  std::size_t qhead = 0;

  bool ok = true;
  double varInc = 1;
  double clauseInc = 1;
  double maxLearnts = 2000;
  std::size_t problemClauses = 0;
  SolverStats stats;

  std::size_t numVars() const { return assigns.size(); }
  std::int32_t decisionLevel() const { return static_cast<std::int32_t>(trailLim.size()); }

  std::int8_t value(Lit l) const {
    std::int8_t a = assigns[l.var()];
    return l.negative() ? static_cast<std::int8_t>(-a) : a;
  }

  void ensureVars(std::size_t n) {
    while (assigns.size() < n) {
      Var v = static_cast<Var>(assigns.size());
      assigns.push_back(0);
      level.push_back(0);
      reason.push_back(kNoReason);
      phase.push_back(false);
      activity.push_back(0);
      seen.push_back(0);
      watches.emplace_back();
      watches.emplace_back();
      order.insert(v);
    }
  }

  void enqueue(Lit l, std::int32_t from) {
    Var v = l.var();
    assigns[v] = l.negative() ? -1 : 1;
    level[v] = decisionLevel();
    reason[v] = from;
    trail.push_back(l);
  }

  void attach(std::int32_t cref) {
    const ClauseData& c = db[static_cast<std::size_t>(cref)];
    watches[c.lits[0].index()].push_back({cref, c.lits[1]});
    watches[c.lits[1].index()].push_back({cref, c.lits[0]});
  }

  void cancelUntil(std::int32_t lvl) {
    if (decisionLevel() <= lvl) return;
    for (std::size_t i = trail.size(); i-- > trailLim[static_cast<std::size_t>(lvl)];) {
      Var v = trail[i].var();
      phase[v] = !trail[i].negative();
      assigns[v] = 0;
      reason[v] = kNoReason;
      order.insert(v);
    }
    trail.resize(trailLim[static_cast<std::size_t>(lvl)]);
    trailLim.resize(static_cast<std::size_t>(lvl));
    qhead = trail.size();
  }

  std::int32_t propagate() {
    std::int32_t conflict = kNoReason;
    while (qhead < trail.size()) {
      Lit falseLit = ~trail[qhead++];
      ++stats.propagations;
      std::vector<Watcher>& ws = watches[falseLit.index()];
      std::size_t i = 0, j = 0;
      while (i < ws.size()) {
        Watcher w = ws[i];
        if (value(w.blocker) == 1) {
          ws[j++] = ws[i++];
          continue;
        }
        ClauseData& c = db[static_cast<std::size_t>(w.cref)];
        if (c.deleted) {
          ++i;
          continue;
        }
        if (c.lits[0] == falseLit) std::swap(c.lits[0], c.lits[1]);
        ++i;
        Lit first = c.lits[0];
        Watcher keep{w.cref, first};
        if (first != w.blocker && value(first) == 1) {
          ws[j++] = keep;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.lits.size(); ++k) {
          if (value(c.lits[k]) != -1) {
            std::swap(c.lits[1], c.lits[k]);
            watches[c.lits[1].index()].push_back({w.cref, first});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = keep;
        if (value(first) == -1) {
          conflict = w.cref;
          qhead = trail.size();
          while (i < ws.size()) ws[j++] = ws[i++];
        } else {
          enqueue(first, w.cref);
        }
      }
      ws.resize(j);
      if (conflict != kNoReason) break;
    }
    return conflict;
  }

  void bumpVar(Var v) {
    activity[v] += varInc;
    if (activity[v] > 1e100) {
      for (double& a : activity) a *= 1e-100;
      varInc *= 1e-100;
    }
    order.increased(v);
  }

  void bumpClause(ClauseData& c) {
    c.activity += clauseInc;
    if (c.activity > 1e20) {
      for (std::int32_t cr : learnts) db[static_cast<std::size_t>(cr)].activity *= 1e-20;
      clauseInc *= 1e-20;
    }
  }

  // First-UIP conflict analysis; returns the backjump level.
  std::int32_t analyze(std::int32_t conflict, std::vector<Lit>& learnt) {
    learnt.assign(1, Lit());
    int pathCount = 0;
    bool havePivot = false;
    Lit pivot;
    std::size_t idx = trail.size();
    std::vector<Var> touched;
    do {
      ClauseData& c = db[static_cast<std::size_t>(conflict)];
      if (c.learnt) bumpClause(c);
      for (std::size_t k = havePivot ? 1 : 0; k < c.lits.size(); ++k) {
        Lit q = c.lits[k];
        Var v = q.var();
        if (seen[v] || level[v] == 0) continue;
        seen[v] = 1;
        touched.push_back(v);
        bumpVar(v);
        if (level[v] >= decisionLevel())
          ++pathCount;
        else
          learnt.push_back(q);
      }
      while (!seen[trail[--idx].var()]) {
      }
      pivot = trail[idx];
      havePivot = true;
      conflict = reason[pivot.var()];
      seen[pivot.var()] = 0;
      --pathCount;
    } while (pathCount > 0);
    learnt[0] = ~pivot;

    // Local minimization: drop literals implied by other learnt literals.
    std::size_t keep = 1;
    for (std::size_t k = 1; k < learnt.size(); ++k) {
      Var v = learnt[k].var();
      std::int32_t r = reason[v];
      bool redundant = r != kNoReason;
      if (redundant) {
        const ClauseData& rc = db[static_cast<std::size_t>(r)];
        for (std::size_t m = 1; m < rc.lits.size(); ++m) {
          Var u = rc.lits[m].var();
          if (!seen[u] && level[u] > 0) {
            redundant = false;
            break;
          }
        }
      }
      if (!redundant) learnt[keep++] = learnt[k];
    }
    learnt.resize(keep);
    for (Var v : touched) seen[v] = 0;

    std::int32_t back = 0;
    if (learnt.size() > 1) {
      std::size_t maxI = 1;
      for (std::size_t k = 2; k < learnt.size(); ++k)
        if (level[learnt[k].var()] > level[learnt[maxI].var()]) maxI = k;
      std::swap(learnt[1], learnt[maxI]);
      back = level[learnt[1].var()];
    }
    return back;
  }

  // Assumptions responsible for `failed` (an assumption that is false).
  std::vector<Lit> analyzeFinal(Lit failed) {
    std::vector<Lit> core{failed};
    if (level[failed.var()] == 0 || decisionLevel() == 0) return core;
    seen[failed.var()] = 1;
    for (std::size_t i = trail.size(); i-- > trailLim[0];) {
      Var v = trail[i].var();
      if (!seen[v]) continue;
      if (reason[v] == kNoReason) {
        if (v != failed.var()) core.push_back(trail[i]);
      } else {
        const ClauseData& c = db[static_cast<std::size_t>(reason[v])];
        for (std::size_t k = 1; k < c.lits.size(); ++k)
          if (level[c.lits[k].var()] > 0) seen[c.lits[k].var()] = 1;
      }
      seen[v] = 0;
    }
    seen[failed.var()] = 0;
    return core;
  }

  void reduceDb() {
    std::vector<std::int32_t> sorted = learnts;
    std::stable_sort(sorted.begin(), sorted.end(), [&](std::int32_t a, std::int32_t b) {
      return db[static_cast<std::size_t>(a)].activity < db[static_cast<std::size_t>(b)].activity;
    });
    std::size_t target = sorted.size() / 2;
    std::vector<bool> drop(db.size(), false);
    std::size_t dropped = 0;
    for (std::int32_t cr : sorted) {
      if (dropped >= target) break;
      ClauseData& c = db[static_cast<std::size_t>(cr)];
      if (c.lits.size() <= 2) continue;
      Var v0 = c.lits[0].var();
      bool locked = reason[v0] == cr && value(c.lits[0]) == 1;
      if (locked) continue;
      c.deleted = true;
      c.lits.clear();
      c.lits.shrink_to_fit();
      drop[static_cast<std::size_t>(cr)] = true;
      ++dropped;
    }
    learnts.erase(std::remove_if(learnts.begin(), learnts.end(),
                                 [&](std::int32_t cr) { return drop[static_cast<std::size_t>(cr)]; }),
                  learnts.end());
  }

  bool addClause(std::span<const Lit> in) {
    if (!ok) return false;
    cancelUntil(0);
    std::vector<Lit> lits;
    for (Lit l : in) {
      ensureVars(l.var() + 1);
      if (std::find(lits.begin(), lits.end(), ~l) != lits.end()) return true;  // tautology
      if (std::find(lits.begin(), lits.end(), l) != lits.end()) continue;
      lits.push_back(l);
    }
    std::vector<Lit> kept;
    for (Lit l : lits) {
      if (value(l) == 1) return true;
      if (value(l) == 0) kept.push_back(l);
    }
    if (kept.empty()) return ok = false;
    if (kept.size() == 1) {
      enqueue(kept[0], kNoReason);
      if (propagate() != kNoReason) ok = false;
      return ok;
    }
    db.push_back({std::move(kept), 0, false, false});
    ++problemClauses;
    attach(static_cast<std::int32_t>(db.size() - 1));
    return true;
  }

  SatResult solve(std::span<const Lit> assumptions, SolveLimits limits) {
    ++stats.solves;
    SatResult result;
    for (Lit a : assumptions) ensureVars(a.var() + 1);
    if (!ok) {
      result.status = SatStatus::Unsat;
      return result;
    }
    std::uint64_t conflictsHere = 0;
    std::uint64_t restartIndex = 0;
    std::vector<Lit> learnt;
    maxLearnts = std::max<double>(2000, static_cast<double>(problemClauses) / 3);

    for (;;) {
      auto restartLimit = static_cast<std::uint64_t>(luby(2, restartIndex++) * 100);
      std::uint64_t conflictsThisRestart = 0;
      for (;;) {
        std::int32_t conflict = propagate();
        if (conflict != kNoReason) {
          ++stats.conflicts;
          ++conflictsHere;
          ++conflictsThisRestart;
          if (decisionLevel() == 0) {
            ok = false;
            result.status = SatStatus::Unsat;
            return result;
          }
          std::int32_t back = analyze(conflict, learnt);
          cancelUntil(back);
          if (learnt.size() == 1) {
            enqueue(learnt[0], kNoReason);
          } else {
            db.push_back({learnt, 0, true, false});
            auto cr = static_cast<std::int32_t>(db.size() - 1);
            learnts.push_back(cr);
            attach(cr);
            bumpClause(db.back());
            enqueue(learnt[0], cr);
          }
          varInc /= 0.95;
          clauseInc /= 0.999;
          continue;
        }

        if (limits.conflictBudget && conflictsHere >= *limits.conflictBudget) {
          cancelUntil(0);
          result.status = SatStatus::Unknown;
          return result;
        }
        if (conflictsThisRestart >= restartLimit) {
          ++stats.restarts;
          cancelUntil(0);
          break;
        }
        if (static_cast<double>(learnts.size()) - static_cast<double>(trail.size()) >= maxLearnts) {
          reduceDb();
          maxLearnts *= 1.1;
        }

        Lit next;
        bool haveNext = false;
        while (static_cast<std::size_t>(decisionLevel()) < assumptions.size()) {
          Lit a = assumptions[static_cast<std::size_t>(decisionLevel())];
          if (value(a) == 1) {
            trailLim.push_back(trail.size());
          } else if (value(a) == -1) {
            result.core = analyzeFinal(a);
            result.status = SatStatus::Unsat;
            cancelUntil(0);
            return result;
          } else {
            next = a;
            haveNext = true;
            break;
          }
        }
        if (!haveNext) {
          while (!order.empty()) {
            Var v = order.pop();
            if (assigns[v] == 0) {
              next = Lit(v, !phase[v]);
              haveNext = true;
              break;
            }
          }
          if (!haveNext) {
            result.status = SatStatus::Sat;
            result.model.resize(numVars());
            for (Var v = 0; v < numVars(); ++v) result.model[v] = assigns[v] == 1;
            cancelUntil(0);
            return result;
          }
          ++stats.decisions;
        }
        trailLim.push_back(trail.size());
        enqueue(next, kNoReason);
      }
    }
  }
};

Solver::Solver(std::size_t numVars) : impl_(std::make_unique<Impl>()) { impl_->ensureVars(numVars); }
Solver::Solver(Solver&&) noexcept = default;
Solver& Solver::operator=(Solver&&) noexcept = default;
Solver::~Solver() = default;

std::size_t Solver::numVars() const { return impl_->numVars(); }
Var Solver::newVar() {
  impl_->ensureVars(impl_->numVars() + 1);
  return static_cast<Var>(impl_->numVars() - 1);
}
void Solver::ensureVars(std::size_t n) { impl_->ensureVars(n); }
bool Solver::addClause(std::span<const Lit> lits) { return impl_->addClause(lits); }

void Solver::addFormula(const CnfFormula& f) {
  impl_->ensureVars(f.numVars());
  for (const Clause& c : f.clauses()) impl_->addClause(c.lits);
}

void Solver::addClauses(const CnfFormula& f, std::span<const std::size_t> indices) {
  impl_->ensureVars(f.numVars());
  for (std::size_t i : indices) impl_->addClause(f.clause(i).lits);
}

SatResult Solver::solve(std::span<const Lit> assumptions, SolveLimits limits) {
  return impl_->solve(assumptions, limits);
}

const SolverStats& Solver::stats() const { return impl_->stats; }

// ---------------------------------------------------------------------------

SatResult solve(const CnfFormula& f, std::span<const Lit> assumptions, SolveLimits limits) {
  Solver s(f.numVars());
  s.addFormula(f);
  return s.solve(assumptions, limits);
}

bool implies(const CnfFormula& f, const Clause& c) {
  std::vector<Lit> negated;
  for (Lit l : c.lits) negated.push_back(~l);
  return solve(f, negated).unsat();
}

std::optional<Breaker> breakImplication(const CnfFormula& f, std::span<const Clause> q) {
  if (q.empty()) return std::nullopt;
  Solver s(f.numVars());
  s.addFormula(f);
  std::vector<Lit> negated;
  for (std::size_t i = 0; i < q.size(); ++i) {
    negated.clear();
    for (Lit l : q[i].lits) negated.push_back(~l);
    SatResult r = s.solve(negated);
    if (r.sat()) return Breaker{std::move(r.model), i};
  }
  return std::nullopt;
}

}  // namespace fprop
