#include "falseprop/cnf.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace fprop {

Lit Lit::fromDimacs(int d) {
  if (d == 0) throw std::invalid_argument("0 is not a DIMACS literal");
  return d > 0 ? pos(static_cast<Var>(d - 1)) : neg(static_cast<Var>(-d - 1));
}

// ---------------------------------------------------------------------------
// Clause

std::optional<Clause> Clause::make(std::vector<Lit> lits, std::optional<std::uint32_t> origin) {
  Clause c;
  c.origin = origin;
  c.lits.reserve(lits.size());
  for (Lit l : lits) {
    if (c.contains(~l)) return std::nullopt;
    if (!c.contains(l)) c.lits.push_back(l);
  }
  return c;
}

bool Clause::contains(Lit l) const { return std::find(lits.begin(), lits.end(), l) != lits.end(); }

bool Clause::mentions(Var v) const {
  return std::any_of(lits.begin(), lits.end(), [v](Lit l) { return l.var() == v; });
}

bool Clause::satisfiedBy(const Bits& a) const {
  return std::any_of(lits.begin(), lits.end(), [&](Lit l) { return l.satisfiedBy(a.at(l.var())); });
}

std::vector<Lit> Clause::sorted() const {
  std::vector<Lit> s = lits;
  std::sort(s.begin(), s.end());
  return s;
}

bool Clause::sameLiterals(const Clause& other) const {
  return lits.size() == other.lits.size() && sorted() == other.sorted();
}

bool Clause::subsumes(const Clause& other) const {
  return std::all_of(lits.begin(), lits.end(), [&](Lit l) { return other.contains(l); });
}

std::string toString(const Clause& c) {
  std::ostringstream os;
  for (std::size_t i = 0; i < c.lits.size(); ++i) os << (i ? " " : "") << c.lits[i].toDimacs();
  return os.str();
}

// ---------------------------------------------------------------------------
// VarMap

std::string_view roleTag(Role r) {
  switch (r) {
    case Role::Input: return "x";
    case Role::Internal: return "y";
    case Role::Output: return "z";
    case Role::State: return "s";
    case Role::NextState: return "sn";
  }
  return "?";
}

Var VarMap::addVar(Role role, std::uint32_t frame, std::string name) {
  auto v = static_cast<Var>(roles_.size());
  roles_.push_back(role);
  frames_.push_back(frame);
  names_.push_back(std::move(name));
  byRole_[static_cast<std::size_t>(role)].push_back(v);
  return v;
}

void VarMap::setRole(Var v, Role role) {
  Role old = roles_.at(v);
  auto& from = byRole_[static_cast<std::size_t>(old)];
  from.erase(std::remove(from.begin(), from.end(), v), from.end());
  roles_[v] = role;
  byRole_[static_cast<std::size_t>(role)].push_back(v);
}

std::string VarMap::name(Var v) const {
  const std::string& n = names_.at(v);
  return n.empty() ? "v" + std::to_string(v + 1) : n;
}

std::optional<Var> VarMap::findByName(std::string_view name) const {
  for (Var v = 0; v < names_.size(); ++v)
    if (names_[v] == name) return v;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// CnfFormula

std::size_t CnfFormula::addClause(Clause c) {
  for (Lit l : c.lits)
    if (l.var() >= vars_.size())
      throw std::out_of_range("clause mentions unregistered variable " + std::to_string(l.var() + 1));
  clauses_.push_back(std::move(c));
  return clauses_.size() - 1;
}

std::size_t CnfFormula::addGroup(GateGroup g) {
  groups_.push_back(std::move(g));
  return groups_.size() - 1;
}

std::optional<std::size_t> CnfFormula::groupOfOutput(Var v) const {
  for (std::size_t g = 0; g < groups_.size(); ++g)
    if (groups_[g].output == v) return g;
  return std::nullopt;
}

std::vector<Var> CnfFormula::occurringVars() const {
  std::vector<bool> seen(vars_.size(), false);
  for (const Clause& c : clauses_)
    for (Lit l : c.lits) seen[l.var()] = true;
  std::vector<Var> out;
  for (Var v = 0; v < seen.size(); ++v)
    if (seen[v]) out.push_back(v);
  return out;
}

CnfFormula CnfFormula::subset(std::span<const std::size_t> indices) const {
  CnfFormula out(vars_);
  for (std::size_t i : indices) out.addClause(clauses_.at(i));
  return out;
}

// ---------------------------------------------------------------------------
// Encoding

std::vector<Clause> encodeGate(GateKind kind, std::span<const Var> in, Var o) {
  std::vector<std::vector<Lit>> raw;
  auto all = [&](bool negIn, Lit extra) {
    std::vector<Lit> c;
    for (Var v : in) c.push_back(Lit(v, negIn));
    c.push_back(extra);
    return c;
  };
  switch (kind) {
    case GateKind::And:
      for (Var v : in) raw.push_back({Lit::pos(v), Lit::neg(o)});
      raw.push_back(all(true, Lit::pos(o)));
      break;
    case GateKind::Nand:
      for (Var v : in) raw.push_back({Lit::pos(v), Lit::pos(o)});
      raw.push_back(all(true, Lit::neg(o)));
      break;
    case GateKind::Or:
      for (Var v : in) raw.push_back({Lit::neg(v), Lit::pos(o)});
      raw.push_back(all(false, Lit::neg(o)));
      break;
    case GateKind::Nor:
      for (Var v : in) raw.push_back({Lit::neg(v), Lit::neg(o)});
      raw.push_back(all(false, Lit::pos(o)));
      break;
    case GateKind::Xor:
    case GateKind::Xnor: {
      if (in.size() > 20) throw std::invalid_argument("XOR/XNOR encoding limited to 20 inputs");
      // One clause per input row, excluding the wrong output value.
      for (std::uint64_t row = 0; row < (std::uint64_t{1} << in.size()); ++row) {
        bool parity = false;
        std::vector<Lit> c;
        for (std::size_t i = 0; i < in.size(); ++i) {
          bool bit = (row >> i) & 1U;
          parity ^= bit;
          c.push_back(Lit(in[i], bit));
        }
        bool value = kind == GateKind::Xor ? parity : !parity;
        c.push_back(Lit(o, !value));
        raw.push_back(std::move(c));
      }
      break;
    }
    case GateKind::Not:
      raw.push_back({Lit::pos(in[0]), Lit::pos(o)});
      raw.push_back({Lit::neg(in[0]), Lit::neg(o)});
      break;
    case GateKind::Buf:
      raw.push_back({Lit::pos(in[0]), Lit::neg(o)});
      raw.push_back({Lit::neg(in[0]), Lit::pos(o)});
      break;
    case GateKind::Const0:
      raw.push_back({Lit::neg(o)});
      break;
    case GateKind::Const1:
      raw.push_back({Lit::pos(o)});
      break;
  }
  std::vector<Clause> out;
  for (auto& r : raw) {
    auto c = Clause::make(std::move(r));
    if (!c) continue;
    bool dup = std::any_of(out.begin(), out.end(), [&](const Clause& d) { return d.sameLiterals(*c); });
    if (!dup) out.push_back(std::move(*c));
  }
  return out;
}

std::vector<Clause> encodeGate(const Gate& g) { return encodeGate(g.kind, g.fanin, g.output); }

CnfFormula encodeCircuit(const Circuit& c) {
  VarMap vm;
  for (VarId v = 0; v < c.numVars(); ++v) vm.addVar(Role::Internal, 0, c.varName(v));
  // Re-register the external roles in circuit order.
  for (VarId v : c.inputs()) vm.setRole(v, Role::Input);
  for (VarId v : c.outputs()) vm.setRole(v, Role::Output);
  for (const Latch& l : c.latches()) vm.setRole(l.state, Role::State);
  for (const Latch& l : c.latches()) vm.setRole(l.next, Role::NextState);

  CnfFormula f(std::move(vm));
  for (std::size_t gi = 0; gi < c.gates().size(); ++gi) {
    const Gate& g = c.gates()[gi];
    GateGroup group{g.kind, g.fanin, g.output, 0, static_cast<std::uint32_t>(gi), {}};
    for (Clause& cl : encodeGate(g)) {
      cl.origin = static_cast<std::uint32_t>(gi);
      group.clauses.push_back(f.addClause(std::move(cl)));
    }
    f.addGroup(std::move(group));
  }
  return f;
}

MutatedFormula replaceGroup(const CnfFormula& f, std::span<const std::size_t> group, std::span<const Clause> gStar) {
  std::vector<bool> inG(f.size(), false);
  for (std::size_t i : group) {
    if (i >= f.size())
      throw std::out_of_range("clause index " + std::to_string(i) + " out of range (formula has " +
                              std::to_string(f.size()) + " clauses)");
    inG[i] = true;
  }
  MutatedFormula m;
  m.formula = CnfFormula(f.vars());
  std::vector<std::int64_t> remap(f.size(), -1);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (inG[i]) continue;
    remap[i] = static_cast<std::int64_t>(m.formula.addClause(f.clause(i)));
    m.fPrime.push_back(static_cast<std::size_t>(remap[i]));
    m.fPrimeOrigin.push_back(i);
  }
  for (const Clause& c : gStar) m.gStar.push_back(m.formula.addClause(c));

  // Keep gate groups addressable; G* joins the group that owned G.
  std::optional<std::size_t> owner;
  for (std::size_t gi = 0; gi < f.groups().size(); ++gi) {
    const auto& cl = f.group(gi).clauses;
    if (!group.empty() && std::find(cl.begin(), cl.end(), group.front()) != cl.end()) owner = gi;
  }
  for (std::size_t gi = 0; gi < f.groups().size(); ++gi) {
    GateGroup g = f.group(gi);
    IndexSet kept;
    for (std::size_t i : g.clauses)
      if (remap[i] >= 0) kept.push_back(static_cast<std::size_t>(remap[i]));
    if (owner && *owner == gi) kept.insert(kept.end(), m.gStar.begin(), m.gStar.end());
    g.clauses = std::move(kept);
    m.formula.addGroup(std::move(g));
  }
  return m;
}

// ---------------------------------------------------------------------------
// DIMACS

std::string exportDimacs(const CnfFormula& f) {
  std::ostringstream os;
  const VarMap& vm = f.vars();
  for (Role r : {Role::Input, Role::Internal, Role::Output, Role::State, Role::NextState}) {
    auto vars = vm.withRole(r);
    if (vars.empty()) continue;
    os << "c role " << roleTag(r);
    for (Var v : vars) os << ' ' << v + 1;
    os << '\n';
  }
  for (Var v = 0; v < vm.size(); ++v)
    if (vm.hasName(v)) os << "c name " << v + 1 << ' ' << vm.name(v) << '\n';
  for (Var v = 0; v < vm.size(); ++v)
    if (vm.frame(v) != 0) os << "c frame " << v + 1 << ' ' << vm.frame(v) << '\n';
  for (std::size_t gi = 0; gi < f.groups().size(); ++gi) {
    const GateGroup& g = f.group(gi);
    os << "c gate " << gi << ' ' << toString(g.kind) << ' ' << g.output + 1 << ' ' << g.frame << ' '
       << g.circuitGate;
    for (Var v : g.fanin) os << ' ' << v + 1;
    os << '\n';
    os << "c group " << gi;
    for (std::size_t i : g.clauses) os << ' ' << i;
    os << '\n';
  }
  os << "p cnf " << vm.size() << ' ' << f.size() << '\n';
  for (const Clause& c : f.clauses()) {
    for (Lit l : c.lits) os << l.toDimacs() << ' ';
    os << "0\n";
  }
  return os.str();
}

CnfFormula importDimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineNo = 0;
  std::optional<std::size_t> numVars, numClauses;
  std::vector<std::pair<Role, std::vector<Var>>> roles;
  std::vector<std::pair<Var, std::string>> names;
  std::vector<std::pair<Var, std::uint32_t>> frames;
  std::vector<GateGroup> groups;
  std::vector<std::vector<Lit>> clauses;
  std::vector<Lit> current;

  auto fail = [&](const std::string& what) -> void {
    throw DimacsError("DIMACS line " + std::to_string(lineNo) + ": " + what);
  };
  auto readInt = [&](std::istringstream& is, long long& out) -> bool {
    std::string w;
    if (!(is >> w)) return false;
    try {
      std::size_t pos = 0;
      out = std::stoll(w, &pos);
      if (pos != w.size()) fail("expected integer, found '" + w + "'");
    } catch (const std::logic_error&) {
      fail("expected integer, found '" + w + "'");
    }
    return true;
  };

  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "c") {
      std::string kind;
      ls >> kind;
      if (kind == "role") {
        std::string tag;
        ls >> tag;
        Role r;
        if (tag == "x") r = Role::Input;
        else if (tag == "y") r = Role::Internal;
        else if (tag == "z") r = Role::Output;
        else if (tag == "s") r = Role::State;
        else if (tag == "sn") r = Role::NextState;
        else { fail("unknown role '" + tag + "'"); continue; }
        std::vector<Var> vs;
        long long v;
        while (readInt(ls, v)) {
          if (v <= 0) fail("bad variable in role line");
          vs.push_back(static_cast<Var>(v - 1));
        }
        roles.emplace_back(r, std::move(vs));
      } else if (kind == "name") {
        long long v;
        std::string n;
        if (!readInt(ls, v) || v <= 0 || !(ls >> n)) fail("bad name line");
        names.emplace_back(static_cast<Var>(v - 1), n);
      } else if (kind == "frame") {
        long long v, k;
        if (!readInt(ls, v) || v <= 0 || !readInt(ls, k) || k < 0) fail("bad frame line");
        frames.emplace_back(static_cast<Var>(v - 1), static_cast<std::uint32_t>(k));
      } else if (kind == "gate") {
        long long gi, out, frame, cg, v;
        std::string kname;
        if (!readInt(ls, gi) || !(ls >> kname) || !readInt(ls, out) || !readInt(ls, frame) || !readInt(ls, cg))
          fail("bad gate line");
        auto k = parseGateKind(kname);
        if (!k || gi != static_cast<long long>(groups.size()) || out <= 0) fail("bad gate line");
        GateGroup g;
        g.kind = *k;
        g.output = static_cast<Var>(out - 1);
        g.frame = static_cast<std::uint32_t>(frame);
        g.circuitGate = static_cast<std::uint32_t>(cg);
        while (readInt(ls, v)) g.fanin.push_back(static_cast<Var>(v - 1));
        groups.push_back(std::move(g));
      } else if (kind == "group") {
        long long gi, i;
        if (!readInt(ls, gi)) fail("bad group line");
        if (gi < 0 || static_cast<std::size_t>(gi) >= groups.size()) fail("group without matching gate line");
        while (readInt(ls, i)) {
          if (i < 0) fail("negative clause index");
          groups[static_cast<std::size_t>(gi)].clauses.push_back(static_cast<std::size_t>(i));
        }
      }
      continue;
    }
    if (head == "p") {
      std::string fmt;
      long long nv, nc;
      if (!(ls >> fmt) || fmt != "cnf" || !readInt(ls, nv) || !readInt(ls, nc) || nv < 0 || nc < 0)
        fail("malformed problem line");
      if (numVars) fail("duplicate problem line");
      numVars = static_cast<std::size_t>(nv);
      numClauses = static_cast<std::size_t>(nc);
      continue;
    }
    if (!numVars) fail("clause before problem line");
    std::istringstream cs(line);
    long long d;
    while (readInt(cs, d)) {
      if (d == 0) {
        clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      if (static_cast<std::size_t>(d < 0 ? -d : d) > *numVars) fail("literal exceeds declared variable count");
      current.push_back(Lit::fromDimacs(static_cast<int>(d)));
    }
  }
  if (!numVars) throw DimacsError("missing problem line");
  if (!current.empty()) throw DimacsError("last clause is not terminated by 0");
  if (clauses.size() != *numClauses)
    throw DimacsError("problem line declares " + std::to_string(*numClauses) + " clauses, found " +
                      std::to_string(clauses.size()));

  VarMap vm;
  for (std::size_t v = 0; v < *numVars; ++v) vm.addVar(Role::Internal);
  for (auto& [r, vs] : roles)
    for (Var v : vs) {
      if (v >= vm.size()) throw DimacsError("role line mentions undeclared variable");
      vm.setRole(v, r);
    }
  for (auto& [v, n] : names) {
    if (v >= vm.size()) throw DimacsError("name line mentions undeclared variable");
    vm.setName(v, n);
  }
  for (auto& [v, k] : frames) {
    if (v >= vm.size()) throw DimacsError("frame line mentions undeclared variable");
    vm.setFrame(v, k);
  }
  CnfFormula f(std::move(vm));
  for (auto& raw : clauses) {
    auto c = Clause::make(std::move(raw));
    if (!c) throw DimacsError("tautological clause");
    f.addClause(std::move(*c));
  }
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    for (std::size_t i : groups[gi].clauses) {
      if (i >= f.size()) throw DimacsError("group refers to missing clause");
    }
    f.addGroup(std::move(groups[gi]));
  }
  // Restore origin tags from the groups.
  CnfFormula tagged(f.vars());
  std::vector<std::optional<std::uint32_t>> origin(f.size());
  for (std::size_t gi = 0; gi < f.groups().size(); ++gi)
    for (std::size_t i : f.group(gi).clauses) origin[i] = static_cast<std::uint32_t>(gi);
  for (std::size_t i = 0; i < f.size(); ++i) {
    Clause c = f.clause(i);
    c.origin = origin[i];
    tagged.addClause(std::move(c));
  }
  for (const GateGroup& g : f.groups()) tagged.addGroup(g);
  return tagged;
}

}  // namespace fprop
