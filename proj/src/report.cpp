#include "falseprop/report.hpp"

#include <sstream>

namespace fprop {

namespace {

Json bitMap(const Circuit& c, std::span<const VarId> vars, const Bits& bits) {
  Json j = Json::object();
  for (std::size_t i = 0; i < vars.size(); ++i) j[c.varName(vars[i])] = bits.at(i) ? 1 : 0;
  return j;
}

Json bitMap(const VarMap& vm, std::span<const Var> vars, const Bits& bits) {
  Json j = Json::object();
  for (std::size_t i = 0; i < vars.size(); ++i) j[vm.name(vars[i])] = bits.at(i) ? 1 : 0;
  return j;
}

std::vector<VarId> latchStates(const Circuit& m) {
  std::vector<VarId> out;
  for (const Latch& l : m.latches()) out.push_back(l.state);
  return out;
}

Json statsJson(const PqeStats& s) {
  return Json{{"satCalls", s.satCalls}, {"generalizationSteps", s.generalizationSteps}, {"iterations", s.iterations}};
}

std::string bitString(const Bits& b) {
  std::string s;
  for (bool v : b) s += v ? '1' : '0';
  return s;
}

}  // namespace

std::string litName(const VarMap& vm, Lit l) { return (l.negative() ? "~" : "") + vm.name(l.var()); }

Json clauseJson(const VarMap& vm, const Clause& c) {
  Json j = Json::array();
  for (Lit l : c.lits) j.push_back(litName(vm, l));
  return j;
}

Json clausesJson(const VarMap& vm, std::span<const Clause> cs) {
  Json j = Json::array();
  for (const Clause& c : cs) j.push_back(clauseJson(vm, c));
  return j;
}

Json testJson(const CnfFormula& f, const TestVector& t) {
  Json j;
  j["x"] = bitMap(f.vars(), f.vars().inputs(), t.x);
  j["z"] = bitMap(f.vars(), f.vars().outputs(), t.z);
  j["brokenClause"] = t.brokenClause;
  if (t.secondClause) j["secondClause"] = *t.secondClause;
  return j;
}

Json propertyJson(const CnfFormula& f, const Property& p) {
  Json j;
  j["provenance"] = p.provenance;
  j["status"] = toString(p.status);
  j["clauses"] = clausesJson(f.vars(), p.clauses);
  if (p.inputOnlyDropped) j["inputOnlyDropped"] = p.inputOnlyDropped;
  if (p.witness) j["witness"] = testJson(f, *p.witness);
  return j;
}

Json mutationJson(const CnfFormula& f, const Mutation& m) {
  Json j;
  j["id"] = m.id;
  j["kind"] = toString(m.kind);
  if (m.group) j["gate"] = f.vars().name(f.group(*m.group).output);
  if (m.newKind) j["newKind"] = toString(*m.newKind);
  j["target"] = m.target;
  Json g = Json::array();
  for (std::size_t i : m.target) g.push_back(clauseJson(f.vars(), f.clause(i)));
  j["g"] = std::move(g);
  j["gStar"] = clausesJson(f.vars(), m.gStar);
  return j;
}

Json pqeJson(const CnfFormula& f, const PqeSolution& s) {
  Json j;
  j["clauses"] = clausesJson(f.vars(), s.q);
  j["certificateChecked"] = s.certificateChecked;
  j["partial"] = s.partial;
  j["earlyStopped"] = s.earlyStopped;
  j["budgetExceeded"] = s.budgetExceeded;
  if (s.breakerClause) j["breaker"] = clauseJson(f.vars(), *s.breakerClause);
  j["stats"] = statsJson(s.stats);
  return j;
}

Json compsetJson(const Circuit& n, const CompsetReport& r) {
  CnfFormula f = encodeCircuit(n);
  Json j;
  j["circuit"] = n.name();
  j["bug"] = r.tst.has_value();
  if (r.tst) {
    j["tst"] = testJson(f, *r.tst);
    j["reason"] = r.reason;
    j["tstGate"] = n.varName(n.gates()[*r.tstGate].output);
  }
  Json gates = Json::array();
  for (const GateRecord& g : r.gates) {
    Json e;
    e["gate"] = g.gate;
    e["status"] = toString(g.outcome);
    e["mutation"] = g.mutation;
    e["total"] = g.total;
    e["property"] = clausesJson(f.vars(), g.property.clauses);
    if (g.property.witness) e["witness"] = testJson(f, *g.property.witness);
    e["stats"] = statsJson(g.stats);
    gates.push_back(std::move(e));
  }
  j["gates"] = std::move(gates);
  Json processed = Json::array();
  for (std::size_t g : r.gatesProcessed) processed.push_back(n.varName(n.gates()[g].output));
  j["gatesProcessed"] = std::move(processed);
  Json tests = Json::array();
  for (const TestVector& t : r.tests) tests.push_back(testJson(f, t));
  j["tests"] = std::move(tests);
  Json pfls = Json::array();
  for (const Property& p : r.pfls) pfls.push_back(propertyJson(f, p));
  j["falseProperties"] = std::move(pfls);
  if (r.bugs.size() > 1) {
    Json bugs = Json::array();
    for (const TestVector& t : r.bugs) bugs.push_back(testJson(f, t));
    j["bugs"] = std::move(bugs);
  }
  return j;
}

Json atpgJson(const Circuit& n, std::span<const AtpgResult> results) {
  CnfFormula f = encodeCircuit(n);
  Json arr = Json::array();
  for (const AtpgResult& r : results) {
    Json e;
    e["gate"] = n.varName(n.gates()[r.gate].output);
    e["stuckAt"] = r.value ? 1 : 0;
    e["status"] = r.test ? "detected" : (r.budgetExceeded ? "budget-exceeded" : "undetectable");
    if (r.test) {
      e["test"] = bitMap(f.vars(), f.vars().inputs(), r.test->x);
      e["goodOutputs"] = bitMap(f.vars(), f.vars().outputs(), r.test->z);
    }
    if (r.breaker) e["breaker"] = clauseJson(f.vars(), *r.breaker);
    e["stats"] = statsJson(r.stats);
    arr.push_back(std::move(e));
  }
  return Json{{"circuit", n.name()}, {"faults", std::move(arr)}};
}

Json traceJson(const Circuit& m, const CexTrace& t) {
  std::vector<VarId> states = latchStates(m);
  Json frames = Json::array();
  for (std::size_t i = 0; i < t.states.size(); ++i) {
    Json fr;
    fr["frame"] = i + 1;
    fr["state"] = bitMap(m, states, t.states[i]);
    if (i < t.inputs.size()) {
      fr["inputs"] = bitMap(m, m.inputs(), t.inputs[i]);
      fr["outputs"] = bitMap(m, m.outputs(), t.outputs[i]);
    }
    frames.push_back(std::move(fr));
  }
  return Json{{"brokenClause", t.brokenClause}, {"frames", std::move(frames)}};
}

std::string traceTable(const Circuit& m, const CexTrace& t) {
  std::ostringstream os;
  auto names = [&](auto vars) {
    std::string out;
    for (VarId v : vars) out += (out.empty() ? "" : ",") + m.varName(v);
    return out.empty() ? std::string("-") : out;
  };
  std::vector<VarId> state;
  for (const Latch& l : m.latches()) state.push_back(l.state);
  os << "frame state[" << names(state) << "] inputs[" << names(m.inputs()) << "] outputs[" << names(m.outputs())
     << "]\n";
  for (std::size_t i = 0; i < t.states.size(); ++i) {
    os << i + 1 << ' ' << bitString(t.states[i]);
    if (i < t.inputs.size()) os << ' ' << (t.inputs[i].empty() ? "-" : bitString(t.inputs[i])) << ' '
                                << (t.outputs[i].empty() ? "-" : bitString(t.outputs[i]));
    os << '\n';
  }
  return os.str();
}

Json seqCompsetJson(const Circuit& m, const SeqCompsetReport& r) {
  CnfFormula f = encodeCircuit(m);
  Json j;
  j["circuit"] = m.name();
  j["frames"] = r.frames;
  j["bug"] = r.tst.has_value();
  if (r.tst) {
    j["tst"] = traceJson(m, *r.tst);
    j["reason"] = r.reason;
    j["tstGate"] = m.varName(m.gates()[*r.tstGate].output);
  }
  Json gates = Json::array();
  for (const SeqGateRecord& g : r.gates) {
    Json e;
    e["gate"] = g.name;
    e["status"] = toString(g.outcome);
    e["mutation"] = g.mutation;
    e["property"] = clausesJson(f.vars(), g.clauses);
    if (g.trace) e["trace"] = traceJson(m, *g.trace);
    e["stats"] = statsJson(g.stats);
    gates.push_back(std::move(e));
  }
  j["gates"] = std::move(gates);
  Json processed = Json::array();
  for (std::size_t g : r.gatesProcessed) processed.push_back(m.varName(m.gates()[g].output));
  j["gatesProcessed"] = std::move(processed);
  Json traces = Json::array();
  for (const CexTrace& t : r.traces) traces.push_back(traceJson(m, t));
  j["traces"] = std::move(traces);
  return j;
}

Json reachJson(const Circuit& m, const ReachSet& r) {
  std::vector<VarId> states = latchStates(m);
  auto stateList = [&](const std::vector<std::uint64_t>& rows) {
    Json arr = Json::array();
    for (std::uint64_t s : rows) arr.push_back(bitMap(m, states, bitsOf(s, states.size())));
    return arr;
  };
  Json frames = Json::array();
  for (const auto& fr : r.frames) frames.push_back(stateList(fr));
  return Json{{"circuit", m.name()},        {"closed", r.closed},
              {"diameter", r.diameter},     {"reachableCount", r.reachable.size()},
              {"reachable", stateList(r.reachable)}, {"frames", std::move(frames)}};
}

std::string dimacsFragment(const VarMap& vm, std::span<const Clause> cs) {
  std::vector<Var> vars;
  for (const Clause& c : cs)
    for (Lit l : c.lits)
      if (std::find(vars.begin(), vars.end(), l.var()) == vars.end()) vars.push_back(l.var());
  std::sort(vars.begin(), vars.end());
  std::ostringstream os;
  for (Var v : vars) os << "c free " << v + 1 << ' ' << vm.name(v) << '\n';
  for (const Clause& c : cs) {
    for (Lit l : c.lits) os << l.toDimacs() << ' ';
    os << "0\n";
  }
  return os.str();
}

namespace {

std::vector<Clause> parseClauses(const Json& j, const std::string& where,
                                 const std::function<std::optional<Var>(std::string_view)>& lookup) {
  if (!j.is_array()) throw PropertyFileError(where + ": expected a list of clauses");
  std::vector<Clause> out;
  for (const Json& c : j) {
    if (!c.is_array()) throw PropertyFileError(where + ": a clause must be a list of pin names");
    std::vector<Lit> lits;
    for (const Json& l : c) {
      if (!l.is_string()) throw PropertyFileError(where + ": literal is not a string");
      std::string s = l.get<std::string>();
      bool neg = !s.empty() && (s[0] == '~' || s[0] == '!' || s[0] == '-');
      std::string_view name = neg ? std::string_view(s).substr(1) : std::string_view(s);
      auto v = lookup(name);
      if (!v) throw PropertyFileError(where + ": unknown pin '" + std::string(name) + "'");
      lits.emplace_back(*v, neg);
    }
    if (auto cl = Clause::make(std::move(lits))) out.push_back(std::move(*cl));
  }
  return out;
}

bool isSingleClause(const Json& j) {
  return j.is_array() && !j.empty() && std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_string(); });
}

}  // namespace

std::vector<NamedProperty> parseProperties(std::string_view text,
                                           const std::function<std::optional<Var>(std::string_view)>& lookup) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw PropertyFileError(std::string("malformed JSON: ") + e.what());
  }
  if (doc.is_object()) {
    if (!doc.contains("properties")) throw PropertyFileError("expected a list or an object with \"properties\"");
    doc = doc["properties"];
  }
  if (!doc.is_array()) throw PropertyFileError("expected a list of properties");
  std::vector<NamedProperty> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const Json& e = doc[i];
    NamedProperty p;
    p.name = "P" + std::to_string(i);
    if (e.is_object()) {
      if (e.contains("name")) p.name = e["name"].get<std::string>();
      if (!e.contains("clauses")) throw PropertyFileError("property '" + p.name + "' has no clauses");
      p.clauses = parseClauses(e["clauses"], "property '" + p.name + "'", lookup);
    } else if (isSingleClause(e)) {
      p.clauses = parseClauses(Json::array({e}), "property '" + p.name + "'", lookup);
    } else {
      p.clauses = parseClauses(e, "property '" + p.name + "'", lookup);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace fprop
