// falseprop: false property generation, COMPSET, stuck-at ATPG and
// sequential unrolling from the command line.
//
// Exit status: 0 completed without a bug, 1 a bug-exposing test was found,
// 2 usage or input error, 3 a budget was exceeded.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "falseprop/cnf.hpp"
#include "falseprop/mutate.hpp"
#include "falseprop/netlist.hpp"
#include "falseprop/pqe.hpp"
#include "falseprop/report.hpp"
#include "falseprop/selftest.hpp"
#include "falseprop/seq.hpp"
#include "falseprop/verify.hpp"

using namespace fprop;

namespace {

enum Exit : int { kOk = 0, kBug = 1, kInputError = 2, kBudget = 3 };

struct Common {
  std::string netlist;
  std::string output;
  bool json = false;
  std::uint64_t seed = 1;
};

struct Budgets {
  std::optional<std::size_t> clauses;
  std::optional<std::uint64_t> conflicts;

  PqeOptions pqe() const {
    PqeOptions o;
    o.clauseBudget = clauses;
    o.conflictBudget = conflicts;
    return o;
  }
};

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

// JSON goes to -o FILE or, with --json, to stdout. The summary goes to
// stdout unless stdout already carries the JSON.
void emit(const Common& c, const Json& j, const std::string& summary) {
  std::string text = j.dump(2) + "\n";
  if (!c.output.empty()) writeFile(c.output, text);
  if (c.json)
    std::cout << text;
  else
    std::cout << summary;
}

MutationPolicy policyFrom(const std::string& s) {
  auto p = parseMutationPolicy(s);
  if (!p) throw CLI::ValidationError("--policy", "unknown policy '" + s + "'");
  return *p;
}

std::size_t gateIndex(const Circuit& c, const std::string& name) {
  auto g = c.findGate(name);
  if (!g) throw std::invalid_argument("no gate drives signal '" + name + "'");
  return *g;
}

std::string bitsText(const Circuit& c, std::span<const VarId> vars, const Bits& b) {
  std::string s;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (!s.empty()) s += ' ';
    s += c.varName(vars[i]) + "=" + (b[i] ? "1" : "0");
  }
  return s;
}

Specification loadSpec(const std::string& phrd, const std::string& golden, const Circuit& c) {
  Specification spec;
  if (!phrd.empty()) {
    auto lookup = [&](std::string_view name) { return c.findVar(name); };
    spec.phrd = parseProperties(readFile(phrd), lookup);
  }
  if (!golden.empty()) spec.golden = readNetlistFile(golden);
  return spec;
}

// "sa0", "sa1", "subst:KIND", "flip:K.L" (K-th clause of the gate, L-th literal).
Mutation mutationFrom(const CnfFormula& f, std::size_t group, const std::string& spec) {
  if (spec == "sa0" || spec == "sa1") return stuckAt(f, group, spec == "sa1");
  if (spec.rfind("subst:", 0) == 0) {
    auto k = parseGateKind(spec.substr(6));
    if (!k) throw std::invalid_argument("unknown gate kind in '" + spec + "'");
    return gateSubst(f, group, *k);
  }
  if (spec.rfind("flip:", 0) == 0) {
    std::string rest = spec.substr(5);
    auto dot = rest.find('.');
    if (dot == std::string::npos) throw std::invalid_argument("expected flip:K.L, got '" + spec + "'");
    std::size_t k = std::stoul(rest.substr(0, dot));
    std::size_t l = std::stoul(rest.substr(dot + 1));
    const auto& cl = f.group(group).clauses;
    if (k >= cl.size()) throw std::out_of_range("gate has only " + std::to_string(cl.size()) + " clauses");
    return clauseFlip(f, cl[k], l);
  }
  throw std::invalid_argument("unknown mutation '" + spec + "'");
}

int runEncode(const Common& c) {
  Circuit n = readNetlistFile(c.netlist);
  std::string text = exportDimacs(encodeCircuit(n));
  if (!c.output.empty())
    writeFile(c.output, text);
  else
    std::cout << text;
  return kOk;
}

int runMutate(const Common& c, const std::string& policy, const std::string& gate, std::optional<std::size_t> index) {
  Circuit n = readNetlistFile(c.netlist);
  CnfFormula f = encodeCircuit(n);
  MutationPolicy p = policyFrom(policy);
  std::vector<Mutation> ms =
      gate.empty() ? enumerateMutations(f, p) : mutationsOfGroup(f, gateIndex(n, gate), p);
  if (index) {
    if (*index >= ms.size()) throw std::out_of_range("mutation index " + std::to_string(*index));
    std::string text = exportDimacs(applyMutation(f, ms[*index]).formula);
    if (!c.output.empty())
      writeFile(c.output, text);
    else
      std::cout << text;
    return kOk;
  }
  Json arr = Json::array();
  std::ostringstream summary;
  for (const Mutation& m : ms) {
    arr.push_back(mutationJson(f, m));
    summary << m.id << "\n";
  }
  emit(c, Json{{"circuit", n.name()}, {"policy", toString(p)}, {"mutations", std::move(arr)}}, summary.str());
  return kOk;
}

int runPqe(const Common& c, const std::string& gate, const std::string& mutation, bool earlyStop, const Budgets& b,
           bool oracleCheck) {
  Circuit n = readNetlistFile(c.netlist);
  if (n.isSequential()) throw std::invalid_argument("pqe works on combinational circuits; use seq-compset");
  CnfFormula f = encodeCircuit(n);
  Mutation m = mutationFrom(f, gateIndex(n, gate), mutation);
  MutatedFormula mf = applyMutation(f, m);
  PqeProblem p = makePqeProblem(mf, externalVars(f));
  p.original = f;
  PqeOptions o = b.pqe();
  o.earlyStop = earlyStop;
  PqeSolution sol = pqeCegar(p, o);
  if (!sol.partial) {
    sol.q = noiseFilter(sol.q, mf.formula, mf.fPrime);
    if (oracleCheck) sol.certificateChecked = verifyPqeSolution(p, sol.q);
  }
  Json j;
  j["circuit"] = n.name();
  j["mutation"] = mutationJson(f, m);
  j["identity"] = m.identity;
  j["pqe"] = pqeJson(f, sol);
  std::ostringstream summary;
  summary << "mutation " << m.id << ": " << sol.q.size() << " clause(s)";
  if (sol.partial) summary << " (partial)";
  summary << "\n";
  if (!sol.partial) {
    Property prop = classifyProperty(f, sol.q, m.id);
    j["property"] = propertyJson(f, prop);
    summary << "property is " << toString(prop.status);
    if (prop.witness) summary << "; test " << bitsText(n, n.inputs(), prop.witness->x);
    summary << "\n";
  }
  if (oracleCheck) {
    if (sol.partial) throw std::invalid_argument("--oracle-check needs a complete PQE run");
    summary << "oracle check " << (sol.certificateChecked ? "passed" : "FAILED") << "\n";
  }
  emit(c, j, summary.str());
  if (sol.budgetExceeded) return kBudget;
  if (oracleCheck && !sol.certificateChecked) return kBug;
  return kOk;
}

int runCompset(const Common& c, const std::string& phrd, const std::string& golden, const std::string& policy,
               bool continueAfterBug, unsigned jobs, const Budgets& b) {
  Circuit n = readNetlistFile(c.netlist);
  Specification spec = loadSpec(phrd, golden, n);
  CompsetOptions o;
  o.policy = policyFrom(policy);
  o.continueAfterBug = continueAfterBug;
  o.jobs = jobs;
  o.pqe = b.pqe();
  CompsetReport r = compset(spec, n, o);
  std::ostringstream summary;
  std::size_t skipped = 0;
  for (const GateRecord& g : r.gates) {
    summary << g.gate << ": " << toString(g.outcome) << " (" << g.mutation << ")\n";
    skipped += g.outcome == GateOutcome::Skipped;
  }
  summary << r.gatesProcessed.size() << "/" << n.gates().size() << " gates, " << r.pfls.size()
          << " false properties, " << r.tests.size() << " tests\n";
  if (r.tst) summary << "BUG: test " << bitsText(n, n.inputs(), r.tst->x) << " " << r.reason << "\n";
  emit(c, compsetJson(n, r), summary.str());
  if (r.tst) return kBug;
  return skipped ? kBudget : kOk;
}

int runAtpg(const Common& c, const std::string& gate, std::optional<int> sa, bool all, unsigned jobs,
            const Budgets& b) {
  Circuit n = readNetlistFile(c.netlist);
  std::vector<AtpgResult> results;
  if (all) {
    results = atpgAllFaults(n, b.pqe(), jobs);
  } else {
    if (gate.empty() || !sa) throw CLI::ValidationError("atpg", "give --gate and --sa, or --all-faults");
    results.push_back(atpgStuckAt(n, gateIndex(n, gate), *sa == 1, b.pqe()));
  }
  std::ostringstream summary;
  bool budget = false;
  for (const AtpgResult& r : results) {
    summary << n.varName(n.gates()[r.gate].output) << " sa" << r.value << ": ";
    if (r.test)
      summary << "test \"" << bitsText(n, n.inputs(), r.test->x) << "\"\n";
    else if (r.budgetExceeded)
      summary << "budget exceeded\n";
    else
      summary << "undetectable\n";
    budget = budget || r.budgetExceeded;
  }
  emit(c, atpgJson(n, results), summary.str());
  return budget ? kBudget : kOk;
}

int runUnroll(const Common& c, std::size_t frames) {
  Circuit m = readNetlistFile(c.netlist);
  std::string text = exportDimacs(unroll(m, frames).formula);
  if (!c.output.empty())
    writeFile(c.output, text);
  else
    std::cout << text;
  return kOk;
}

int runSeqCompset(const Common& c, std::size_t frames, const std::string& phrd, const std::string& golden,
                  const std::string& policy, bool replicate, bool continueAfterBug, unsigned jobs, const Budgets& b) {
  Circuit m = readNetlistFile(c.netlist);
  Specification spec = loadSpec(phrd, golden, m);
  SeqCompsetOptions o;
  o.policy = policyFrom(policy);
  o.replicate = replicate;
  o.continueAfterBug = continueAfterBug;
  o.jobs = jobs;
  o.pqe = b.pqe();
  SeqCompsetReport r = seqCompset(spec, m, frames, o);
  std::ostringstream summary;
  std::size_t skipped = 0;
  for (const SeqGateRecord& g : r.gates) {
    summary << g.name << ": " << toString(g.outcome) << " (" << g.mutation << ")\n";
    skipped += g.outcome == GateOutcome::Skipped;
  }
  summary << r.gatesProcessed.size() << "/" << m.gates().size() << " gates, " << r.traces.size() << " traces\n";
  if (r.tst) summary << "BUG: " << r.reason << "\n" << traceTable(m, *r.tst);
  emit(c, seqCompsetJson(m, r), summary.str());
  if (r.tst) return kBug;
  return skipped ? kBudget : kOk;
}

int runReach(const Common& c, std::uint64_t maxStates, std::size_t frames) {
  Circuit m = readNetlistFile(c.netlist);
  ReachSet r = reachOracle(m, maxStates, frames);
  std::ostringstream summary;
  summary << r.reachable.size() << " reachable states, diameter " << r.diameter << "\n";
  emit(c, reachJson(m, r), summary.str());
  return kOk;
}

int runSelftestCmd(const Common& c, std::size_t cases, unsigned jobs) {
  SelftestOptions o;
  o.seed = c.seed;
  o.cases = cases;
  o.jobs = jobs;
  SelftestReport r = runSelftest(o);
  std::ostringstream summary;
  for (const SuiteResult& s : r.suites) {
    summary << s.name << ": " << s.passed << "/" << s.cases << "\n";
    for (const std::string& f : s.failures) summary << "  FAIL " << f << "\n";
  }
  emit(c, selftestJson(r), summary.str());
  return r.ok() ? kOk : kBug;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"False property generation and structural test synthesis for gate-level circuits"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "Seed for randomized choices")->capture_default_str();

  auto addCommon = [&](CLI::App* sub, bool needsNetlist = true) {
    if (needsNetlist) sub->add_option("netlist", common.netlist, "Netlist (.net or .aag)")->required();
    sub->add_option("-o,--output", common.output, "Write the JSON report (or DIMACS) to a file");
    sub->add_flag("--json", common.json, "Print the JSON report on stdout instead of the summary");
  };
  Budgets budgets;
  auto addBudgets = [&](CLI::App* sub) {
    sub->add_option("--clause-budget", budgets.clauses, "Stop PQE after this many clauses");
    sub->add_option("--conflict-budget", budgets.conflicts, "Conflict limit per SAT call");
  };
  std::string policy = "all-gate-subst";
  auto addPolicy = [&](CLI::App* sub) {
    sub->add_option("--policy", policy, "all-gate-subst, all-stuck-at, all-clause-flips or mixed")
        ->capture_default_str();
  };
  unsigned jobs = 1;
  auto addJobs = [&](CLI::App* sub) { sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber); };

  auto* encode = app.add_subcommand("encode", "Netlist to DIMACS with role comments");
  addCommon(encode);

  auto* mutate = app.add_subcommand("mutate", "List mutations, or write F* for one of them");
  addCommon(mutate);
  addPolicy(mutate);
  std::string gate;
  std::optional<std::size_t> index;
  mutate->add_option("--gate", gate, "Only mutations of the gate driving this signal");
  mutate->add_option("--index", index, "Write the DIMACS of the mutated formula for this entry");

  auto* pqe = app.add_subcommand("pqe", "Property of one mutation");
  addCommon(pqe);
  addBudgets(pqe);
  std::string mutation = "sa0";
  bool earlyStop = false, oracleCheck = false;
  pqe->add_option("--gate", gate, "Signal driven by the mutated gate")->required();
  pqe->add_option("--mutation", mutation, "sa0, sa1, subst:KIND or flip:K.L")->capture_default_str();
  pqe->add_flag("--early-stop", earlyStop, "Stop at the first clause not implied by the circuit");
  pqe->add_flag("--oracle-check", oracleCheck, "Verify the result by enumeration");

  auto* cs = app.add_subcommand("compset", "Mutate every gate and collect false properties and tests");
  addCommon(cs);
  addPolicy(cs);
  addBudgets(cs);
  addJobs(cs);
  std::string phrd, golden;
  bool continueAfterBug = false;
  cs->add_option("--phrd", phrd, "JSON file of properties the design must satisfy");
  cs->add_option("--golden", golden, "Reference netlist with the same pins");
  cs->add_flag("--continue-after-bug", continueAfterBug, "Keep going after the first bug");

  auto* atpg = app.add_subcommand("atpg", "Stuck-at test generation");
  addCommon(atpg);
  addBudgets(atpg);
  addJobs(atpg);
  std::optional<int> sa;
  bool allFaults = false;
  atpg->add_option("--gate", gate, "Signal driven by the faulty gate");
  atpg->add_option("--sa", sa, "Stuck-at value")->check(CLI::Range(0, 1));
  atpg->add_flag("--all-faults", allFaults, "Both faults of every gate");

  std::size_t frames = 1;
  auto* un = app.add_subcommand("unroll", "Unrolled sequential formula as DIMACS");
  addCommon(un);
  un->add_option("--frames", frames, "Number of time frames")->check(CLI::PositiveNumber)->capture_default_str();

  auto* scs = app.add_subcommand("seq-compset", "Sequential false safety properties and traces");
  addCommon(scs);
  addPolicy(scs);
  addBudgets(scs);
  addJobs(scs);
  bool replicate = false;
  scs->add_option("--frames", frames, "Number of time frames")->check(CLI::PositiveNumber)->capture_default_str();
  scs->add_option("--phrd", phrd, "JSON file of safety properties over latch outputs");
  scs->add_option("--golden", golden, "Reference netlist with the same pins and latches");
  scs->add_flag("--replicate", replicate, "Mutate the gate in every frame instead of frame 1");
  scs->add_flag("--continue-after-bug", continueAfterBug, "Keep going after the first bug");

  auto* reach = app.add_subcommand("reach", "Explicit reachability for small circuits");
  addCommon(reach);
  std::uint64_t maxStates = std::uint64_t{1} << 16;
  std::size_t minFrames = 0;
  reach->add_option("--max-states", maxStates, "State space bound")->capture_default_str();
  reach->add_option("--frames", minFrames, "Report at least this many frames");

  auto* self = app.add_subcommand("selftest", "Cross-check the engines against enumeration");
  addCommon(self, false);
  addJobs(self);
  std::size_t cases = 25;
  self->add_option("--cases", cases, "Random circuits per suite")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*encode) return runEncode(common);
    if (*mutate) return runMutate(common, policy, gate, index);
    if (*pqe) return runPqe(common, gate, mutation, earlyStop, budgets, oracleCheck);
    if (*cs) return runCompset(common, phrd, golden, policy, continueAfterBug, jobs, budgets);
    if (*atpg) return runAtpg(common, gate, sa, allFaults, jobs, budgets);
    if (*un) return runUnroll(common, frames);
    if (*scs) return runSeqCompset(common, frames, phrd, golden, policy, replicate, continueAfterBug, jobs, budgets);
    if (*reach) return runReach(common, maxStates, minFrames);
    if (*self) return runSelftestCmd(common, cases, jobs);
  } catch (const CLI::Error& e) {
    std::cerr << "falseprop: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "falseprop: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
