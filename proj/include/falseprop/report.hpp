#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "falseprop/cnf.hpp"
#include "falseprop/mutate.hpp"
#include "falseprop/pqe.hpp"
#include "falseprop/seq.hpp"
#include "falseprop/verify.hpp"

namespace fprop {

using Json = nlohmann::ordered_json;

/// Literals print as pin names, negated ones with a leading '~'.
std::string litName(const VarMap& vm, Lit l);
Json clauseJson(const VarMap& vm, const Clause& c);
Json clausesJson(const VarMap& vm, std::span<const Clause> cs);

Json testJson(const CnfFormula& f, const TestVector& t);
Json propertyJson(const CnfFormula& f, const Property& p);
Json mutationJson(const CnfFormula& f, const Mutation& m);
Json pqeJson(const CnfFormula& f, const PqeSolution& s);
Json compsetJson(const Circuit& n, const CompsetReport& r);
Json atpgJson(const Circuit& n, std::span<const AtpgResult> results);
Json traceJson(const Circuit& m, const CexTrace& t);
Json seqCompsetJson(const Circuit& m, const SeqCompsetReport& r);
Json reachJson(const Circuit& m, const ReachSet& r);

/// One row per frame: frame, state bits, input bits, output bits.
std::string traceTable(const Circuit& m, const CexTrace& t);

/// Clauses over free variables as DIMACS lines preceded by `c free` names.
std::string dimacsFragment(const VarMap& vm, std::span<const Clause> cs);

class PropertyFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Property file: a JSON list whose entries are properties, each either a
/// list of clauses or {"name", "clauses"}; a clause is a list of pin names
/// with '~', '!' or '-' for negation. {"properties": [...]} also works.
std::vector<NamedProperty> parseProperties(std::string_view text,
                                           const std::function<std::optional<Var>(std::string_view)>& lookup);

}  // namespace fprop
