#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "falseprop/report.hpp"

namespace fprop {

struct SelftestOptions {
  std::uint64_t seed = 1;
  std::size_t cases = 25;  ///< random circuits per suite
  unsigned jobs = 1;
};

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t passed = 0;
  std::vector<std::string> failures;
};

struct SelftestReport {
  std::uint64_t seed = 0;
  std::vector<SuiteResult> suites;

  bool ok() const;
};

/// Cross-checks the engines against enumeration and simulation on random
/// circuits: PQE equivalence, false-property verdicts, stuck-at tests
/// against exhaustive fault simulation, and unrolling against explicit
/// reachability.
SelftestReport runSelftest(const SelftestOptions& options);

Json selftestJson(const SelftestReport& r);

}  // namespace fprop
