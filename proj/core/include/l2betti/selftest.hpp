#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace l2betti {

struct SelftestOptions {
  std::uint64_t seed = 20240911;
  int trials = 200;
  bool inject_failure = false;  // harness test: force one failing entry
};

struct SelftestEntry {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelftestReport {
  std::vector<SelftestEntry> entries;
  bool all_passed() const;
};

/// The dimension-axiom battery plus the closed-form identities. Deterministic
/// for a fixed seed: repeated runs emit byte-identical reports.
SelftestReport run_selftest(const SelftestOptions& opts);

void write_selftest_report(std::ostream& out, const SelftestReport& report);

} // namespace l2betti
