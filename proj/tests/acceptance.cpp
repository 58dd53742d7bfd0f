// Release gate: runs the ten acceptance criteria and prints one line per
// criterion.  Exits nonzero if any criterion fails.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "schlesinger/verify.hpp"

int main(int argc, char** argv) {
  std::uint64_t seed = 20260814;
  if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);

  const auto results = schlesinger::run_acceptance(seed);
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    std::printf("[%s] criterion %2d: %-38s residual %.3e (tol %.1e)\n",
                r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.max_residual,
                r.tolerance);
    if (!r.detail.empty()) std::printf("        %s\n", r.detail.c_str());
  }
  std::printf("%s\n", all ? "ACCEPTANCE: all criteria passed"
                          : "ACCEPTANCE: FAILURES PRESENT");
  return all ? 0 : 1;
}
