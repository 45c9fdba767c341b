#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pading {

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;

  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

// Built-in verification battery: harmonic-mean reference values, MMD
// identities, alignment fixed point, and finite-difference gradient checks
// of every training loss on a seeded micro-benchmark.
VerifyReport run_verification_battery(std::uint64_t seed = 1);

std::string format_verify_report(const VerifyReport& report);

}  // namespace pading
