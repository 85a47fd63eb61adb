#pragma once

// Seeded invariant suites of every module, driven by `crfc verify`.

#include <cstdint>
#include <string>
#include <vector>

namespace crfc {

struct VerifyCheck {
  std::string module;
  std::string name;
  bool passed = false;
  double worst = 0.0;  // worst normalized error over the samples
  double tol = 0.0;
};

std::vector<std::string> verify_modules();

/// Runs the invariant checks of `only` (all modules when empty). Throws
/// InvalidArgument for an unknown module name.
std::vector<VerifyCheck> run_verify(std::uint64_t seed, const std::string& only = "");

}  // namespace crfc
