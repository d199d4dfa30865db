#pragma once

#include <functional>
#include <string>
#include <vector>

namespace platetopo {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Property suite behind `platetopo verify`: orbit periods, period
/// derivative, HCT continuity and stiffness, manufactured convergence, the
/// adjoint duality identity, the discrete adjoint recursion and boundary
/// lengths. `progress` is called after each check.
std::vector<CheckResult> run_property_suite(const std::function<void(const CheckResult&)>& progress = {});

}  // namespace platetopo
