#pragma once

#include <functional>
#include <string>
#include <vector>

namespace robustbo::selfcheck {

struct CheckResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Check {
  int id;
  std::string title;
  std::function<CheckResult()> run;
};

/// The eleven acceptance checks, in order. Thresholds are fixed inside each check.
const std::vector<Check>& acceptance_checks();

/// "PASS [n] title (detail, 1.2 s)" or "FAIL ...".
std::string format_result(const CheckResult& r);

}  // namespace robustbo::selfcheck
