#pragma once

#include <ostream>

namespace uwbem {

// Runs the fast oracle suites, printing one PASS/FAIL line per check.
// Returns the number of failed checks.
int run_selftest(std::ostream& out);

}  // namespace uwbem
