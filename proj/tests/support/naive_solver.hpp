// Reference solver used only by tests: plain exhaustive depth-first
// enumeration of every feasible capture sequence, no memoization, no
// pruning, no shared search code with the library's solvers.
#pragma once

#include "aeos/scenario.hpp"

namespace aeos_test {

// Best achievable total profit for the scenario's 3-slot candidate set.
double naive_best_profit(const aeos::Scenario& s);

} // namespace aeos_test
