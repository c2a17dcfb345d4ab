#pragma once

#include <iosfwd>

namespace qslab {

// Runs every acceptance criterion, printing one pass/fail line each.
// Returns the number of failures.
int run_acceptance(std::ostream& os);

}  // namespace qslab
