#pragma once

#include <iosfwd>

namespace pinn::cli {

/// Quick invariant checks over the library. Prints one line per check and
/// returns true when all pass.
bool run_invariant_suite(std::ostream& out);

}  // namespace pinn::cli
