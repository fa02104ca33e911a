#pragma once

#include <iosfwd>

namespace hnc {

/// Quick invariant suites (softmax, attention equivalence, bound soundness,
/// beta monotonicity, classic fixed points and energy descent, selection
/// determinism). Prints one line per check; true when all pass.
bool run_selftest(std::ostream& out);

}  // namespace hnc
