#pragma once

#include <cstdint>

#include "sprec/linalg.hpp"

namespace sprec {

// Unit-column sensing matrix whose exact order-k RIC has been pushed down
// by softmax-weighted gradient descent over all k-column supports.
// Deterministic given seed. Random draws at desk scale have RICs far above
// the recovery thresholds, so gate-passing experiments need designed
// frames. Cost per iteration is C(cols, order) small eigensolves.
Matrix design_low_ric_frame(int rows, int cols, int order, int iterations,
                            std::uint64_t seed);

}  // namespace sprec
