#pragma once

#include "tspmdf/core.hpp"

namespace tspmdf {

/// Best-improvement 2-opt over the full O(n^2) exchange neighborhood.
///
/// Each pass scans every position pair (i, j), i < j, evaluates the gain of
/// reversing the segment i+1..j, and applies the single best exchange when it
/// improves by more than 1e-12. Stops when a pass finds no such exchange or
/// after max_passes passes.
Tour two_opt(const TspInstance& inst, const Tour& tour, int max_passes = 1000);

}  // namespace tspmdf
