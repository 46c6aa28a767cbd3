#pragma once

#include "tspmdf/core.hpp"

namespace tspmdf {

enum class ConstructorKind { kNearest, kFarthest };

/// Nearest-insertion heuristic, O(n^2).
///
/// Variant fixed here (tour diversity must come from instance modification,
/// never from constructor randomness): seed with the globally closest pair as
/// a 2-cycle; repeatedly take the unvisited node with minimum distance to any
/// tour node and splice it at the position of least length increase
/// |va-vu| + |vu-vb| - |va-vb|. Ties break on the smaller node index, then
/// the smaller insertion position.
Tour nearest_insertion(const TspInstance& inst);

/// Farthest-insertion heuristic, O(n^2): seed with the globally farthest
/// pair; repeatedly take the unvisited node maximizing its minimum distance
/// to the tour; same insertion and tie rules as nearest_insertion.
Tour farthest_insertion(const TspInstance& inst);

Tour construct(ConstructorKind kind, const TspInstance& inst);

}  // namespace tspmdf
