#include "tspmdf/constructors.hpp"

#include <limits>
#include <vector>

#include "tspmdf/errors.hpp"

namespace tspmdf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shared insertion skeleton. `farthest` flips the seed pair and the selection
// rule; everything else is identical.
Tour insertion_heuristic(const TspInstance& inst, bool farthest) {
    require_valid_instance(inst);
    const int n = inst.node_count();
    DistanceOracle dist(inst);

    // Seed: globally closest (resp. farthest) pair, first hit in (i,j)
    // lexicographic scan order wins ties.
    int seed_a = 0, seed_b = 1;
    double seed_d = farthest ? -kInf : kInf;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double d = dist(i, j);
            if (farthest ? d > seed_d : d < seed_d) {
                seed_d = d;
                seed_a = i;
                seed_b = j;
            }
        }
    }

    std::vector<int> tour;
    tour.reserve(n);
    tour.push_back(seed_a);
    tour.push_back(seed_b);

    std::vector<char> visited(n, 0);
    visited[seed_a] = visited[seed_b] = 1;

    // dist_to_tour[u] = min distance from u to any tour node; refreshed with
    // just the newly inserted node each round, giving the O(n^2) total.
    std::vector<double> dist_to_tour(n);
    for (int u = 0; u < n; ++u)
        dist_to_tour[u] = std::min(dist(u, seed_a), dist(u, seed_b));

    while (static_cast<int>(tour.size()) < n) {
        int pick = -1;
        double pick_d = farthest ? -kInf : kInf;
        for (int u = 0; u < n; ++u) {
            if (visited[u]) continue;
            double d = dist_to_tour[u];
            if (farthest ? d > pick_d : d < pick_d) {
                pick_d = d;
                pick = u;
            }
        }

        // Cheapest splice position; the closing edge is position size()-1.
        const int len = static_cast<int>(tour.size());
        int best_pos = 0;
        double best_inc = kInf;
        for (int p = 0; p < len; ++p) {
            int a = tour[p];
            int b = tour[(p + 1) % len];
            double inc = dist(a, pick) + dist(pick, b) - dist(a, b);
            if (inc < best_inc) {
                best_inc = inc;
                best_pos = p;
            }
        }
        tour.insert(tour.begin() + best_pos + 1, pick);
        visited[pick] = 1;
        for (int u = 0; u < n; ++u) {
            if (visited[u]) continue;
            double d = dist(u, pick);
            if (d < dist_to_tour[u]) dist_to_tour[u] = d;
        }
    }

    Tour out;
    out.perm = std::move(tour);
    return out;
}

}  // namespace

Tour nearest_insertion(const TspInstance& inst) { return insertion_heuristic(inst, false); }

Tour farthest_insertion(const TspInstance& inst) { return insertion_heuristic(inst, true); }

Tour construct(ConstructorKind kind, const TspInstance& inst) {
    return kind == ConstructorKind::kNearest ? nearest_insertion(inst) : farthest_insertion(inst);
}

}  // namespace tspmdf
