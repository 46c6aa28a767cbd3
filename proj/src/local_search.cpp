#include "tspmdf/local_search.hpp"

#include <algorithm>

namespace tspmdf {

namespace {
constexpr double kImproveEps = 1e-12;
}

Tour two_opt(const TspInstance& inst, const Tour& tour, int max_passes) {
    require_valid_tour(inst, tour);
    const int n = inst.node_count();
    DistanceOracle dist(inst);

    std::vector<int> perm = tour.perm;
    for (int pass = 0; pass < max_passes; ++pass) {
        double best_delta = -kImproveEps;
        int best_i = -1, best_j = -1;
        for (int i = 0; i < n - 1; ++i) {
            const int a = perm[i];
            const int b = perm[i + 1];
            const double d_ab = dist(a, b);
            // j == n-1 with i == 0 would remove the same edge twice.
            const int j_end = (i == 0) ? n - 1 : n;
            for (int j = i + 2; j < j_end; ++j) {
                const int c = perm[j];
                const int d = perm[(j + 1) % n];
                double delta = dist(a, c) + dist(b, d) - d_ab - dist(c, d);
                if (delta < best_delta) {
                    best_delta = delta;
                    best_i = i;
                    best_j = j;
                }
            }
        }
        if (best_i < 0) break;
        std::reverse(perm.begin() + best_i + 1, perm.begin() + best_j + 1);
    }

    Tour out;
    out.perm = std::move(perm);
    return out;
}

}  // namespace tspmdf
