#include "tspmdf/core.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "tspmdf/errors.hpp"

namespace tspmdf {

void require_valid_instance(const TspInstance& inst) {
    if (inst.node_count() < 3)
        throw DomainError("instance needs at least 3 nodes, got " +
                          std::to_string(inst.node_count()));
    for (double v : inst.xy)
        if (!std::isfinite(v)) throw DomainError("instance contains a non-finite coordinate");
}

bool is_permutation(const Tour& tour, int n) {
    if (static_cast<int>(tour.perm.size()) != n) return false;
    std::vector<char> seen(n, 0);
    for (int v : tour.perm) {
        if (v < 0 || v >= n || seen[v]) return false;
        seen[v] = 1;
    }
    return true;
}

void require_valid_tour(const TspInstance& inst, const Tour& tour) {
    if (!is_permutation(tour, inst.node_count()))
        throw StructuralError("tour is not a permutation of the instance's " +
                              std::to_string(inst.node_count()) + " node indices");
}

static void require_matching_size(const TspInstance& inst, const Tour& tour) {
    if (tour.perm.size() != static_cast<std::size_t>(inst.node_count()))
        throw StructuralError("tour has " + std::to_string(tour.perm.size()) +
                              " entries but instance has " + std::to_string(inst.node_count()) +
                              " nodes");
}

double tour_length(const TspInstance& inst, const Tour& tour) {
    require_matching_size(inst, tour);
    const int n = inst.node_count();
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += point_distance(inst, tour.perm[i], tour.perm[(i + 1) % n]);
    return total;
}

double tour_length_rounded(const TspInstance& inst, const Tour& tour) {
    require_matching_size(inst, tour);
    const int n = inst.node_count();
    double total = 0.0;
    for (int i = 0; i < n; ++i)
        total += std::nearbyint(point_distance(inst, tour.perm[i], tour.perm[(i + 1) % n]));
    return total;
}

double evaluate_on_original(const TspInstance& original, const Tour& tour) {
    return tour_length(original, tour);
}

BruteForceResult brute_force_optimal(const TspInstance& inst) {
    require_valid_instance(inst);
    const int n = inst.node_count();
    if (n > 10)
        throw DomainError("brute_force_optimal enumerates up to n=10, got n=" +
                          std::to_string(n));

    // Fix node 0 at the front and enumerate the rest in lexicographic order;
    // the perm[1] < perm[n-1] filter discards reversed duplicates. Keeping
    // the first strict minimum makes the lexicographically smallest optimal
    // canonical permutation the winner.
    std::vector<int> rest(n - 1);
    std::iota(rest.begin(), rest.end(), 1);

    Tour candidate;
    candidate.perm.resize(n);
    candidate.perm[0] = 0;

    BruteForceResult best;
    best.length = std::numeric_limits<double>::infinity();
    do {
        if (rest.front() > rest.back()) continue;
        std::copy(rest.begin(), rest.end(), candidate.perm.begin() + 1);
        double len = 0.0;
        for (int i = 0; i < n; ++i)
            len += point_distance(inst, candidate.perm[i], candidate.perm[(i + 1) % n]);
        if (len < best.length) {
            best.length = len;
            best.tour = candidate;
        }
    } while (std::next_permutation(rest.begin(), rest.end()));
    return best;
}

DistanceOracle::DistanceOracle(const TspInstance& inst) : inst_(&inst), n_(inst.node_count()) {
    if (n_ <= kMatrixCutoff) {
        matrix_.resize(static_cast<std::size_t>(n_) * n_);
        for (int i = 0; i < n_; ++i) {
            matrix_[static_cast<std::size_t>(i) * n_ + i] = 0.0;
            for (int j = i + 1; j < n_; ++j) {
                double d = point_distance(inst, i, j);
                matrix_[static_cast<std::size_t>(i) * n_ + j] = d;
                matrix_[static_cast<std::size_t>(j) * n_ + i] = d;
            }
        }
    }
}

}  // namespace tspmdf
