#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace tspmdf {

/// A Euclidean TSP instance: n points in the plane, double precision.
///
/// Node order is identity-stable: index i in a coordinate-modified copy of an
/// instance refers to the same node as index i in the original. Tours found
/// on a modified copy are therefore directly evaluable on the original.
/// Coordinates are not confined to the unit square; modified instances may
/// leave it.
struct TspInstance {
    std::string name;
    std::vector<double> xy;  // 2n values, node i at (xy[2i], xy[2i+1])

    TspInstance() = default;
    TspInstance(std::string instance_name, std::vector<double> coords)
        : name(std::move(instance_name)), xy(std::move(coords)) {}

    [[nodiscard]] int node_count() const { return static_cast<int>(xy.size() / 2); }
    [[nodiscard]] double x(int i) const { return xy[2 * static_cast<std::size_t>(i)]; }
    [[nodiscard]] double y(int i) const { return xy[2 * static_cast<std::size_t>(i) + 1]; }
    void set(int i, double px, double py) {
        xy[2 * static_cast<std::size_t>(i)] = px;
        xy[2 * static_cast<std::size_t>(i) + 1] = py;
    }
};

/// A tour is a permutation of {0..n-1}; the closing edge perm[n-1] -> perm[0]
/// is implicit.
struct Tour {
    std::vector<int> perm;
};

inline double point_distance(const TspInstance& inst, int i, int j) {
    double dx = inst.x(i) - inst.x(j);
    double dy = inst.y(i) - inst.y(j);
    return std::sqrt(dx * dx + dy * dy);
}

/// Validates that every coordinate is finite and n >= 3.
void require_valid_instance(const TspInstance& inst);

[[nodiscard]] bool is_permutation(const Tour& tour, int n);

/// Throws StructuralError when the tour is not a permutation of the
/// instance's indices.
void require_valid_tour(const TspInstance& inst, const Tour& tour);

/// Exact Euclidean tour length with wraparound. Throws StructuralError on a
/// tour/instance size mismatch.
double tour_length(const TspInstance& inst, const Tour& tour);

/// TSPLib-convention length: each edge rounded to the nearest integer before
/// summing. Only used for reporting against published integer optima.
double tour_length_rounded(const TspInstance& inst, const Tour& tour);

/// Length of a tour constructed on a (possibly modified) copy, evaluated on
/// the original coordinates. The mapping back is the identity on
/// permutations, so this is tour_length on the original; it exists as a named
/// operation because call sites read better when the two instances differ.
double evaluate_on_original(const TspInstance& original, const Tour& tour);

struct BruteForceResult {
    Tour tour;
    double length = 0.0;
};

/// Exhaustive optimum over all (n-1)!/2 canonical permutations. Guarded to
/// n <= 10. Among equal-length optima returns the lexicographically smallest
/// permutation that starts at node 0 with perm[1] < perm[n-1].
BruteForceResult brute_force_optimal(const TspInstance& inst);

/// Pairwise distance lookup: materialized as a full matrix below the cutoff,
/// computed from coordinates above it. Borrows the instance; keep the
/// instance alive while the oracle is in use.
class DistanceOracle {
  public:
    static constexpr int kMatrixCutoff = 2000;

    explicit DistanceOracle(const TspInstance& inst);

    double operator()(int i, int j) const {
        if (!matrix_.empty()) return matrix_[static_cast<std::size_t>(i) * n_ + j];
        return point_distance(*inst_, i, j);
    }

  private:
    const TspInstance* inst_;
    int n_;
    std::vector<double> matrix_;
};

}  // namespace tspmdf
