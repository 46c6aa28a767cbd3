#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "tspmdf/core.hpp"
#include "tspmdf/mat.hpp"

namespace tspmdf {

/// Static base graph G built once per original instance s: each node gets a
/// directed out-edge to each of its k nearest neighbors under distances in s
/// (no symmetrization, no self-loops; distance ties break on the smaller
/// index). Edge features are the Euclidean distances in s and stay fixed for
/// the whole episode, even though node coordinates get modified.
struct BaseGraph {
    int node_count = 0;
    int k = 0;
    std::vector<double> node_xy;        // 2n original coordinates
    std::vector<std::int32_t> edge_src;  // n*k, grouped by source: node i's
    std::vector<std::int32_t> edge_dst;  // edges occupy [i*k, (i+1)*k)
    std::vector<double> edge_feature;    // distance in s per edge

    [[nodiscard]] int edge_count() const { return static_cast<int>(edge_src.size()); }
};

/// Per-iteration graph G_t: the base graph's edges plus node features
/// [x_i, y_i, one_hot(encode(dx_i)), one_hot(encode(dy_i))] where (dx, dy) is
/// the total offset of s*_t relative to s. Feature length 2 + 2(2+10M).
struct DynamicGraph {
    std::shared_ptr<const BaseGraph> base;
    int digits = 0;      // M
    Mat node_features;   // n x (2 + 2(2+10M))
};

/// Node-feature length of a dynamic graph for codec precision m.
inline int dynamic_feature_dim(int m) { return 2 + 2 * (2 + 10 * m); }

/// Effective neighbor count: k, reduced to n-1 on small instances.
inline int effective_k(int k, int n) { return k < n ? k : n - 1; }

/// Builds G. Throws StructuralError when k >= n or k < 0.
std::shared_ptr<const BaseGraph> build_base_graph(const TspInstance& inst, int k);

/// Builds G_t from the incumbent s_star and original s. Total offsets must
/// already be clamped into (-1, 1); a violation throws StructuralError
/// because it means an upstream apply step skipped its clamp.
DynamicGraph build_dynamic_graph(std::shared_ptr<const BaseGraph> base,
                                 const TspInstance& s_star, const TspInstance& s, int m);

}  // namespace tspmdf
