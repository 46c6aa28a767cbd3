#include "tspmdf/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tspmdf/errors.hpp"
#include "tspmdf/offset_codec.hpp"

namespace tspmdf {

std::shared_ptr<const BaseGraph> build_base_graph(const TspInstance& inst, int k) {
    require_valid_instance(inst);
    const int n = inst.node_count();
    if (k < 0 || k >= n)
        throw StructuralError("neighbor count k must satisfy 0 <= k < n; k=" + std::to_string(k) +
                              ", n=" + std::to_string(n));

    auto g = std::make_shared<BaseGraph>();
    g->node_count = n;
    g->k = k;
    g->node_xy = inst.xy;
    g->edge_src.reserve(static_cast<std::size_t>(n) * k);
    g->edge_dst.reserve(static_cast<std::size_t>(n) * k);
    g->edge_feature.reserve(static_cast<std::size_t>(n) * k);

    std::vector<std::pair<double, int>> row(n - 1);
    for (int i = 0; i < n; ++i) {
        int m = 0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            row[m++] = {point_distance(inst, i, j), j};
        }
        // (distance, index) sort makes the tie rule "smaller index wins".
        std::partial_sort(row.begin(), row.begin() + k, row.end());
        for (int e = 0; e < k; ++e) {
            g->edge_src.push_back(i);
            g->edge_dst.push_back(row[e].second);
            g->edge_feature.push_back(row[e].first);
        }
    }
    return g;
}

DynamicGraph build_dynamic_graph(std::shared_ptr<const BaseGraph> base,
                                 const TspInstance& s_star, const TspInstance& s, int m) {
    if (!base) throw StructuralError("build_dynamic_graph requires a base graph");
    const int n = base->node_count;
    if (s.node_count() != n || s_star.node_count() != n)
        throw StructuralError("node counts disagree: base graph " + std::to_string(n) +
                              ", original " + std::to_string(s.node_count()) + ", modified " +
                              std::to_string(s_star.node_count()));

    DynamicGraph g;
    g.base = std::move(base);
    g.digits = m;
    g.node_features = Mat(n, dynamic_feature_dim(m));

    const int block = 2 + 10 * m;
    for (int i = 0; i < n; ++i) {
        double* f = g.node_features.row(i);
        f[0] = s.x(i);
        f[1] = s.y(i);
        for (int dim = 0; dim < 2; ++dim) {
            double offset = (dim == 0 ? s_star.x(i) - s.x(i) : s_star.y(i) - s.y(i));
            if (!(std::fabs(offset) < 1.0))
                throw StructuralError("total offset " + std::to_string(offset) + " at node " +
                                      std::to_string(i) +
                                      " escaped (-1,1); an apply step skipped its clamp");
            OffsetCode code = encode(offset, m);
            double* slot = f + 2 + dim * block;
            slot[code.sign < 0 ? 0 : 1] = 1.0;
            for (int d = 0; d < m; ++d) slot[2 + 10 * d + code.digits[d]] = 1.0;
        }
    }
    return g;
}

}  // namespace tspmdf
