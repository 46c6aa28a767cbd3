#include "tspmdf/agnn.hpp"

#include <cmath>

#include "tspmdf/errors.hpp"
#include "tspmdf/rng.hpp"

namespace tspmdf {

namespace {

constexpr double kBnEps = 1e-5;

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

inline double silu(double x) { return x * sigmoid(x); }

// d/dx silu(x) = s(x) * (1 + x * (1 - s(x)))
inline double dsilu(double x) {
    double s = sigmoid(x);
    return s * (1.0 + x * (1.0 - s));
}

void silu_into(const Mat& z, Mat& out) {
    for (std::size_t i = 0; i < z.size(); ++i) out.a[i] = silu(z.a[i]);
}

void col_sum_into(const Mat& src, Mat& dst) {
    for (int r = 0; r < src.rows; ++r) {
        const double* row = src.row(r);
        for (int c = 0; c < src.cols; ++c) dst(c, 0) += row[c];
    }
}

// Normalization over the row dimension with batch statistics (biased
// variance), y = scale * (u - mean) * inv_std + shift.
void bn_forward(const Mat& u, const Mat& scale, const Mat& shift, Mat& y,
                std::vector<double>& mean, std::vector<double>& inv_std) {
    const int n = u.rows, h = u.cols;
    mean.assign(h, 0.0);
    for (int r = 0; r < n; ++r) {
        const double* ur = u.row(r);
        for (int c = 0; c < h; ++c) mean[c] += ur[c];
    }
    for (int c = 0; c < h; ++c) mean[c] /= n;

    inv_std.assign(h, 0.0);
    for (int r = 0; r < n; ++r) {
        const double* ur = u.row(r);
        for (int c = 0; c < h; ++c) {
            double d = ur[c] - mean[c];
            inv_std[c] += d * d;
        }
    }
    for (int c = 0; c < h; ++c) inv_std[c] = 1.0 / std::sqrt(inv_std[c] / n + kBnEps);

    for (int r = 0; r < n; ++r) {
        const double* ur = u.row(r);
        double* yr = y.row(r);
        for (int c = 0; c < h; ++c)
            yr[c] = scale(c, 0) * (ur[c] - mean[c]) * inv_std[c] + shift(c, 0);
    }
}

// Reverse of bn_forward with batch statistics, so the mean/variance terms
// carry gradient too:
//   du = inv_std * (dyhat - mean_r(dyhat) - uhat * mean_r(dyhat*uhat))
// with dyhat = dy * scale and uhat the normalized input.
void bn_backward(const Mat& dy, const Mat& u, const std::vector<double>& mean,
                 const std::vector<double>& inv_std, const Mat& scale, Mat& du, Mat& dscale,
                 Mat& dshift) {
    const int n = u.rows, h = u.cols;
    std::vector<double> sum_dyhat(h, 0.0), sum_dyhat_uhat(h, 0.0);
    for (int r = 0; r < n; ++r) {
        const double* ur = u.row(r);
        const double* dyr = dy.row(r);
        for (int c = 0; c < h; ++c) {
            double uhat = (ur[c] - mean[c]) * inv_std[c];
            dscale(c, 0) += dyr[c] * uhat;
            dshift(c, 0) += dyr[c];
            double dyhat = dyr[c] * scale(c, 0);
            sum_dyhat[c] += dyhat;
            sum_dyhat_uhat[c] += dyhat * uhat;
        }
    }
    for (int r = 0; r < n; ++r) {
        const double* ur = u.row(r);
        const double* dyr = dy.row(r);
        double* dur = du.row(r);
        for (int c = 0; c < h; ++c) {
            double uhat = (ur[c] - mean[c]) * inv_std[c];
            double dyhat = dyr[c] * scale(c, 0);
            dur[c] = inv_std[c] * (dyhat - sum_dyhat[c] / n - uhat * sum_dyhat_uhat[c] / n);
        }
    }
}

// Pre-activation values of one layer, recomputed identically during forward
// and backward.
struct LayerActs {
    Mat q;       // n x H, w2 h_j
    Mat u;       // n x H, node pre-BN
    Mat y_node;  // n x H, node pre-SiLU
    Mat v;       // E x H, edge pre-BN
    Mat y_edge;  // E x H, edge pre-SiLU
    std::vector<double> node_mean, node_inv, edge_mean, edge_inv;
};

void layer_compute(const LayerParams& lp, const BaseGraph& base, const Mat& hn, const Mat& he,
                   LayerActs& acts) {
    const int n = base.node_count, e_count = base.edge_count(), h = hn.cols, k = base.k;

    acts.u = Mat(n, h);
    mul_abt(hn, lp.w1, acts.u);
    acts.q = Mat(n, h);
    mul_abt(hn, lp.w2, acts.q);

    if (k > 0) {
        std::vector<double> acc(h);
        for (int i = 0; i < n; ++i) {
            std::fill(acc.begin(), acc.end(), 0.0);
            for (int e = i * k; e < (i + 1) * k; ++e) {
                const double* her = he.row(e);
                const double* qd = acts.q.row(base.edge_dst[e]);
                for (int c = 0; c < h; ++c) acc[c] += sigmoid(her[c]) * qd[c];
            }
            double* ur = acts.u.row(i);
            for (int c = 0; c < h; ++c) ur[c] += acc[c] / k;
        }
    }
    acts.y_node = Mat(n, h);
    bn_forward(acts.u, lp.bn_node_scale, lp.bn_node_shift, acts.y_node, acts.node_mean,
               acts.node_inv);

    if (e_count > 0) {
        acts.v = Mat(e_count, h);
        mul_abt(he, lp.w3, acts.v);
        Mat a4(n, h), a5(n, h);
        mul_abt(hn, lp.w4, a4);
        mul_abt(hn, lp.w5, a5);
        for (int e = 0; e < e_count; ++e) {
            double* vr = acts.v.row(e);
            const double* s = a4.row(base.edge_src[e]);
            const double* d = a5.row(base.edge_dst[e]);
            for (int c = 0; c < h; ++c) vr[c] += s[c] + d[c];
        }
        acts.y_edge = Mat(e_count, h);
        bn_forward(acts.v, lp.bn_edge_scale, lp.bn_edge_shift, acts.y_edge, acts.edge_mean,
                   acts.edge_inv);
    }
}

void require_graph_compatible(const ModelParams& params, const DynamicGraph& g) {
    if (!g.base) throw StructuralError("dynamic graph has no base graph");
    if (g.digits != params.digits || g.node_features.cols != params.node_feature_dim())
        throw StructuralError(
            "graph features do not match the model: graph M=" + std::to_string(g.digits) +
            " width=" + std::to_string(g.node_features.cols) + ", model M=" +
            std::to_string(params.digits) + " width=" + std::to_string(params.node_feature_dim()));
}

}  // namespace

ModelParams init_model(int hidden, int layers, int digits, HeadKind head, std::uint64_t seed) {
    if (hidden < 1 || layers < 0) throw DomainError("model needs hidden >= 1 and layers >= 0");
    ModelParams p;
    p.hidden = hidden;
    p.layers = layers;
    p.digits = digits;
    p.head = head;

    Rng rng(seed);
    auto glorot = [&rng](int rows, int cols) {
        Mat w(rows, cols);
        double bound = std::sqrt(6.0 / (rows + cols));
        for (auto& v : w.a) v = (2.0 * rng.next_double() - 1.0) * bound;
        return w;
    };
    auto ones = [](int rows) {
        Mat w(rows, 1);
        std::fill(w.a.begin(), w.a.end(), 1.0);
        return w;
    };

    p.theta_x = glorot(hidden, p.node_feature_dim());
    p.theta_e = glorot(hidden, 1);
    p.layer.resize(layers);
    for (auto& lay : p.layer) {
        lay.w1 = glorot(hidden, hidden);
        lay.w2 = glorot(hidden, hidden);
        lay.w3 = glorot(hidden, hidden);
        lay.w4 = glorot(hidden, hidden);
        lay.w5 = glorot(hidden, hidden);
        lay.bn_node_scale = ones(hidden);
        lay.bn_node_shift = Mat(hidden, 1);
        lay.bn_edge_scale = ones(hidden);
        lay.bn_edge_shift = Mat(hidden, 1);
    }
    p.head_w1 = glorot(hidden, hidden);
    p.head_b1 = Mat(hidden, 1);
    p.head_w2 = glorot(p.head_output_dim(), hidden);
    p.head_b2 = Mat(p.head_output_dim(), 1);
    return p;
}

ModelParams zeros_like(const ModelParams& like) {
    ModelParams z;
    z.hidden = like.hidden;
    z.layers = like.layers;
    z.digits = like.digits;
    z.head = like.head;
    z.theta_x = Mat(like.theta_x.rows, like.theta_x.cols);
    z.theta_e = Mat(like.theta_e.rows, like.theta_e.cols);
    z.layer.resize(like.layer.size());
    for (std::size_t l = 0; l < like.layer.size(); ++l) {
        const auto& src = like.layer[l];
        auto& dst = z.layer[l];
        dst.w1 = Mat(src.w1.rows, src.w1.cols);
        dst.w2 = Mat(src.w2.rows, src.w2.cols);
        dst.w3 = Mat(src.w3.rows, src.w3.cols);
        dst.w4 = Mat(src.w4.rows, src.w4.cols);
        dst.w5 = Mat(src.w5.rows, src.w5.cols);
        dst.bn_node_scale = Mat(src.bn_node_scale.rows, 1);
        dst.bn_node_shift = Mat(src.bn_node_shift.rows, 1);
        dst.bn_edge_scale = Mat(src.bn_edge_scale.rows, 1);
        dst.bn_edge_shift = Mat(src.bn_edge_shift.rows, 1);
    }
    z.head_w1 = Mat(like.head_w1.rows, like.head_w1.cols);
    z.head_b1 = Mat(like.head_b1.rows, 1);
    z.head_w2 = Mat(like.head_w2.rows, like.head_w2.cols);
    z.head_b2 = Mat(like.head_b2.rows, 1);
    return z;
}

void add_scaled(ModelParams& into, const ModelParams& from, double scale) {
    std::vector<Mat*> dst;
    for_each_tensor(into, [&dst](const char*, Mat& t) { dst.push_back(&t); });
    std::vector<const Mat*> src;
    for_each_tensor(from, [&src](const char*, const Mat& t) { src.push_back(&t); });
    if (dst.size() != src.size()) throw StructuralError("add_scaled: parameter manifests differ");
    for (std::size_t i = 0; i < dst.size(); ++i) {
        if (!dst[i]->same_shape(*src[i]))
            throw StructuralError("add_scaled: tensor shape mismatch");
        for (std::size_t j = 0; j < dst[i]->size(); ++j) dst[i]->a[j] += scale * src[i]->a[j];
    }
}

ForwardResult forward(const ModelParams& params, const DynamicGraph& g, bool training) {
    require_graph_compatible(params, g);
    const BaseGraph& base = *g.base;
    const int n = base.node_count, e_count = base.edge_count(), h = params.hidden;

    Mat z_node(n, h);
    mul_abt(g.node_features, params.theta_x, z_node);
    Mat h_node(n, h);
    silu_into(z_node, h_node);

    Mat z_edge(e_count, h);
    for (int e = 0; e < e_count; ++e) {
        double* zr = z_edge.row(e);
        double feat = base.edge_feature[e];
        for (int c = 0; c < h; ++c) zr[c] = params.theta_e(c, 0) * feat;
    }
    Mat h_edge(e_count, h);
    silu_into(z_edge, h_edge);

    std::shared_ptr<Tape> tape;
    if (training) {
        tape = std::make_shared<Tape>();
        tape->graph = g;
        tape->z_node = z_node;
        tape->z_edge = z_edge;
        tape->node_h.reserve(params.layers + 1);
        tape->edge_h.reserve(params.layers + 1);
        tape->node_h.push_back(h_node);
        tape->edge_h.push_back(h_edge);
    }

    LayerActs acts;
    for (int l = 0; l < params.layers; ++l) {
        layer_compute(params.layer[l], base, h_node, h_edge, acts);
        for (int r = 0; r < n; ++r) {
            double* hr = h_node.row(r);
            const double* yr = acts.y_node.row(r);
            for (int c = 0; c < h; ++c) hr[c] += silu(yr[c]);
        }
        for (int e = 0; e < e_count; ++e) {
            double* hr = h_edge.row(e);
            const double* yr = acts.y_edge.row(e);
            for (int c = 0; c < h; ++c) hr[c] += silu(yr[c]);
        }
        if (training) {
            tape->node_h.push_back(h_node);
            tape->edge_h.push_back(h_edge);
        }
    }

    const int out = params.head_output_dim();
    Mat head_z1(n, h);
    mul_abt(h_node, params.head_w1, head_z1);
    for (int r = 0; r < n; ++r) {
        double* zr = head_z1.row(r);
        for (int c = 0; c < h; ++c) zr[c] += params.head_b1(c, 0);
    }
    Mat head_hidden(n, h);
    silu_into(head_z1, head_hidden);

    ForwardResult result;
    result.logits = Mat(n, out);
    mul_abt(head_hidden, params.head_w2, result.logits);
    for (int r = 0; r < n; ++r) {
        double* lr = result.logits.row(r);
        for (int c = 0; c < out; ++c) lr[c] += params.head_b2(c, 0);
    }

    for (double v : result.logits.a)
        if (!std::isfinite(v)) throw NumericalError("forward produced non-finite logits");

    if (training) {
        tape->head_z1 = std::move(head_z1);
        tape->head_hidden = std::move(head_hidden);
        tape->valid = true;
        result.tape = std::move(tape);
    }
    return result;
}

namespace {

// Consumes output-side gradients in dnode/dedge and leaves input-side
// gradients there. The residual pass-through is why the buffers can be
// reused: d(input) starts equal to d(output) and accumulates every other
// path's contribution.
void layer_backward(const LayerParams& lp, LayerParams& gl, const BaseGraph& base, const Mat& hn,
                    const Mat& he, Mat& dnode, Mat& dedge) {
    const int n = base.node_count, e_count = base.edge_count(), h = hn.cols, k = base.k;

    LayerActs acts;
    layer_compute(lp, base, hn, he, acts);

    // Both SiLU gradients must be taken from the pure output-side values
    // before dnode/dedge start accumulating input-side terms.
    Mat dy_node(n, h);
    for (int r = 0; r < n; ++r) {
        const double* dr = dnode.row(r);
        const double* yr = acts.y_node.row(r);
        double* o = dy_node.row(r);
        for (int c = 0; c < h; ++c) o[c] = dr[c] * dsilu(yr[c]);
    }
    Mat dy_edge(e_count, h);
    for (int e = 0; e < e_count; ++e) {
        const double* dr = dedge.row(e);
        const double* yr = acts.y_edge.row(e);
        double* o = dy_edge.row(e);
        for (int c = 0; c < h; ++c) o[c] = dr[c] * dsilu(yr[c]);
    }

    // Node path.
    Mat du(n, h);
    bn_backward(dy_node, acts.u, acts.node_mean, acts.node_inv, lp.bn_node_scale, du,
                gl.bn_node_scale, gl.bn_node_shift);
    add_atb(du, hn, gl.w1);
    add_ab(du, lp.w1, dnode);

    if (k > 0) {
        Mat dq(n, h);
        for (int i = 0; i < n; ++i) {
            const double* dui = du.row(i);
            for (int e = i * k; e < (i + 1) * k; ++e) {
                const double* her = he.row(e);
                const double* qd = acts.q.row(base.edge_dst[e]);
                double* dqd = dq.row(base.edge_dst[e]);
                double* der = dedge.row(e);
                for (int c = 0; c < h; ++c) {
                    double s = sigmoid(her[c]);
                    double share = dui[c] / k;
                    dqd[c] += share * s;
                    der[c] += share * qd[c] * s * (1.0 - s);
                }
            }
        }
        add_atb(dq, hn, gl.w2);
        add_ab(dq, lp.w2, dnode);
    }

    // Edge path.
    if (e_count > 0) {
        Mat dv(e_count, h);
        bn_backward(dy_edge, acts.v, acts.edge_mean, acts.edge_inv, lp.bn_edge_scale, dv,
                    gl.bn_edge_scale, gl.bn_edge_shift);
        add_atb(dv, he, gl.w3);
        add_ab(dv, lp.w3, dedge);

        // dW4 = sum_e dv_e h_src^T collapses to per-node sums first, keeping
        // the expensive H*H work at O(n) instead of O(E).
        Mat dv_src(n, h), dv_dst(n, h);
        for (int e = 0; e < e_count; ++e) {
            const double* dvr = dv.row(e);
            double* s = dv_src.row(base.edge_src[e]);
            double* d = dv_dst.row(base.edge_dst[e]);
            for (int c = 0; c < h; ++c) {
                s[c] += dvr[c];
                d[c] += dvr[c];
            }
        }
        add_atb(dv_src, hn, gl.w4);
        add_ab(dv_src, lp.w4, dnode);
        add_atb(dv_dst, hn, gl.w5);
        add_ab(dv_dst, lp.w5, dnode);
    }
}

}  // namespace

ModelParams backward(const ModelParams& params, const Tape& tape, const Mat& dlogits) {
    if (!tape.valid) throw UsageError("backward needs a tape from forward(training=true)");
    const BaseGraph& base = *tape.graph.base;
    const int n = base.node_count, e_count = base.edge_count(), h = params.hidden;
    if (dlogits.rows != n || dlogits.cols != params.head_output_dim())
        throw StructuralError("logit-gradient shape does not match the model head");

    ModelParams grads = zeros_like(params);

    // Head.
    add_atb(dlogits, tape.head_hidden, grads.head_w2);
    col_sum_into(dlogits, grads.head_b2);
    Mat dhidden(n, h);
    add_ab(dlogits, params.head_w2, dhidden);
    Mat dz1(n, h);
    for (int r = 0; r < n; ++r) {
        const double* dr = dhidden.row(r);
        const double* zr = tape.head_z1.row(r);
        double* o = dz1.row(r);
        for (int c = 0; c < h; ++c) o[c] = dr[c] * dsilu(zr[c]);
    }
    add_atb(dz1, tape.node_h[params.layers], grads.head_w1);
    col_sum_into(dz1, grads.head_b1);

    Mat dnode(n, h);
    add_ab(dz1, params.head_w1, dnode);
    Mat dedge(e_count, h);

    for (int l = params.layers - 1; l >= 0; --l)
        layer_backward(params.layer[l], grads.layer[l], base, tape.node_h[l], tape.edge_h[l],
                       dnode, dedge);

    // Input projections.
    Mat dz_node(n, tape.z_node.cols);
    for (int r = 0; r < n; ++r) {
        const double* dr = dnode.row(r);
        const double* zr = tape.z_node.row(r);
        double* o = dz_node.row(r);
        for (int c = 0; c < h; ++c) o[c] = dr[c] * dsilu(zr[c]);
    }
    add_atb(dz_node, tape.graph.node_features, grads.theta_x);

    for (int e = 0; e < e_count; ++e) {
        const double* dr = dedge.row(e);
        const double* zr = tape.z_edge.row(e);
        double feat = base.edge_feature[e];
        for (int c = 0; c < h; ++c) grads.theta_e(c, 0) += dr[c] * dsilu(zr[c]) * feat;
    }
    return grads;
}

OptimizerState init_optimizer(const ModelParams& params, double lr, double weight_decay) {
    OptimizerState st;
    st.lr = lr;
    st.weight_decay = weight_decay;
    for_each_tensor(params, [&st](const char*, const Mat& t) {
        st.m.emplace_back(t.rows, t.cols);
        st.v.emplace_back(t.rows, t.cols);
    });
    return st;
}

void optimizer_step(ModelParams& params, OptimizerState& state, const ModelParams& grads) {
    std::vector<Mat*> tensors;
    for_each_tensor(params, [&tensors](const char*, Mat& t) { tensors.push_back(&t); });
    std::vector<const Mat*> gtensors;
    for_each_tensor(grads, [&gtensors](const char*, const Mat& t) { gtensors.push_back(&t); });
    if (tensors.size() != gtensors.size() || tensors.size() != state.m.size())
        throw StructuralError("optimizer state does not match the parameter manifest");

    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

    for (std::size_t i = 0; i < tensors.size(); ++i) {
        Mat& p = *tensors[i];
        const Mat& g = *gtensors[i];
        Mat& m = state.m[i];
        Mat& v = state.v[i];
        if (!p.same_shape(g) || !p.same_shape(m))
            throw StructuralError("gradient/moment shape mismatch in optimizer step");
        for (std::size_t j = 0; j < p.size(); ++j) {
            m.a[j] = state.beta1 * m.a[j] + (1.0 - state.beta1) * g.a[j];
            v.a[j] = state.beta2 * v.a[j] + (1.0 - state.beta2) * g.a[j] * g.a[j];
            double m_hat = m.a[j] / bc1;
            double v_hat = v.a[j] / bc2;
            p.a[j] -= state.lr * (m_hat / (std::sqrt(v_hat) + state.eps)) +
                      state.lr * state.weight_decay * p.a[j];
        }
    }
}

}  // namespace tspmdf
