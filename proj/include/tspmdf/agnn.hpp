#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tspmdf/graph.hpp"
#include "tspmdf/mat.hpp"

namespace tspmdf {

/// Which output head sits on the trunk: the discrete sign/digit head of width
/// 2(10M+2), or the 4-wide Gaussian head (mu, raw sigma per dimension) used
/// by the continuous ablation.
enum class HeadKind { kCategorical, kGaussian };

struct LayerParams {
    Mat w1, w2, w3, w4, w5;  // H x H
    Mat bn_node_scale, bn_node_shift;  // H x 1
    Mat bn_edge_scale, bn_edge_shift;  // H x 1
};

/// Parameters of the message-passing network.
///
/// Forward semantics (all in double precision):
///   h0_i  = SiLU(theta_x x_i),  h0_ij = SiLU(theta_e e_ij)
///   node: h_i  <- h_i  + SiLU(BN(w1 h_i + mean_{(i->j)} sigmoid(h_ij) * w2 h_j))
///   edge: h_ij <- h_ij + SiLU(BN(w3 h_ij + w4 h_i + w5 h_j))
///   head: logits_i = head_w2 SiLU(head_w1 h_i + head_b1) + head_b2
/// The mean aggregation for node i runs over i's own out-edge list (exactly k
/// terms); an empty list contributes a zero vector. Batch normalization uses
/// the statistics of the current graph's node (resp. edge) set in both
/// training and inference; there are no running averages.
struct ModelParams {
    int hidden = 32;
    int layers = 12;
    int digits = 4;  // M; fixes the input feature layout and head width
    HeadKind head = HeadKind::kCategorical;

    Mat theta_x;  // H x node_feature_dim
    Mat theta_e;  // H x 1
    std::vector<LayerParams> layer;
    Mat head_w1, head_b1;  // H x H, H x 1
    Mat head_w2, head_b2;  // out x H, out x 1

    [[nodiscard]] int node_feature_dim() const { return dynamic_feature_dim(digits); }
    [[nodiscard]] int head_output_dim() const {
        return head == HeadKind::kCategorical ? 2 * (10 * digits + 2) : 4;
    }
};

/// Weight matrices: uniform +-sqrt(6/(fan_in+fan_out)). Biases zero, batch
/// norm scale 1 / shift 0. Deterministic in the seed.
ModelParams init_model(int hidden, int layers, int digits, HeadKind head, std::uint64_t seed);

/// Same shapes as `like`, all values zero. Gradient containers reuse the
/// ModelParams layout.
ModelParams zeros_like(const ModelParams& like);

/// into += scale * from, tensor by tensor (gradient accumulation across a
/// batch). Shapes must match.
void add_scaled(ModelParams& into, const ModelParams& from, double scale = 1.0);

/// Visits every tensor in the frozen manifest order (checkpoints and
/// optimizer moments index tensors by this order): theta_x, theta_e, then per
/// layer w1..w5 and the four BN vectors, then the head.
template <class Params, class Fn>
void for_each_tensor(Params& p, Fn&& fn) {
    fn("theta_x", p.theta_x);
    fn("theta_e", p.theta_e);
    for (std::size_t l = 0; l < p.layer.size(); ++l) {
        const std::string prefix = "layer" + std::to_string(l) + ".";
        auto& lay = p.layer[l];
        fn((prefix + "w1").c_str(), lay.w1);
        fn((prefix + "w2").c_str(), lay.w2);
        fn((prefix + "w3").c_str(), lay.w3);
        fn((prefix + "w4").c_str(), lay.w4);
        fn((prefix + "w5").c_str(), lay.w5);
        fn((prefix + "bn_node_scale").c_str(), lay.bn_node_scale);
        fn((prefix + "bn_node_shift").c_str(), lay.bn_node_shift);
        fn((prefix + "bn_edge_scale").c_str(), lay.bn_edge_scale);
        fn((prefix + "bn_edge_shift").c_str(), lay.bn_edge_shift);
    }
    fn("head.w1", p.head_w1);
    fn("head.b1", p.head_b1);
    fn("head.w2", p.head_w2);
    fn("head.b2", p.head_b2);
}

/// Activations recorded by a training-mode forward pass: the embeddings at
/// every layer boundary plus the input projections and head intermediates.
/// Within-layer values (aggregation, batch-norm statistics) are recomputed
/// during backward from the boundary embeddings, trading a third forward's
/// worth of work for a tape that stays O(L * (n + E) * H).
struct Tape {
    DynamicGraph graph;
    Mat z_node, z_edge;               // pre-SiLU input projections
    std::vector<Mat> node_h, edge_h;  // layers+1 boundary embeddings
    Mat head_z1;                      // n x H pre-SiLU
    Mat head_hidden;                  // n x H post-SiLU
    bool valid = false;
};

struct ForwardResult {
    Mat logits;                  // n x head_output_dim
    std::shared_ptr<Tape> tape;  // null unless training=true
};

/// One pass over the graph. Throws StructuralError on a feature-layout
/// mismatch and NumericalError when the logits come out non-finite.
ForwardResult forward(const ModelParams& params, const DynamicGraph& g, bool training);

/// Exact reverse-mode gradients of the scalar loss whose logit gradients are
/// supplied. Requires a training-mode tape (UsageError otherwise).
ModelParams backward(const ModelParams& params, const Tape& tape, const Mat& dlogits);

/// Decoupled-weight-decay adaptive optimizer state. Moments are stored in
/// manifest order.
struct OptimizerState {
    double lr = 1e-3;
    double weight_decay = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long long step = 0;
    std::vector<Mat> m, v;
};

OptimizerState init_optimizer(const ModelParams& params, double lr = 1e-3,
                              double weight_decay = 0.01);

/// One update: bias-corrected moments, then
/// p <- p - lr * m_hat / (sqrt(v_hat) + eps) - lr * wd * p.
void optimizer_step(ModelParams& params, OptimizerState& state, const ModelParams& grads);

}  // namespace tspmdf
