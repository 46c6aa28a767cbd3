#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tspmdf/agnn.hpp"
#include "tspmdf/constructors.hpp"
#include "tspmdf/core.hpp"
#include "tspmdf/policy.hpp"

namespace tspmdf {

/// Which pipeline variant a run exercises. The full method samples offset
/// refinements of the incumbent s*_t with the sign/digit head and adds
/// self-imitation; the ablations strip those pieces back to offsets of the
/// original instance, plain REINFORCE, or the continuous head.
struct TrainVariant {
    bool refine_incumbent = true;  // offsets add to s*_t rather than to s
    HeadKind head = HeadKind::kCategorical;
    bool imitation = true;

    static TrainVariant full() { return {true, HeadKind::kCategorical, true}; }
    static TrainVariant no_imitation() { return {false, HeadKind::kCategorical, false}; }
    static TrainVariant continuous() { return {false, HeadKind::kGaussian, false}; }
};

struct SampleOutcome {
    Modification mod;         // sign/digit path; empty under the continuous head
    std::vector<double> raw;  // continuous path: pre-clamp draws (2n); else empty
    double mapped_length = 0.0;
    double log_prob = 0.0;  // under the distribution it was drawn from
    double reward = 0.0;    // incumbent mapped length minus mapped_length
};

/// Everything one (instance, iteration) pair contributes to the two losses.
struct IterationRecord {
    int slot = 0;  // index into the epoch batch, and into dists/dlogits below
    int t = 0;
    double star_len = 0.0;  // mapped length of the incumbent at this t
    std::vector<SampleOutcome> samples;
    Modification expert;  // step from the candidate base to s*_{t+1}; zero when unchanged
    double expert_reduction = 0.0;  // star_len - next star_len, never negative
};

/// Policy-gradient loss, -(1/total_samples) * sum A * log_prob with the
/// advantage A = reward - per-record mean reward held constant. Recomputes
/// log-probabilities from `dists` (indexed by record slot) so loss and
/// gradient always agree, and adds d loss / d logits into dlogits[slot].
/// Throws UsageError when a record has no samples.
double reinforce_objective(const std::vector<IterationRecord>& records,
                           const std::vector<NodeDistributions>& dists,
                           std::vector<Mat>& dlogits);

/// The continuous-head counterpart; log-densities at the pre-clamp draws.
double reinforce_objective_continuous(const std::vector<IterationRecord>& records,
                                      const std::vector<Mat>& logits,
                                      const std::vector<GaussianHeads>& heads,
                                      std::vector<Mat>& dlogits);

/// Weighted self-imitation loss, -sum_records w * log_prob(expert) with
/// w = reduction / (batch sum of reductions) + w_fixed, falling back to
/// w = w_fixed for everyone when the batch sum is zero. Returns the raw loss;
/// the gradient added into dlogits is scaled by grad_scale (the lambda of the
/// combined objective).
double imitation_objective(const std::vector<IterationRecord>& records,
                           const std::vector<NodeDistributions>& dists, double w_fixed,
                           double grad_scale, std::vector<Mat>& dlogits);

struct TrainConfig {
    int n = 500;
    int batch_size = 16;
    int t_iters = 30;
    int samples = 50;
    int digits = 4;  // M
    double lambda = 1.0;
    double w_fixed = 0.01;
    ConstructorKind constructor = ConstructorKind::kFarthest;
    std::uint64_t seed = 0;
    int k = 50;
    int threads = 0;  // 0 = one per available core
    TrainVariant variant = TrainVariant::full();
    // Test override. Empty = fresh uniform [0,1)^2 instances derived from
    // (seed, epoch, slot).
    std::function<TspInstance(int epoch, int slot)> instance_generator;
};

struct IterationMetrics {
    int epoch = 0;
    int t = 0;
    // Mean over the batch of (base length - best mapped-back candidate length
    // seen so far, the base tour excluded). Negative while sampled
    // modifications only hurt; turning positive is the sign training works.
    double mean_best_reduction = 0.0;
    double rl_loss = 0.0;
    double il_loss = 0.0;
};

struct EpochMetrics {
    int epoch = 0;
    double mean_base_length = 0.0;
    std::vector<IterationMetrics> per_iteration;  // t_iters entries
};

/// One epoch: a fresh batch of instances, then for each of t_iters
/// iterations one optimizer step on rl + lambda * il (il only when the
/// variant enables it). Constructor evaluations fan out across
/// batch * samples; model passes and the update stay serialized, and every
/// random draw has a fixed (seed, epoch, slot, t, sample) stream, so metrics
/// do not depend on the thread count.
EpochMetrics train_epoch(ModelParams& params, OptimizerState& opt, const TrainConfig& config,
                         int epoch);

}  // namespace tspmdf
