#pragma once

#include <vector>

#include "tspmdf/core.hpp"
#include "tspmdf/mat.hpp"
#include "tspmdf/offset_codec.hpp"
#include "tspmdf/rng.hpp"

namespace tspmdf {

/// Per-node head probabilities, stored softmaxed in the raw logit layout:
/// for each dimension a 2-way sign block followed by M 10-way digit blocks,
/// dimension 1 first. Width 2(10M+2).
struct NodeDistributions {
    int digits = 0;  // M
    Mat probs;       // n x 2(10M+2), each block sums to 1

    [[nodiscard]] int node_count() const { return probs.rows; }
};

/// One sampled (or expert) instance modification: an offset code per node and
/// dimension plus the decoded offsets, kept together so apply and scoring
/// never re-decode inconsistently.
struct Modification {
    std::vector<OffsetCode> dx, dy;  // per node
    std::vector<double> delta;       // 2n flat, decoded (dx, dy) pairs

    [[nodiscard]] int node_count() const { return static_cast<int>(dx.size()); }
};

/// Softmax per block in the fixed slicing order. Throws StructuralError when
/// the logit width is not 2(10M+2).
NodeDistributions heads_to_distributions(const Mat& logits, int digits);

/// Draws sign and every digit independently per (node, dimension); all-zero
/// digit draws canonicalize to sign +1. Draw order is fixed (node-major,
/// dimension, sign before digits) as part of the reproducibility contract.
Modification sample_modification(const NodeDistributions& dists, Rng& rng);

/// The all-zero modification (canonical +1 signs).
Modification zero_modification(int node_count, int digits);

/// Per-coordinate encode(to - from, digits); the imitation target
/// for a step from incumbent `from` to selected candidate `to`.
Modification encode_modification(const TspInstance& from, const TspInstance& to, int digits);

/// Sum over nodes and dimensions of log sign prob plus per-digit log probs.
/// All-zero codes score the +1 sign branch only; a non-canonical zero code
/// throws DomainError.
double log_prob(const NodeDistributions& dists, const Modification& mod);

/// dlogits += coeff * d log_prob / d logits (softmax-block gradient
/// onehot - p per selected block). `coeff` is the multiplier log_prob
/// carries in the loss being differentiated.
void add_log_prob_grad(const NodeDistributions& dists, const Modification& mod, double coeff,
                       Mat& dlogits);

/// Candidate instance: coordinates of s_star plus the decoded offsets, with
/// the cumulative offset relative to s clamped to +-(1 - 10^-digits) so
/// downstream feature encoding stays in range.
TspInstance apply_modification(const TspInstance& s_star, const TspInstance& s,
                               const Modification& mod, int digits);

/// Same application and clamp for raw per-coordinate offsets (2n values);
/// the continuous variant's apply step.
TspInstance apply_delta(const TspInstance& s_star, const TspInstance& s,
                        const std::vector<double>& delta, int digits);

/// Continuous-head parameters per node and dimension. sigma is
/// softplus(raw) with a 1e-3 floor, so it is always positive.
struct GaussianHeads {
    Mat mu;     // n x 2
    Mat sigma;  // n x 2
};

/// Splits a 4-wide head row [mu1, raw_sigma1, mu2, raw_sigma2].
GaussianHeads gaussian_heads(const Mat& logits);

struct GaussianSample {
    std::vector<double> raw;    // 2n pre-clamp draws; the density is theirs
    std::vector<double> delta;  // 2n offsets clamped into +-(1 - 10^-digits)
    double log_density = 0.0;
};

/// Draws delta ~ N(mu, sigma^2) per coordinate, clamps into the valid offset
/// range, and reports the joint log-density at the pre-clamp values
/// (clamping is post-processing and is not reflected in the density).
GaussianSample gaussian_sample(const GaussianHeads& heads, int digits, Rng& rng);

/// Joint log-density of the given pre-clamp values. Throws DomainError on a
/// non-positive sigma.
double gaussian_log_density(const GaussianHeads& heads, const std::vector<double>& raw);

/// dlogits += coeff * d log-density / d head logits, chaining through the
/// softplus; coordinates where sigma sits on its floor get no sigma gradient.
void add_gaussian_log_density_grad(const Mat& logits, const GaussianHeads& heads,
                                   const std::vector<double>& raw, double coeff, Mat& dlogits);

}  // namespace tspmdf
