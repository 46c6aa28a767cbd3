#include "tspmdf/policy.hpp"

#include <algorithm>
#include <cmath>

#include "tspmdf/errors.hpp"

namespace tspmdf {

namespace {

constexpr double kSigmaFloor = 1e-3;
constexpr double kLogTwoPi = 1.8378770664093454836;

inline int dim_base(int digits, int dim) { return dim * (10 * digits + 2); }

void softmax_block(const double* in, double* out, int count) {
    double mx = in[0];
    for (int i = 1; i < count; ++i) mx = std::max(mx, in[i]);
    double sum = 0.0;
    for (int i = 0; i < count; ++i) {
        out[i] = std::exp(in[i] - mx);
        sum += out[i];
    }
    for (int i = 0; i < count; ++i) out[i] /= sum;
}

void require_mod_shape(const NodeDistributions& dists, const Modification& mod) {
    if (mod.node_count() != dists.node_count() ||
        static_cast<int>(mod.dy.size()) != dists.node_count())
        throw StructuralError("modification covers a different node count than the heads");
    for (int i = 0; i < mod.node_count(); ++i)
        if (mod.dx[i].precision() != dists.digits || mod.dy[i].precision() != dists.digits)
            throw StructuralError("modification precision does not match the heads");
}

// Scores (or differentiates) one code against one dimension's blocks.
template <class SignFn, class DigitFn>
void walk_code(const OffsetCode& code, int digits, int base, SignFn&& on_sign,
               DigitFn&& on_digit) {
    require_valid_code(code);
    if (code.is_zero() && code.sign != +1)
        throw DomainError("non-canonical zero code: all-zero digits must carry sign +1");
    on_sign(base, code.sign == -1 ? 0 : 1);
    for (int m = 0; m < digits; ++m) on_digit(base + 2 + 10 * m, code.digits[m]);
}

inline double softplus(double x) {
    if (x > 30.0) return x;
    return std::log1p(std::exp(x));
}

void require_raw_shape(const GaussianHeads& heads, const std::vector<double>& raw) {
    if (static_cast<int>(raw.size()) != 2 * heads.mu.rows)
        throw StructuralError("pre-clamp sample count does not match the heads");
}

}  // namespace

NodeDistributions heads_to_distributions(const Mat& logits, int digits) {
    const int width = 2 * (10 * digits + 2);
    if (digits < 1 || logits.cols != width)
        throw StructuralError("head width " + std::to_string(logits.cols) +
                              " does not match M=" + std::to_string(digits) + " (expected " +
                              std::to_string(width) + ")");
    NodeDistributions dists;
    dists.digits = digits;
    dists.probs = Mat(logits.rows, width);
    for (int i = 0; i < logits.rows; ++i) {
        const double* in = logits.row(i);
        double* out = dists.probs.row(i);
        for (int dim = 0; dim < 2; ++dim) {
            const int base = dim_base(digits, dim);
            softmax_block(in + base, out + base, 2);
            for (int m = 0; m < digits; ++m)
                softmax_block(in + base + 2 + 10 * m, out + base + 2 + 10 * m, 10);
        }
    }
    return dists;
}

Modification sample_modification(const NodeDistributions& dists, Rng& rng) {
    const int n = dists.node_count();
    const int digits = dists.digits;
    Modification mod;
    mod.dx.resize(n);
    mod.dy.resize(n);
    mod.delta.resize(2 * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double* row = dists.probs.row(i);
        for (int dim = 0; dim < 2; ++dim) {
            const int base = dim_base(digits, dim);
            OffsetCode code;
            code.sign = rng.pick_categorical(row + base, 2) == 0 ? -1 : +1;
            code.digits.resize(digits);
            for (int m = 0; m < digits; ++m)
                code.digits[m] = rng.pick_categorical(row + base + 2 + 10 * m, 10);
            if (code.is_zero()) code.sign = +1;
            mod.delta[2 * static_cast<std::size_t>(i) + dim] = decode(code);
            (dim == 0 ? mod.dx : mod.dy)[i] = std::move(code);
        }
    }
    return mod;
}

Modification zero_modification(int node_count, int digits) {
    Modification mod;
    OffsetCode zero;
    zero.digits.assign(digits, 0);
    mod.dx.assign(node_count, zero);
    mod.dy.assign(node_count, zero);
    mod.delta.assign(2 * static_cast<std::size_t>(node_count), 0.0);
    return mod;
}

Modification encode_modification(const TspInstance& from, const TspInstance& to, int digits) {
    if (from.node_count() != to.node_count())
        throw StructuralError("cannot encode a step between different-size instances");
    const int n = from.node_count();
    Modification mod;
    mod.dx.resize(n);
    mod.dy.resize(n);
    mod.delta.resize(2 * static_cast<std::size_t>(n));
    for (std::size_t c = 0; c < mod.delta.size(); ++c) {
        OffsetCode code = encode(to.xy[c] - from.xy[c], digits);
        mod.delta[c] = decode(code);
        (c % 2 == 0 ? mod.dx : mod.dy)[c / 2] = std::move(code);
    }
    return mod;
}

double log_prob(const NodeDistributions& dists, const Modification& mod) {
    require_mod_shape(dists, mod);
    double total = 0.0;
    for (int i = 0; i < mod.node_count(); ++i) {
        const double* row = dists.probs.row(i);
        for (int dim = 0; dim < 2; ++dim) {
            walk_code(dim == 0 ? mod.dx[i] : mod.dy[i], dists.digits, dim_base(dists.digits, dim),
                      [&](int base, int pick) { total += std::log(row[base + pick]); },
                      [&](int base, int pick) { total += std::log(row[base + pick]); });
        }
    }
    return total;
}

void add_log_prob_grad(const NodeDistributions& dists, const Modification& mod, double coeff,
                       Mat& dlogits) {
    require_mod_shape(dists, mod);
    if (!dlogits.same_shape(dists.probs))
        throw StructuralError("gradient buffer shape does not match the heads");
    auto add_block = [&](const double* row, double* drow, int base, int count, int pick) {
        for (int j = 0; j < count; ++j)
            drow[base + j] += coeff * ((j == pick ? 1.0 : 0.0) - row[base + j]);
    };
    for (int i = 0; i < mod.node_count(); ++i) {
        const double* row = dists.probs.row(i);
        double* drow = dlogits.row(i);
        for (int dim = 0; dim < 2; ++dim) {
            walk_code(dim == 0 ? mod.dx[i] : mod.dy[i], dists.digits, dim_base(dists.digits, dim),
                      [&](int base, int pick) { add_block(row, drow, base, 2, pick); },
                      [&](int base, int pick) { add_block(row, drow, base, 10, pick); });
        }
    }
}

TspInstance apply_modification(const TspInstance& s_star, const TspInstance& s,
                               const Modification& mod, int digits) {
    if (mod.node_count() != s.node_count())
        throw StructuralError("apply_modification: instance/modification sizes differ");
    return apply_delta(s_star, s, mod.delta, digits);
}

TspInstance apply_delta(const TspInstance& s_star, const TspInstance& s,
                        const std::vector<double>& delta, int digits) {
    if (s_star.node_count() != s.node_count() || delta.size() != s.xy.size())
        throw StructuralError("apply_delta: instance/offset sizes differ");
    const double bound = offset_bound(digits);
    TspInstance out = s_star;
    for (std::size_t c = 0; c < out.xy.size(); ++c) {
        // v = v* + offset, rewritten through s only when the cumulative
        // offset must be clamped; a zero delta is then the exact identity.
        double v = s_star.xy[c] + delta[c];
        double total = v - s.xy[c];
        if (total > bound) {
            v = s.xy[c] + bound;
        } else if (total < -bound) {
            v = s.xy[c] - bound;
        }
        out.xy[c] = v;
    }
    return out;
}

GaussianHeads gaussian_heads(const Mat& logits) {
    if (logits.cols != 4)
        throw StructuralError("continuous head expects 4 outputs per node, got " +
                              std::to_string(logits.cols));
    GaussianHeads heads;
    heads.mu = Mat(logits.rows, 2);
    heads.sigma = Mat(logits.rows, 2);
    for (int i = 0; i < logits.rows; ++i) {
        for (int dim = 0; dim < 2; ++dim) {
            heads.mu(i, dim) = logits(i, 2 * dim);
            heads.sigma(i, dim) = std::max(softplus(logits(i, 2 * dim + 1)), kSigmaFloor);
        }
    }
    return heads;
}

GaussianSample gaussian_sample(const GaussianHeads& heads, int digits, Rng& rng) {
    const int n = heads.mu.rows;
    const double bound = offset_bound(digits);
    GaussianSample out;
    out.raw.resize(2 * static_cast<std::size_t>(n));
    out.delta.resize(2 * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int dim = 0; dim < 2; ++dim) {
            double draw = heads.mu(i, dim) + heads.sigma(i, dim) * rng.next_gaussian();
            out.raw[2 * static_cast<std::size_t>(i) + dim] = draw;
            out.delta[2 * static_cast<std::size_t>(i) + dim] = std::clamp(draw, -bound, bound);
        }
    }
    out.log_density = gaussian_log_density(heads, out.raw);
    return out;
}

double gaussian_log_density(const GaussianHeads& heads, const std::vector<double>& raw) {
    require_raw_shape(heads, raw);
    double total = 0.0;
    for (int i = 0; i < heads.mu.rows; ++i) {
        for (int dim = 0; dim < 2; ++dim) {
            double sigma = heads.sigma(i, dim);
            if (!(sigma > 0.0)) throw DomainError("gaussian head sigma must be positive");
            double z = (raw[2 * static_cast<std::size_t>(i) + dim] - heads.mu(i, dim)) / sigma;
            total += -0.5 * kLogTwoPi - std::log(sigma) - 0.5 * z * z;
        }
    }
    return total;
}

void add_gaussian_log_density_grad(const Mat& logits, const GaussianHeads& heads,
                                   const std::vector<double>& raw, double coeff, Mat& dlogits) {
    require_raw_shape(heads, raw);
    if (!dlogits.same_shape(logits))
        throw StructuralError("gradient buffer shape does not match the head logits");
    for (int i = 0; i < heads.mu.rows; ++i) {
        for (int dim = 0; dim < 2; ++dim) {
            double mu = heads.mu(i, dim);
            double sigma = heads.sigma(i, dim);
            double x = raw[2 * static_cast<std::size_t>(i) + dim];
            double diff = x - mu;
            dlogits(i, 2 * dim) += coeff * diff / (sigma * sigma);
            double raw_sigma = logits(i, 2 * dim + 1);
            if (softplus(raw_sigma) > kSigmaFloor) {
                double dsigma = diff * diff / (sigma * sigma * sigma) - 1.0 / sigma;
                double dsoftplus = 1.0 / (1.0 + std::exp(-raw_sigma));
                dlogits(i, 2 * dim + 1) += coeff * dsigma * dsoftplus;
            }
        }
    }
}

}  // namespace tspmdf
