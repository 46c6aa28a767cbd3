#include "tspmdf/infer.hpp"

#include <limits>
#include <utility>

#include "tspmdf/errors.hpp"
#include "tspmdf/graph.hpp"
#include "tspmdf/local_search.hpp"
#include "tspmdf/parallel.hpp"
#include "tspmdf/policy.hpp"
#include "tspmdf/rng.hpp"

namespace tspmdf {

namespace {

struct Candidate {
    TspInstance inst;
    Tour tour;
    double length = 0.0;
};

// Uniform sign and digits, same draw order as sample_modification so the two
// samplers are drop-in replacements for each other.
Modification uniform_modification(int n, int digits, Rng& rng) {
    Modification mod;
    mod.dx.resize(n);
    mod.dy.resize(n);
    mod.delta.resize(2 * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int dim = 0; dim < 2; ++dim) {
            OffsetCode code;
            code.sign = rng.next_below(2) == 0 ? -1 : +1;
            code.digits.resize(digits);
            for (int m = 0; m < digits; ++m) code.digits[m] = static_cast<int>(rng.next_below(10));
            if (code.is_zero()) code.sign = +1;
            mod.delta[2 * static_cast<std::size_t>(i) + dim] = decode(code);
            (dim == 0 ? mod.dx : mod.dy)[i] = std::move(code);
        }
    }
    return mod;
}

void require_solve_config(const SolveConfig& config) {
    if (config.t_iters < 0) throw DomainError("t_iters must be >= 0");
    if (config.t_iters > 0 && config.samples < 1)
        throw DomainError("need at least one sample per iteration");
    if (config.digits < 1 || config.digits > kMaxPrecision)
        throw DomainError("digits must be in 1.." + std::to_string(kMaxPrecision));
}

SolveResult pipeline(const TspInstance& inst, const ModelParams* params,
                     const SolveConfig& config) {
    require_valid_instance(inst);
    require_solve_config(config);
    if (params) {
        if (params->digits != config.digits)
            throw StructuralError("checkpoint was trained with M=" +
                                  std::to_string(params->digits) + ", config asks for M=" +
                                  std::to_string(config.digits));
    }
    const int n = inst.node_count();
    const int threads = config.threads > 0 ? config.threads : default_thread_count();

    SolveResult res;
    res.best_tour = construct(config.constructor, inst);
    res.base_length = tour_length(inst, res.best_tour);
    res.best_length = res.base_length;
    res.best_excluding_base = std::numeric_limits<double>::infinity();
    res.trace.reserve(static_cast<std::size_t>(config.t_iters) + 1);
    res.trace.push_back(res.base_length);

    std::shared_ptr<const BaseGraph> base;
    if (params && config.t_iters > 0) base = build_base_graph(inst, effective_k(config.k, n));

    TspInstance s_star = inst;
    double star_len = res.base_length;
    Rng root(config.seed);
    std::vector<Candidate> cands(static_cast<std::size_t>(config.samples));

    const bool gaussian = params && params->head == HeadKind::kGaussian;

    for (int t = 0; t < config.t_iters; ++t) {
        NodeDistributions dists;
        GaussianHeads gauss;
        if (params) {
            DynamicGraph g = build_dynamic_graph(base, s_star, inst, config.digits);
            Mat logits = forward(*params, g, false).logits;
            if (gaussian) {
                gauss = gaussian_heads(logits);
            } else {
                dists = heads_to_distributions(logits, config.digits);
            }
        }
        const Rng iter_rng = root.stream(static_cast<std::uint64_t>(t));
        parallel_for(static_cast<std::size_t>(config.samples), threads, [&](std::size_t j) {
            Rng rj = iter_rng.stream(j);
            Candidate& cand = cands[j];
            if (gaussian) {
                GaussianSample draw = gaussian_sample(gauss, config.digits, rj);
                cand.inst = apply_delta(s_star, inst, draw.delta, config.digits);
            } else {
                Modification mod = params ? sample_modification(dists, rj)
                                          : uniform_modification(n, config.digits, rj);
                cand.inst = apply_modification(s_star, inst, mod, config.digits);
            }
            cand.tour = construct(config.constructor, cand.inst);
            cand.length = evaluate_on_original(inst, cand.tour);
        });

        std::size_t best_j = 0;
        for (std::size_t j = 1; j < cands.size(); ++j)
            if (cands[j].length < cands[best_j].length) best_j = j;
        Candidate& win = cands[best_j];
        if (win.length < res.best_excluding_base) res.best_excluding_base = win.length;
        if (win.length < res.best_length) {
            res.best_length = win.length;
            res.best_tour = win.tour;
        }
        if (win.length < star_len) {
            star_len = win.length;
            s_star = std::move(win.inst);
        }
        res.trace.push_back(res.best_length);
    }

    if (config.run_two_opt) {
        res.best_tour = two_opt(inst, res.best_tour);
        res.best_length = tour_length(inst, res.best_tour);
    }
    return res;
}

}  // namespace

SolveResult mdf_solve(const TspInstance& inst, const ModelParams& params,
                      const SolveConfig& config) {
    return pipeline(inst, &params, config);
}

SolveResult random_modifier_solve(const TspInstance& inst, const SolveConfig& config) {
    return pipeline(inst, nullptr, config);
}

}  // namespace tspmdf
