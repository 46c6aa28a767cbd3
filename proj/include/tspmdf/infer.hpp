#pragma once

#include <cstdint>
#include <vector>

#include "tspmdf/agnn.hpp"
#include "tspmdf/constructors.hpp"
#include "tspmdf/core.hpp"

namespace tspmdf {

struct SolveConfig {
    int t_iters = 30;
    int samples = 100;  // modifications sampled per iteration
    int digits = 4;     // M; must match the checkpoint for mdf_solve
    ConstructorKind constructor = ConstructorKind::kFarthest;
    std::uint64_t seed = 0;
    bool run_two_opt = false;
    int k = 50;      // base-graph out-degree (capped at n-1)
    int threads = 0;  // 0 = one per available core
};

struct SolveResult {
    Tour best_tour;            // best tour on the original instance ever seen
    double best_length = 0.0;  // its length, after the optional 2-opt refinement
    double base_length = 0.0;  // the constructor's tour on the unmodified instance
    // Best mapped-back length among modified candidates only (infinite when
    // t_iters or samples is 0, since then nothing was sampled).
    double best_excluding_base = 0.0;
    // t_iters+1 best-so-far lengths: trace[0] is base_length, trace[t] the
    // best after t iterations, all before refinement. Non-increasing.
    std::vector<double> trace;
};

/// The full guided-sampling pipeline: per iteration, one forward pass on the
/// incumbent's graph, samples_per_iter sampled modifications applied to the
/// incumbent, constructor runs on every candidate (parallel), mapped-back
/// lengths decide the next incumbent (strict improvement keeps ties with the
/// incumbent). The best tour includes the base constructor's, so the result
/// never loses to the plain constructor. Only that final best tour is 2-opt
/// refined when run_two_opt is set.
SolveResult mdf_solve(const TspInstance& inst, const ModelParams& params,
                      const SolveConfig& config);

/// Same pipeline with every sign and digit drawn uniformly instead of from
/// the model; the no-guidance baseline.
SolveResult random_modifier_solve(const TspInstance& inst, const SolveConfig& config);

}  // namespace tspmdf
