#include "tspmdf/train.hpp"

#include <algorithm>
#include <limits>
#include <utility>

#include "tspmdf/errors.hpp"
#include "tspmdf/graph.hpp"
#include "tspmdf/io.hpp"
#include "tspmdf/parallel.hpp"
#include "tspmdf/rng.hpp"

namespace tspmdf {

namespace {
// Child-stream indices under the root seed; instance coordinates and
// sampling draws must never share a stream.
constexpr std::uint64_t kInstanceStream = 0;
constexpr std::uint64_t kSampleStream = 1;

std::size_t count_samples(const std::vector<IterationRecord>& records) {
    if (records.empty()) throw UsageError("objective needs at least one record");
    std::size_t total = 0;
    for (const auto& rec : records) {
        if (rec.samples.empty())
            throw UsageError("objective needs at least one sample per record");
        total += rec.samples.size();
    }
    return total;
}

double mean_reward(const IterationRecord& rec) {
    double sum = 0.0;
    for (const auto& sample : rec.samples) sum += sample.reward;
    return sum / static_cast<double>(rec.samples.size());
}

}  // namespace

double reinforce_objective(const std::vector<IterationRecord>& records,
                           const std::vector<NodeDistributions>& dists,
                           std::vector<Mat>& dlogits) {
    const double total = static_cast<double>(count_samples(records));
    double weighted = 0.0;
    for (const auto& rec : records) {
        const NodeDistributions& d = dists.at(rec.slot);
        Mat& dl = dlogits.at(rec.slot);
        const double baseline = mean_reward(rec);
        for (const auto& sample : rec.samples) {
            const double advantage = sample.reward - baseline;
            weighted += advantage * log_prob(d, sample.mod);
            if (advantage != 0.0) add_log_prob_grad(d, sample.mod, -advantage / total, dl);
        }
    }
    return -weighted / total;
}

double reinforce_objective_continuous(const std::vector<IterationRecord>& records,
                                      const std::vector<Mat>& logits,
                                      const std::vector<GaussianHeads>& heads,
                                      std::vector<Mat>& dlogits) {
    const double total = static_cast<double>(count_samples(records));
    double weighted = 0.0;
    for (const auto& rec : records) {
        const GaussianHeads& h = heads.at(rec.slot);
        const Mat& l = logits.at(rec.slot);
        Mat& dl = dlogits.at(rec.slot);
        const double baseline = mean_reward(rec);
        for (const auto& sample : rec.samples) {
            const double advantage = sample.reward - baseline;
            weighted += advantage * gaussian_log_density(h, sample.raw);
            if (advantage != 0.0)
                add_gaussian_log_density_grad(l, h, sample.raw, -advantage / total, dl);
        }
    }
    return -weighted / total;
}

double imitation_objective(const std::vector<IterationRecord>& records,
                           const std::vector<NodeDistributions>& dists, double w_fixed,
                           double grad_scale, std::vector<Mat>& dlogits) {
    if (records.empty()) throw UsageError("objective needs at least one record");
    double sum_reduction = 0.0;
    for (const auto& rec : records) {
        if (rec.expert_reduction < 0.0)
            throw DomainError("internal invariant violated: negative expert reduction");
        sum_reduction += rec.expert_reduction;
    }
    double loss = 0.0;
    for (const auto& rec : records) {
        const double w =
            (sum_reduction > 0.0 ? rec.expert_reduction / sum_reduction : 0.0) + w_fixed;
        loss -= w * log_prob(dists.at(rec.slot), rec.expert);
        add_log_prob_grad(dists.at(rec.slot), rec.expert, -grad_scale * w,
                          dlogits.at(rec.slot));
    }
    return loss;
}

EpochMetrics train_epoch(ModelParams& params, OptimizerState& opt, const TrainConfig& config,
                         int epoch) {
    if (config.batch_size < 1) throw DomainError("batch_size must be >= 1");
    if (config.t_iters < 0) throw DomainError("t_iters must be >= 0");
    if (config.t_iters > 0 && config.samples < 1)
        throw DomainError("need at least one sample per iteration");
    if (config.digits != params.digits)
        throw StructuralError("config M=" + std::to_string(config.digits) +
                              " does not match the model's M=" + std::to_string(params.digits));
    if (config.variant.head != params.head)
        throw StructuralError("the training variant and the model disagree on the head kind");
    if (config.variant.imitation && config.variant.head != HeadKind::kCategorical)
        throw StructuralError("self-imitation needs the sign/digit head");

    const int batch = config.batch_size;
    const int sample_count = config.samples;
    const int m_digits = config.digits;
    const bool categorical = config.variant.head == HeadKind::kCategorical;
    const int threads = config.threads > 0 ? config.threads : default_thread_count();
    const Rng root(config.seed);

    std::vector<TspInstance> inst(batch);
    std::vector<std::shared_ptr<const BaseGraph>> base(batch);
    std::vector<TspInstance> star(batch);
    std::vector<double> base_len(batch), star_len(batch);
    std::vector<double> best_excl(batch, std::numeric_limits<double>::infinity());

    EpochMetrics metrics;
    metrics.epoch = epoch;
    for (int b = 0; b < batch; ++b) {
        if (config.instance_generator) {
            inst[b] = config.instance_generator(epoch, b);
        } else {
            std::uint64_t inst_seed = root.stream(kInstanceStream)
                                          .stream(static_cast<std::uint64_t>(epoch))
                                          .stream(static_cast<std::uint64_t>(b))
                                          .next_u64();
            inst[b] = generate_uniform(config.n, inst_seed);
        }
        require_valid_instance(inst[b]);
        Tour base_tour = construct(config.constructor, inst[b]);
        base_len[b] = tour_length(inst[b], base_tour);
        base[b] = build_base_graph(inst[b], effective_k(config.k, inst[b].node_count()));
        star[b] = inst[b];
        star_len[b] = base_len[b];
        metrics.mean_base_length += base_len[b] / batch;
    }
    metrics.per_iteration.reserve(static_cast<std::size_t>(config.t_iters));

    std::vector<DynamicGraph> graphs(batch);
    std::vector<Mat> logits(batch);
    std::vector<NodeDistributions> dists(categorical ? batch : 0);
    std::vector<GaussianHeads> gauss(categorical ? 0 : batch);
    std::vector<TspInstance> cand(static_cast<std::size_t>(batch) * sample_count);
    std::vector<IterationRecord> records(batch);

    for (int t = 0; t < config.t_iters; ++t) {
        // One forward per instance for sampling; the tape-recording pass is
        // deferred to the backward phase so only one tape is alive at a time.
        for (int b = 0; b < batch; ++b) {
            graphs[b] = build_dynamic_graph(base[b], star[b], inst[b], m_digits);
            logits[b] = forward(params, graphs[b], false).logits;
            if (categorical) {
                dists[b] = heads_to_distributions(logits[b], m_digits);
            } else {
                gauss[b] = gaussian_heads(logits[b]);
            }
            records[b] = IterationRecord{};
            records[b].slot = b;
            records[b].t = t;
            records[b].star_len = star_len[b];
            records[b].samples.resize(static_cast<std::size_t>(sample_count));
        }

        const Rng epoch_rng = root.stream(kSampleStream).stream(static_cast<std::uint64_t>(epoch));
        parallel_for(static_cast<std::size_t>(batch) * sample_count, threads,
                     [&](std::size_t idx) {
                         const int b = static_cast<int>(idx / sample_count);
                         const int j = static_cast<int>(idx % sample_count);
                         Rng rng = epoch_rng.stream(static_cast<std::uint64_t>(b))
                                       .stream(static_cast<std::uint64_t>(t))
                                       .stream(static_cast<std::uint64_t>(j));
                         SampleOutcome& out = records[b].samples[j];
                         const TspInstance& cand_base =
                             config.variant.refine_incumbent ? star[b] : inst[b];
                         if (categorical) {
                             out.mod = sample_modification(dists[b], rng);
                             out.log_prob = log_prob(dists[b], out.mod);
                             cand[idx] = apply_modification(cand_base, inst[b], out.mod, m_digits);
                         } else {
                             GaussianSample draw = gaussian_sample(gauss[b], m_digits, rng);
                             out.raw = std::move(draw.raw);
                             out.log_prob = draw.log_density;
                             cand[idx] = apply_delta(cand_base, inst[b], draw.delta, m_digits);
                         }
                         Tour tour = construct(config.constructor, cand[idx]);
                         out.mapped_length = evaluate_on_original(inst[b], tour);
                     });

        for (int b = 0; b < batch; ++b) {
            IterationRecord& rec = records[b];
            int best_j = 0;
            for (int j = 0; j < sample_count; ++j) {
                rec.samples[j].reward = star_len[b] - rec.samples[j].mapped_length;
                if (rec.samples[j].mapped_length < rec.samples[best_j].mapped_length) best_j = j;
            }
            const double best_len = rec.samples[best_j].mapped_length;
            best_excl[b] = std::min(best_excl[b], best_len);
            const TspInstance& expert_base =
                config.variant.refine_incumbent ? star[b] : inst[b];
            if (best_len < star_len[b]) {
                TspInstance& winner = cand[static_cast<std::size_t>(b) * sample_count + best_j];
                rec.expert_reduction = star_len[b] - best_len;
                if (categorical) rec.expert = encode_modification(expert_base, winner, m_digits);
                star[b] = std::move(winner);
                star_len[b] = best_len;
            } else {
                rec.expert_reduction = 0.0;
                if (categorical) rec.expert = encode_modification(expert_base, star[b], m_digits);
            }
        }

        std::vector<Mat> dlogits(batch);
        for (int b = 0; b < batch; ++b) dlogits[b] = Mat(logits[b].rows, logits[b].cols);
        double rl_loss = categorical
                             ? reinforce_objective(records, dists, dlogits)
                             : reinforce_objective_continuous(records, logits, gauss, dlogits);
        double il_loss = 0.0;
        if (config.variant.imitation)
            il_loss = imitation_objective(records, dists, config.w_fixed, config.lambda, dlogits);

        ModelParams grads = zeros_like(params);
        for (int b = 0; b < batch; ++b) {
            // Same params and graph as the sampling pass, so the recomputed
            // logits (and batch statistics) are bitwise identical.
            ForwardResult with_tape = forward(params, graphs[b], true);
            add_scaled(grads, backward(params, *with_tape.tape, dlogits[b]));
        }
        optimizer_step(params, opt, grads);

        IterationMetrics im;
        im.epoch = epoch;
        im.t = t;
        im.rl_loss = rl_loss;
        im.il_loss = il_loss;
        for (int b = 0; b < batch; ++b)
            im.mean_best_reduction += (base_len[b] - best_excl[b]) / batch;
        metrics.per_iteration.push_back(im);
    }
    return metrics;
}

}  // namespace tspmdf
