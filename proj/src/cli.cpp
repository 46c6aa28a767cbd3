#include "tspmdf/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tspmdf/agnn.hpp"
#include "tspmdf/constructors.hpp"
#include "tspmdf/errors.hpp"
#include "tspmdf/infer.hpp"
#include "tspmdf/io.hpp"
#include "tspmdf/parallel.hpp"
#include "tspmdf/rng.hpp"
#include "tspmdf/train.hpp"

namespace tspmdf {

namespace {

using nlohmann::json;

// Per-instance solve seeds in `ablate` come from stream 2 of the main seed;
// streams 0 and 1 belong to training (instances, sampling).
constexpr std::uint64_t kSolveStream = 2;

const std::map<std::string, ConstructorKind> kConstructorNames = {
    {"nearest", ConstructorKind::kNearest},
    {"farthest", ConstructorKind::kFarthest},
};

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    return out;
}

struct TrainOpts {
    TrainConfig cfg;
    int epochs = 30;
    int hidden = 32;
    int layers = 12;
    double lr = 1e-3;
    double weight_decay = 0.01;
    std::string out;
    std::string metrics;
};

// Shared by train and ablate: epochs of train_epoch with a progress line per
// epoch and an optional JSONL metrics log.
void run_training(ModelParams& params, OptimizerState& opt, const TrainConfig& cfg, int epochs,
                  const std::string& metrics_path) {
    std::ofstream metrics;
    if (!metrics_path.empty()) metrics = open_out(metrics_path);
    for (int epoch = 0; epoch < epochs; ++epoch) {
        EpochMetrics em = train_epoch(params, opt, cfg, epoch);
        double last_reduction = 0.0, last_rl = 0.0, last_il = 0.0;
        if (!em.per_iteration.empty()) {
            const IterationMetrics& last = em.per_iteration.back();
            last_reduction = last.mean_best_reduction;
            last_rl = last.rl_loss;
            last_il = last.il_loss;
        }
        std::fprintf(stderr,
                     "epoch %d/%d  base %.4f  best-reduction %.4f  rl %.4f  il %.4f\n",
                     epoch + 1, epochs, em.mean_base_length, last_reduction, last_rl, last_il);
        if (metrics.is_open()) {
            json rec;
            rec["epoch"] = em.epoch;
            rec["mean_base_length"] = em.mean_base_length;
            json iters = json::array();
            for (const IterationMetrics& im : em.per_iteration) {
                iters.push_back({{"t", im.t},
                                 {"mean_best_reduction", im.mean_best_reduction},
                                 {"rl_loss", im.rl_loss},
                                 {"il_loss", im.il_loss}});
            }
            rec["iterations"] = std::move(iters);
            metrics << rec.dump() << "\n";
            metrics.flush();
        }
    }
}

int cmd_generate(int n, int count, std::uint64_t seed, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    for (int i = 0; i < count; ++i) {
        TspInstance inst = generate_uniform(n, seed, static_cast<std::uint64_t>(i));
        write_tsplib_file(inst,
                          (std::filesystem::path(out_dir) / (inst.name + ".tsp")).string());
    }
    std::cout << "wrote " << count << " instances to " << out_dir << "\n";
    return 0;
}

int cmd_train(const TrainOpts& o) {
    ModelParams params =
        init_model(o.hidden, o.layers, o.cfg.digits, o.cfg.variant.head, o.cfg.seed);
    OptimizerState opt = init_optimizer(params, o.lr, o.weight_decay);
    run_training(params, opt, o.cfg, o.epochs, o.metrics);
    save_checkpoint(o.out, params, opt, o.cfg.k);
    std::cout << "saved checkpoint to " << o.out << "\n";
    return 0;
}

json solve_record(const TspInstance& inst, const SolveResult& res, double seconds,
                  bool tsplib_rounding, ConstructorKind constructor) {
    json rec;
    rec["instance"] = inst.name;
    rec["n"] = inst.node_count();
    rec["base_length"] = res.base_length;
    rec["mdf_best_length"] = res.best_length;
    if (std::isfinite(res.best_excluding_base)) {
        rec["best_excluding_base"] = res.best_excluding_base;
    } else {
        rec["best_excluding_base"] = nullptr;
    }
    rec["trace"] = res.trace;
    rec["seconds"] = seconds;
    if (tsplib_rounding) {
        Tour base_tour = construct(constructor, inst);
        rec["base_length_rounded"] = tour_length_rounded(inst, base_tour);
        rec["mdf_best_length_rounded"] = tour_length_rounded(inst, res.best_tour);
    }
    return rec;
}

// Solves every instance (in parallel), then writes one record per instance in
// input order plus a summary record with the means.
void write_report(const std::string& path, const std::vector<TspInstance>& insts,
                  const ModelParams* params, SolveConfig cfg, int threads, bool no_timing,
                  bool tsplib_rounding, const Rng& solve_seeds) {
    const std::size_t count = insts.size();
    std::vector<json> rows(count);
    cfg.threads = 1;  // parallelism lives at the instance level here
    parallel_for(count, threads, [&](std::size_t i) {
        SolveConfig c = cfg;
        c.seed = solve_seeds.stream(i).next_u64();
        auto t0 = std::chrono::steady_clock::now();
        SolveResult res =
            params ? mdf_solve(insts[i], *params, c) : random_modifier_solve(insts[i], c);
        double seconds =
            no_timing ? 0.0 : std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                  .count();
        rows[i] = solve_record(insts[i], res, seconds, tsplib_rounding, c.constructor);
    });

    std::ofstream out = open_out(path);
    double base_sum = 0.0, best_sum = 0.0, excl_sum = 0.0, sec_sum = 0.0;
    bool all_excl_finite = true;
    for (const json& rec : rows) {
        out << rec.dump() << "\n";
        base_sum += rec["base_length"].get<double>();
        best_sum += rec["mdf_best_length"].get<double>();
        if (rec["best_excluding_base"].is_null()) {
            all_excl_finite = false;
        } else {
            excl_sum += rec["best_excluding_base"].get<double>();
        }
        sec_sum += rec["seconds"].get<double>();
    }
    json summary;
    summary["summary"] = true;
    summary["count"] = count;
    summary["mean_base_length"] = base_sum / count;
    summary["mean_mdf_best_length"] = best_sum / count;
    if (all_excl_finite) {
        summary["mean_best_excluding_base"] = excl_sum / count;
    } else {
        summary["mean_best_excluding_base"] = nullptr;
    }
    summary["mean_reduction_fraction"] = (base_sum - best_sum) / base_sum;
    summary["mean_seconds"] = sec_sum / count;
    out << summary.dump() << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Insertion-heuristic TSP solver with learned instance modification"};
    app.require_subcommand(1);

    // generate
    int gen_n = 500, gen_count = 128;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    CLI::App* generate = app.add_subcommand("generate", "Write uniform instances as TSPLib files");
    generate->add_option("--n", gen_n, "nodes per instance")->capture_default_str();
    generate->add_option("--count", gen_count, "number of instances")->capture_default_str();
    generate->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
    generate->add_option("--out", gen_out, "output directory")->required();

    // train
    TrainOpts tr;
    CLI::App* train = app.add_subcommand("train", "Train the modification policy");
    train->add_option("--n", tr.cfg.n, "nodes per training instance")->capture_default_str();
    int tr_epochs = 30;
    train->add_option("--epochs", tr_epochs, "training epochs")->capture_default_str();
    train->add_option("--batch", tr.cfg.batch_size, "instances per epoch")->capture_default_str();
    train->add_option("--t-iters", tr.cfg.t_iters, "modification iterations per instance")
        ->capture_default_str();
    train->add_option("--samples", tr.cfg.samples, "modifications sampled per iteration")
        ->capture_default_str();
    train->add_option("--m-digits", tr.cfg.digits, "offset digits M")->capture_default_str();
    train->add_option("--lambda", tr.cfg.lambda, "imitation loss weight")->capture_default_str();
    train->add_option("--w-fixed", tr.cfg.w_fixed, "fixed imitation weight per record")
        ->capture_default_str();
    train->add_option("--constructor", tr.cfg.constructor, "base tour constructor")
        ->transform(CLI::CheckedTransformer(kConstructorNames))
        ->default_str("farthest");
    train->add_option("--seed", tr.cfg.seed, "training seed")->capture_default_str();
    train->add_option("--k", tr.cfg.k, "graph out-degree")->capture_default_str();
    train->add_option("--hidden", tr.hidden, "embedding width")->capture_default_str();
    train->add_option("--layers", tr.layers, "message-passing layers")->capture_default_str();
    train->add_option("--lr", tr.lr, "learning rate")->capture_default_str();
    train->add_option("--weight-decay", tr.weight_decay, "decoupled weight decay")
        ->capture_default_str();
    train->add_option("--threads", tr.cfg.threads, "worker threads, 0 = all cores")
        ->capture_default_str();
    train->add_option("--out", tr.out, "checkpoint file to write")->required();
    train->add_option("--metrics", tr.metrics, "JSONL metrics log");

    // solve
    std::string so_instance, so_ckpt, so_out;
    SolveConfig so_cfg;
    CLI::App* solve = app.add_subcommand("solve", "Solve one TSPLib instance");
    solve->add_option("--instance", so_instance, "TSPLib file")->required();
    solve->add_option("--ckpt", so_ckpt,
                      "checkpoint; without it only the base constructor runs (t-iters 0)");
    solve->add_option("--t-iters", so_cfg.t_iters, "modification iterations")
        ->capture_default_str();
    solve->add_option("--samples", so_cfg.samples, "modifications sampled per iteration")
        ->capture_default_str();
    solve->add_option("--constructor", so_cfg.constructor, "base tour constructor")
        ->transform(CLI::CheckedTransformer(kConstructorNames))
        ->default_str("farthest");
    solve->add_flag("--two-opt", so_cfg.run_two_opt, "2-opt refine the final tour");
    solve->add_option("--seed", so_cfg.seed, "sampling seed")->capture_default_str();
    solve->add_option("--threads", so_cfg.threads, "worker threads, 0 = all cores")
        ->capture_default_str();
    solve->add_option("--out", so_out, "write the result JSON here instead of stdout");

    // eval
    std::string ev_dir, ev_ckpt, ev_report;
    SolveConfig ev_cfg;
    std::uint64_t ev_seed = 0;
    int ev_threads = 0;
    bool ev_no_timing = false, ev_rounding = false, ev_two_opt = false;
    CLI::App* eval = app.add_subcommand("eval", "Solve every .tsp file in a directory");
    eval->add_option("--dir", ev_dir, "directory of TSPLib files")->required();
    eval->add_option("--ckpt", ev_ckpt,
                     "checkpoint; without it only the base constructor runs (t-iters 0)");
    eval->add_option("--t-iters", ev_cfg.t_iters, "modification iterations")
        ->capture_default_str();
    eval->add_option("--samples", ev_cfg.samples, "modifications sampled per iteration")
        ->capture_default_str();
    eval->add_option("--constructor", ev_cfg.constructor, "base tour constructor")
        ->transform(CLI::CheckedTransformer(kConstructorNames))
        ->default_str("farthest");
    eval->add_flag("--two-opt", ev_two_opt, "2-opt refine each final tour");
    eval->add_option("--seed", ev_seed, "root sampling seed (instance i uses stream i)")
        ->capture_default_str();
    eval->add_option("--threads", ev_threads, "instances solved concurrently, 0 = all cores")
        ->capture_default_str();
    eval->add_flag("--no-timing", ev_no_timing, "write 0.0 seconds, for reproducible reports");
    eval->add_flag("--tsplib-rounding", ev_rounding,
                   "also report lengths under the TSPLib integer-rounding convention");
    eval->add_option("--report", ev_report, "JSONL report file")->required();

    // ablate
    std::string ab_mode, ab_report, ab_out, ab_metrics;
    TrainOpts ab;
    ab.cfg.n = 500;
    int ab_eval_count = 64, ab_eval_samples = 100, ab_eval_threads = 0;
    std::uint64_t ab_eval_seed = 1;
    bool ab_no_timing = false;
    CLI::App* ablate = app.add_subcommand(
        "ablate", "Train one pipeline variant, then evaluate it on held-out instances");
    ablate->add_option("--mode", ab_mode, "random | basic | discrete | full")
        ->required()
        ->check(CLI::IsMember({"random", "basic", "discrete", "full"}));
    ablate->add_option("--n", ab.cfg.n, "nodes per instance")->capture_default_str();
    ablate->add_option("--epochs", ab.epochs, "training epochs")->capture_default_str();
    ablate->add_option("--batch", ab.cfg.batch_size, "instances per epoch")
        ->capture_default_str();
    ablate->add_option("--t-iters", ab.cfg.t_iters, "modification iterations")
        ->capture_default_str();
    ablate->add_option("--samples", ab.cfg.samples, "training samples per iteration")
        ->capture_default_str();
    ablate->add_option("--m-digits", ab.cfg.digits, "offset digits M")->capture_default_str();
    ablate->add_option("--lambda", ab.cfg.lambda, "imitation loss weight")
        ->capture_default_str();
    ablate->add_option("--w-fixed", ab.cfg.w_fixed, "fixed imitation weight per record")
        ->capture_default_str();
    ablate->add_option("--constructor", ab.cfg.constructor, "base tour constructor")
        ->transform(CLI::CheckedTransformer(kConstructorNames))
        ->default_str("farthest");
    ablate->add_option("--seed", ab.cfg.seed, "training and solving seed")
        ->capture_default_str();
    ablate->add_option("--k", ab.cfg.k, "graph out-degree")->capture_default_str();
    ablate->add_option("--hidden", ab.hidden, "embedding width")->capture_default_str();
    ablate->add_option("--layers", ab.layers, "message-passing layers")->capture_default_str();
    ablate->add_option("--lr", ab.lr, "learning rate")->capture_default_str();
    ablate->add_option("--weight-decay", ab.weight_decay, "decoupled weight decay")
        ->capture_default_str();
    ablate->add_option("--threads", ab.cfg.threads, "worker threads, 0 = all cores")
        ->capture_default_str();
    ablate->add_option("--eval-count", ab_eval_count, "held-out instances")
        ->capture_default_str();
    ablate->add_option("--eval-samples", ab_eval_samples, "samples per iteration when evaluating")
        ->capture_default_str();
    ablate->add_option("--eval-seed", ab_eval_seed, "seed of the held-out instance set")
        ->capture_default_str();
    ablate->add_flag("--no-timing", ab_no_timing, "write 0.0 seconds, for reproducible reports");
    ablate->add_option("--report", ab_report, "JSONL report file")->required();
    ablate->add_option("--out", ab_out, "also save the trained checkpoint here");
    ablate->add_option("--metrics", ab_metrics, "JSONL training metrics log");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (generate->parsed()) return cmd_generate(gen_n, gen_count, gen_seed, gen_out);

        if (train->parsed()) {
            tr.epochs = tr_epochs;
            return cmd_train(tr);
        }

        if (solve->parsed()) {
            TspInstance inst = read_tsplib_file(so_instance);
            SolveResult res;
            if (so_ckpt.empty()) {
                so_cfg.t_iters = 0;
                res = random_modifier_solve(inst, so_cfg);
            } else {
                LoadedCheckpoint ck = load_checkpoint(so_ckpt);
                so_cfg.digits = ck.params.digits;
                so_cfg.k = ck.k;
                res = mdf_solve(inst, ck.params, so_cfg);
            }
            json rec = solve_record(inst, res, 0.0, false, so_cfg.constructor);
            rec.erase("seconds");
            rec["tour"] = res.best_tour.perm;
            if (so_out.empty()) {
                std::cout << rec.dump(2) << "\n";
            } else {
                open_out(so_out) << rec.dump(2) << "\n";
            }
            return 0;
        }

        if (eval->parsed()) {
            std::vector<std::string> files;
            for (const auto& entry : std::filesystem::directory_iterator(ev_dir))
                if (entry.is_regular_file() && entry.path().extension() == ".tsp")
                    files.push_back(entry.path().string());
            std::sort(files.begin(), files.end());
            if (files.empty()) throw UsageError("no .tsp files in " + ev_dir);
            std::vector<TspInstance> insts(files.size());
            for (std::size_t i = 0; i < files.size(); ++i) insts[i] = read_tsplib_file(files[i]);

            std::optional<LoadedCheckpoint> ck;
            if (!ev_ckpt.empty()) {
                ck = load_checkpoint(ev_ckpt);
                ev_cfg.digits = ck->params.digits;
                ev_cfg.k = ck->k;
            } else {
                ev_cfg.t_iters = 0;
            }
            ev_cfg.run_two_opt = ev_two_opt;
            int threads = ev_threads > 0 ? ev_threads : default_thread_count();
            write_report(ev_report, insts, ck ? &ck->params : nullptr, ev_cfg, threads,
                         ev_no_timing, ev_rounding, Rng(ev_seed));
            std::cout << "wrote " << insts.size() << " records to " << ev_report << "\n";
            return 0;
        }

        // ablate
        ab.cfg.variant = ab_mode == "basic"      ? TrainVariant::continuous()
                         : ab_mode == "discrete" ? TrainVariant::no_imitation()
                                                 : TrainVariant::full();
        std::optional<ModelParams> params;
        if (ab_mode != "random") {
            params = init_model(ab.hidden, ab.layers, ab.cfg.digits, ab.cfg.variant.head,
                                ab.cfg.seed);
            OptimizerState opt = init_optimizer(*params, ab.lr, ab.weight_decay);
            run_training(*params, opt, ab.cfg, ab.epochs, ab_metrics);
            if (!ab_out.empty()) save_checkpoint(ab_out, *params, opt, ab.cfg.k);
        }
        std::vector<TspInstance> insts(static_cast<std::size_t>(ab_eval_count));
        for (int i = 0; i < ab_eval_count; ++i)
            insts[i] = generate_uniform(ab.cfg.n, ab_eval_seed, static_cast<std::uint64_t>(i));
        SolveConfig cfg;
        cfg.t_iters = ab.cfg.t_iters;
        cfg.samples = ab_eval_samples;
        cfg.digits = ab.cfg.digits;
        cfg.constructor = ab.cfg.constructor;
        cfg.k = ab.cfg.k;
        int threads = ab.cfg.threads > 0 ? ab.cfg.threads : default_thread_count();
        write_report(ab_report, insts, params ? &*params : nullptr, cfg, threads, ab_no_timing,
                     false, Rng(ab.cfg.seed).stream(kSolveStream));
        std::cout << "wrote " << insts.size() << " records to " << ab_report << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace tspmdf
