// Acceptance harness: one criterion per command-line argument (1..9), all of
// them when invoked bare. Prints one "criterion N: PASS/FAIL" line each and
// exits with the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tspmdf/agnn.hpp"
#include "tspmdf/cli.hpp"
#include "tspmdf/constructors.hpp"
#include "tspmdf/core.hpp"
#include "tspmdf/errors.hpp"
#include "tspmdf/graph.hpp"
#include "tspmdf/infer.hpp"
#include "tspmdf/io.hpp"
#include "tspmdf/local_search.hpp"
#include "tspmdf/offset_codec.hpp"
#include "tspmdf/parallel.hpp"
#include "tspmdf/policy.hpp"
#include "tspmdf/rng.hpp"
#include "tspmdf/train.hpp"

using namespace tspmdf;
namespace fs = std::filesystem;

namespace {

using Outcome = std::pair<bool, std::string>;

std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

// Independent length recomputation: different accumulation and distance
// routine than tour_length.
double naive_length(const TspInstance& inst, const Tour& tour) {
    const std::size_t n = tour.perm.size();
    long double sum = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        int a = tour.perm[i], b = tour.perm[(i + 1) % n];
        sum += hypotl(static_cast<long double>(inst.x(a)) - inst.x(b),
                      static_cast<long double>(inst.y(a)) - inst.y(b));
    }
    return static_cast<double>(sum);
}

bool has_improving_exchange(const TspInstance& inst, const Tour& tour, double eps = 1e-9) {
    const int n = static_cast<int>(tour.perm.size());
    for (int i = 0; i < n - 1; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            int a = tour.perm[i], b = tour.perm[(i + 1) % n];
            int c = tour.perm[j], d = tour.perm[(j + 1) % n];
            double before = point_distance(inst, a, b) + point_distance(inst, c, d);
            double after = point_distance(inst, a, c) + point_distance(inst, b, d);
            if (after < before - eps) return true;
        }
    }
    return false;
}

fs::path scratch_dir() {
    fs::path dir = fs::temp_directory_path() / "tspmdf_acceptance";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

// --- criterion 1: insertion heuristic baselines ---------------------------

Outcome criterion1() {
    struct Row {
        int n;
        double fi_target, ni_target;
    };
    std::string detail;
    bool pass = true;
    for (Row row : {Row{500, 18.29, 20.62}, Row{1000, 25.73, 28.95}}) {
        const int count = 128;
        std::vector<double> fi(count), ni(count);
        parallel_for(count, 0, [&](std::size_t i) {
            TspInstance inst = generate_uniform(row.n, 1000 + row.n, i);
            fi[i] = tour_length(inst, farthest_insertion(inst));
            ni[i] = tour_length(inst, nearest_insertion(inst));
        });
        double fi_mean = 0.0, ni_mean = 0.0;
        for (int i = 0; i < count; ++i) {
            fi_mean += fi[i] / count;
            ni_mean += ni[i] / count;
        }
        bool fi_ok = std::fabs(fi_mean / row.fi_target - 1.0) <= 0.03;
        bool ni_ok = std::fabs(ni_mean / row.ni_target - 1.0) <= 0.03;
        pass = pass && fi_ok && ni_ok;
        detail += fmt("n=%d farthest %.4f vs %.2f%s, nearest %.4f vs %.2f%s; ", row.n, fi_mean,
                      row.fi_target, fi_ok ? "" : " OUT", ni_mean, row.ni_target,
                      ni_ok ? "" : " OUT");
    }
    return {pass, detail};
}

// --- criterion 2: 2-opt baseline and postconditions -----------------------

Outcome criterion2() {
    const int count = 128;
    std::vector<double> len(count);
    parallel_for(count, 0, [&](std::size_t i) {
        TspInstance inst = generate_uniform(500, 2500, i);
        len[i] = tour_length(inst, two_opt(inst, farthest_insertion(inst)));
    });
    double mean = 0.0;
    for (double v : len) mean += v / count;
    bool mean_ok = std::fabs(mean / 18.05 - 1.0) <= 0.03;

    int post_failures = 0;
    Rng rng(26);
    for (int i = 0; i < 200; ++i) {
        int n = 4 + static_cast<int>(rng.next_below(197));  // 4..200
        TspInstance inst = generate_uniform(n, 2600, static_cast<std::uint64_t>(i));
        Tour start = farthest_insertion(inst);
        Tour improved = two_opt(inst, start);
        if (!is_permutation(improved, n) ||
            tour_length(inst, improved) > tour_length(inst, start) + 1e-12 ||
            has_improving_exchange(inst, improved))
            ++post_failures;
    }
    bool pass = mean_ok && post_failures == 0;
    return {pass, fmt("farthest+2opt mean %.4f vs 18.05%s; postcondition failures %d/200", mean,
                      mean_ok ? "" : " OUT", post_failures)};
}

// --- criterion 3: uniform modifications wreck the mapped-back tours -------

Outcome criterion3() {
    const int count = 8;
    std::vector<double> base(count), excl(count);
    Rng seeds(33);
    for (int i = 0; i < count; ++i) {
        TspInstance inst = generate_uniform(500, 3000, static_cast<std::uint64_t>(i));
        SolveConfig cfg;
        cfg.t_iters = 30;
        cfg.samples = 100;
        cfg.seed = seeds.stream(static_cast<std::uint64_t>(i)).next_u64();
        SolveResult res = random_modifier_solve(inst, cfg);
        base[i] = res.base_length;
        excl[i] = res.best_excluding_base;
        std::fprintf(stderr, "  random modifier %d/%d: base %.3f best-excl %.3f\n", i + 1, count,
                     base[i], excl[i]);
    }
    double base_mean = 0.0, excl_mean = 0.0;
    for (int i = 0; i < count; ++i) {
        base_mean += base[i] / count;
        excl_mean += excl[i] / count;
    }
    bool pass = excl_mean >= 2.0 * base_mean;
    return {pass, fmt("best-excluding-base mean %.2f vs base mean %.2f (%.1fx, need >= 2x)",
                      excl_mean, base_mean, excl_mean / base_mean)};
}

// --- criterion 4: training improves guided sampling at desk scale ---------

Outcome criterion4() {
    TrainConfig cfg;
    cfg.n = 100;
    cfg.batch_size = 8;
    cfg.t_iters = 30;
    cfg.samples = 50;
    cfg.digits = 4;
    cfg.constructor = ConstructorKind::kFarthest;
    cfg.seed = 4;
    const int epochs = 30;

    ModelParams params = init_model(32, 12, cfg.digits, HeadKind::kCategorical, cfg.seed);
    OptimizerState opt = init_optimizer(params);

    int first_positive_epoch = -1;
    auto t0 = std::chrono::steady_clock::now();
    for (int epoch = 0; epoch < epochs; ++epoch) {
        EpochMetrics em = train_epoch(params, opt, cfg, epoch);
        double last = em.per_iteration.back().mean_best_reduction;
        if (last > 0.0 && first_positive_epoch < 0) first_positive_epoch = epoch;
        std::fprintf(stderr, "  epoch %2d/%d  base %.4f  best-reduction %+.4f  (%.0fs)\n",
                     epoch + 1, epochs, em.mean_base_length, last,
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                         .count());
    }

    const int held_out = 64;
    std::vector<double> base(held_out), trained(held_out), random_best(held_out);
    parallel_for(held_out, 0, [&](std::size_t i) {
        TspInstance inst = generate_uniform(100, 77001, i);
        SolveConfig sc;
        sc.t_iters = 30;
        sc.samples = 100;
        sc.digits = cfg.digits;
        sc.threads = 1;
        sc.seed = Rng(88).stream(i).next_u64();
        SolveResult guided = mdf_solve(inst, params, sc);
        sc.seed = Rng(89).stream(i).next_u64();
        SolveResult rnd = random_modifier_solve(inst, sc);
        base[i] = guided.base_length;
        trained[i] = guided.best_length;
        random_best[i] = rnd.best_length;
    });
    double base_mean = 0.0, trained_mean = 0.0, random_mean = 0.0;
    for (int i = 0; i < held_out; ++i) {
        base_mean += base[i] / held_out;
        trained_mean += trained[i] / held_out;
        random_mean += random_best[i] / held_out;
    }
    double trained_red = (base_mean - trained_mean) / base_mean;
    double random_red = (base_mean - random_mean) / base_mean;

    bool trained_ok = trained_red >= 0.01;
    bool random_ok = random_red < 0.002;
    bool curve_ok = first_positive_epoch >= 0 && first_positive_epoch < 10;
    return {trained_ok && random_ok && curve_ok,
            fmt("trained reduction %.3f%% (need >= 1%%)%s, random %.3f%% (need < 0.2%%)%s, "
                "curve positive at epoch %d (need < 10)%s",
                100 * trained_red, trained_ok ? "" : " OUT", 100 * random_red,
                random_ok ? "" : " OUT", first_positive_epoch, curve_ok ? "" : " OUT")};
}

// --- criterion 5: analytic gradients vs central differences ---------------

Outcome criterion5() {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const int m = 1, n = 6;
        TspInstance inst = generate_uniform(n, 500 + seed);
        auto bg = build_base_graph(inst, effective_k(50, n));
        DynamicGraph graph = build_dynamic_graph(bg, inst, inst, m);
        ModelParams params = init_model(4, 2, m, HeadKind::kCategorical, seed);

        // Freeze one iteration's records from the initial distribution, with
        // rewards and the expert taken from real constructor evaluations.
        std::vector<IterationRecord> records(1);
        {
            NodeDistributions d0 =
                heads_to_distributions(forward(params, graph, false).logits, m);
            Rng rng(40 + seed);
            double star_len = tour_length(inst, farthest_insertion(inst));
            records[0].star_len = star_len;
            double best = std::numeric_limits<double>::infinity();
            TspInstance best_cand;
            for (int j = 0; j < 6; ++j) {
                SampleOutcome out;
                Rng rj = rng.stream(static_cast<std::uint64_t>(j));
                out.mod = sample_modification(d0, rj);
                TspInstance cand = apply_modification(inst, inst, out.mod, m);
                out.mapped_length = evaluate_on_original(inst, farthest_insertion(cand));
                out.reward = star_len - out.mapped_length;
                if (out.mapped_length < best) {
                    best = out.mapped_length;
                    best_cand = cand;
                }
                records[0].samples.push_back(std::move(out));
            }
            if (best < star_len) {
                records[0].expert = encode_modification(inst, best_cand, m);
                records[0].expert_reduction = star_len - best;
            } else {
                records[0].expert = zero_modification(n, m);
                records[0].expert_reduction = 0.0;
            }
        }

        const double lambda = 1.0;
        auto objective = [&](std::vector<Mat>* grads_out) {
            Mat logits = forward(params, graph, false).logits;
            std::vector<NodeDistributions> dists{heads_to_distributions(logits, m)};
            std::vector<Mat> dlogits{Mat(logits.rows, logits.cols)};
            double loss = reinforce_objective(records, dists, dlogits) +
                          lambda * imitation_objective(records, dists, 0.01, lambda, dlogits);
            if (grads_out) *grads_out = std::move(dlogits);
            return loss;
        };

        std::vector<Mat> dlogits;
        objective(&dlogits);
        ForwardResult fwd = forward(params, graph, true);
        ModelParams grads = backward(params, *fwd.tape, dlogits[0]);

        std::vector<Mat*> tensors, gtensors;
        for_each_tensor(params, [&](const char*, Mat& t) { tensors.push_back(&t); });
        for_each_tensor(grads, [&](const char*, Mat& t) { gtensors.push_back(&t); });
        const double h = 1e-5;
        for (std::size_t ti = 0; ti < tensors.size(); ++ti) {
            for (std::size_t idx = 0; idx < tensors[ti]->size(); ++idx) {
                double orig = tensors[ti]->a[idx];
                tensors[ti]->a[idx] = orig + h;
                double up = objective(nullptr);
                tensors[ti]->a[idx] = orig - h;
                double down = objective(nullptr);
                tensors[ti]->a[idx] = orig;
                double fd = (up - down) / (2 * h);
                double an = gtensors[ti]->a[idx];
                double rel = std::fabs(fd - an) / std::max({std::fabs(fd), std::fabs(an), 1e-8});
                worst = std::max(worst, rel);
            }
        }
    }
    return {worst < 1e-4, fmt("worst relative gradient error %.3e over 5 seeds (need < 1e-4)",
                              worst)};
}

// --- criterion 6: offset codec properties ----------------------------------

Outcome criterion6() {
    for (int m : {1, 2, 4, 6}) {
        double step = std::pow(10.0, -m);
        Rng rng(60 + m);
        for (int i = 0; i < 100000; ++i) {
            double x = rng.next_double() * 2.0 - 1.0;
            double err = std::fabs(decode(encode(x, m)) - x);
            if (err >= step) return {false, fmt("M=%d x=%.17g error %.3e", m, x, err)};
        }

        OffsetCode zero = encode(0.0, m);
        if (zero.sign != +1 || decode(zero) != 0.0)
            return {false, fmt("M=%d zero not canonical", m)};
        for (int d : zero.digits)
            if (d != 0) return {false, fmt("M=%d zero has a nonzero digit", m)};

        for (int i = 0; i < 2000; ++i) {
            OffsetCode code;
            code.sign = rng.next_below(2) == 0 ? -1 : +1;
            bool all_zero = true;
            code.digits.resize(static_cast<std::size_t>(m));
            for (int j = 0; j < m; ++j) {
                code.digits[static_cast<std::size_t>(j)] = static_cast<int>(rng.next_below(10));
                all_zero = all_zero && code.digits[static_cast<std::size_t>(j)] == 0;
            }
            if (all_zero) code.sign = +1;
            OffsetCode back = encode(decode(code), m);
            if (back.sign != code.sign || back.digits != code.digits)
                return {false, fmt("M=%d code round trip changed the code", m)};
        }
    }
    return {true, "4e5 round trips within 10^-M, canonical zero, idempotent codes"};
}

// --- criterion 7: pipeline invariants --------------------------------------

Outcome criterion7() {
    std::vector<ModelParams> models;
    for (int m = 1; m <= 4; ++m)
        models.push_back(init_model(8, 2, m, HeadKind::kCategorical,
                                    static_cast<std::uint64_t>(m)));

    Rng rng(70);
    for (int episode = 0; episode < 1000; ++episode) {
        int n = 8 + static_cast<int>(rng.next_below(33));
        TspInstance inst = generate_uniform(n, 7100, static_cast<std::uint64_t>(episode));
        SolveConfig cfg;
        cfg.t_iters = 3;
        cfg.samples = 4;
        cfg.digits = 1 + episode % 4;
        cfg.k = 10;
        cfg.seed = rng.next_u64();
        cfg.constructor =
            episode % 2 == 0 ? ConstructorKind::kFarthest : ConstructorKind::kNearest;
        SolveResult res = episode % 2 == 0
                              ? random_modifier_solve(inst, cfg)
                              : mdf_solve(inst, models[static_cast<std::size_t>(cfg.digits - 1)],
                                          cfg);
        if (res.trace.size() != static_cast<std::size_t>(cfg.t_iters) + 1)
            return {false, fmt("episode %d: trace has %zu entries", episode, res.trace.size())};
        if (res.trace.front() != res.base_length)
            return {false, fmt("episode %d: trace does not start at the base", episode)};
        for (std::size_t i = 1; i < res.trace.size(); ++i)
            if (res.trace[i] > res.trace[i - 1])
                return {false, fmt("episode %d: trace increases at t=%zu", episode, i)};
        if (res.trace.back() != res.best_length || res.best_length > res.base_length)
            return {false, fmt("episode %d: best/trace bookkeeping", episode)};
        if (std::fabs(res.best_length - tour_length(inst, res.best_tour)) > 1e-9)
            return {false, fmt("episode %d: reported length mismatches the tour", episode)};
    }

    for (int i = 0; i < 20; ++i) {
        TspInstance inst = generate_uniform(30, 7200, static_cast<std::uint64_t>(i));
        SolveConfig cfg;
        cfg.t_iters = 0;
        for (ConstructorKind kind : {ConstructorKind::kNearest, ConstructorKind::kFarthest}) {
            cfg.constructor = kind;
            SolveResult res = random_modifier_solve(inst, cfg);
            Tour direct = construct(kind, inst);
            if (res.best_tour.perm != direct.perm || res.best_length != tour_length(inst, direct))
                return {false, fmt("T=0 differs from the constructor on instance %d", i)};
        }
    }

    // Thread-count independence, checked end to end through the CLI report.
    fs::path dir = scratch_dir() / "c7";
    fs::remove_all(dir);
    fs::path inst_dir = dir / "inst";
    fs::create_directories(inst_dir);
    for (int i = 0; i < 6; ++i) {
        TspInstance inst = generate_uniform(60, 7300, static_cast<std::uint64_t>(i));
        write_tsplib_file(inst, (inst_dir / (inst.name + ".tsp")).string());
    }
    fs::path ck = dir / "model.ckpt";
    {
        ModelParams params = init_model(16, 3, 4, HeadKind::kCategorical, 9);
        save_checkpoint(ck.string(), params, init_optimizer(params), 20);
    }
    auto eval_with = [&](const char* threads, const fs::path& report) {
        std::vector<std::string> args = {"tspmdf",   "eval",
                                         "--dir",    inst_dir.string(),
                                         "--ckpt",   ck.string(),
                                         "--t-iters", "3",
                                         "--samples", "8",
                                         "--seed",   "5",
                                         "--threads", threads,
                                         "--no-timing",
                                         "--report", report.string()};
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        return run_cli(static_cast<int>(argv.size()), argv.data());
    };
    fs::path r1 = dir / "r1.jsonl", r8 = dir / "r8.jsonl";
    if (eval_with("1", r1) != 0 || eval_with("8", r8) != 0)
        return {false, "CLI eval run failed"};
    if (slurp(r1) != slurp(r8)) return {false, "1-thread and 8-thread reports differ"};

    return {true, "1000 monotone episodes, T=0 identity, bitwise-equal 1/8-thread reports"};
}

// --- criterion 8: never better than brute force ----------------------------

Outcome criterion8() {
    Rng rng(80);
    double worst_recompute = 0.0;
    for (int i = 0; i < 500; ++i) {
        int n = 4 + static_cast<int>(rng.next_below(6));  // 4..9
        TspInstance inst = generate_uniform(n, 8100, static_cast<std::uint64_t>(i));
        double optimal = brute_force_optimal(inst).length;

        SolveConfig cfg;
        cfg.t_iters = 2;
        cfg.samples = 3;
        cfg.digits = 4;
        cfg.k = 5;
        cfg.seed = rng.next_u64();
        std::vector<std::pair<const char*, Tour>> tours;
        tours.emplace_back("nearest", nearest_insertion(inst));
        tours.emplace_back("farthest", farthest_insertion(inst));
        tours.emplace_back("2opt", two_opt(inst, tours[1].second));
        tours.emplace_back("mdf", random_modifier_solve(inst, cfg).best_tour);
        for (auto& [name, tour] : tours) {
            double len = tour_length(inst, tour);
            if (len < optimal - 1e-9)
                return {false,
                        fmt("instance %d: %s found %.12f below the optimum %.12f", i, name, len,
                            optimal)};
            double rel = std::fabs(len - naive_length(inst, tour)) / len;
            worst_recompute = std::max(worst_recompute, rel);
        }
    }
    bool pass = worst_recompute <= 1e-9;
    return {pass, fmt("2000 tours >= brute force; worst length recomputation error %.2e",
                      worst_recompute)};
}

// --- criterion 9: TSPLib round trip ----------------------------------------

constexpr const char* kFixture =
    "NAME : fixture29\n"
    "COMMENT : 29-city check file\n"
    "TYPE : TSP\n"
    "DIMENSION : 29\n"
    "EDGE_WEIGHT_TYPE : EUC_2D\n"
    "NODE_COORD_SECTION\n"
    "1 1150.0 1760.0\n"
    "2 630.0 1660.0\n"
    "3 40.0 2090.0\n"
    "4 750.0 1100.0\n"
    "5 750.0 2030.0\n"
    "6 1030.0 2070.0\n"
    "7 1650.0 650.0\n"
    "8 1490.0 1630.0\n"
    "9 790.0 2260.0\n"
    "10 710.0 1310.0\n"
    "11 840.0 550.0\n"
    "12 1170.0 2300.0\n"
    "13 970.0 1340.0\n"
    "14 510.0 700.0\n"
    "15 750.0 900.0\n"
    "16 1280.0 1200.0\n"
    "17 230.0 590.0\n"
    "18 460.0 860.0\n"
    "19 1040.0 950.0\n"
    "20 590.0 1390.0\n"
    "21 830.0 1770.0\n"
    "22 490.0 500.0\n"
    "23 1840.0 1240.0\n"
    "24 1260.0 1500.0\n"
    "25 1280.0 790.0\n"
    "26 490.0 2130.0\n"
    "27 1460.0 1420.0\n"
    "28 1260.0 1910.0\n"
    "29 360.0 1980.0\n"
    "EOF\n";

Outcome criterion9() {
    // An independent scan of the same text: no shared code with parse_tsplib.
    std::istringstream in(kFixture);
    std::string line;
    std::vector<double> ref_xy;
    bool in_coords = false;
    while (std::getline(in, line)) {
        if (line == "NODE_COORD_SECTION") {
            in_coords = true;
            continue;
        }
        if (!in_coords || line == "EOF") continue;
        int idx;
        double x, y;
        if (std::sscanf(line.c_str(), "%d %lf %lf", &idx, &x, &y) == 3) {
            ref_xy.push_back(x);
            ref_xy.push_back(y);
        }
    }

    fs::path path = scratch_dir() / "fixture29.tsp";
    std::ofstream(path) << kFixture;
    TspInstance inst = read_tsplib_file(path.string());
    if (inst.name != "fixture29" || inst.node_count() != 29)
        return {false, "fixture header parsed wrong"};
    if (inst.xy != ref_xy) return {false, "parsed coordinates differ from the reference scan"};

    Tour loop;
    for (int i = 0; i < 29; ++i) loop.perm.push_back(i);
    double lib = tour_length(inst, loop);
    long double ref = 0.0L;
    for (int i = 0; i < 29; ++i) {
        int a = loop.perm[static_cast<std::size_t>(i)];
        int b = loop.perm[static_cast<std::size_t>((i + 1) % 29)];
        long double dx = ref_xy[2 * static_cast<std::size_t>(a)] -
                         ref_xy[2 * static_cast<std::size_t>(b)];
        long double dy = ref_xy[2 * static_cast<std::size_t>(a) + 1] -
                         ref_xy[2 * static_cast<std::size_t>(b) + 1];
        ref += sqrtl(dx * dx + dy * dy);
    }
    if (std::fabs(lib - static_cast<double>(ref)) / lib > 1e-12)
        return {false, fmt("length %.12f vs independent sum %.12Lf", lib, ref)};

    TspInstance back = parse_tsplib(serialize_tsplib(inst));
    if (back.xy != inst.xy) return {false, "serialize/parse round trip is not bitwise"};

    const char* malformed[] = {
        // dimension says more nodes than the file has
        "TYPE : TSP\nDIMENSION : 5\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n"
        "1 0 0\n2 1 0\n3 1 1\n4 0 1\nEOF\n",
        // EOF before the coordinate section
        "TYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\nEOF\n",
        // unsupported distance type
        "TYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : GEO\nNODE_COORD_SECTION\n"
        "1 0 0\n2 1 0\n3 1 1\nEOF\n",
        // not a symmetric TSP file
        "TYPE : TOUR\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n"
        "1 0 0\n2 1 0\n3 1 1\nEOF\n",
        // non-numeric coordinate
        "TYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n"
        "1 0 0\n2 x 0\n3 1 1\nEOF\n",
        // indices out of order
        "TYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n"
        "2 0 0\n1 1 0\n3 1 1\nEOF\n",
        // too small to be a tour
        "TYPE : TSP\nDIMENSION : 2\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n"
        "1 0 0\n2 1 0\nEOF\n",
        // stray non-header line
        "garbage\nTYPE : TSP\n",
    };
    for (std::size_t i = 0; i < sizeof(malformed) / sizeof(malformed[0]); ++i) {
        try {
            parse_tsplib(malformed[i]);
            return {false, fmt("malformed case %zu was accepted", i)};
        } catch (const ParseError&) {
        }
    }
    return {true, "parse matches an independent scan and sum; 8 malformed cases rejected"};
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
    if (which.empty()) which = {1, 2, 3, 4, 5, 6, 7, 8, 9};

    Outcome (*criteria[])() = {criterion1, criterion2, criterion3, criterion4, criterion5,
                               criterion6, criterion7, criterion8, criterion9};
    int failures = 0;
    for (int c : which) {
        if (c < 1 || c > 9) {
            std::fprintf(stderr, "unknown criterion %d\n", c);
            return 2;
        }
        Outcome out = criteria[c - 1]();
        std::printf("criterion %d: %s (%s)\n", c, out.first ? "PASS" : "FAIL",
                    out.second.c_str());
        std::fflush(stdout);
        if (!out.first) ++failures;
    }
    return failures;
}
