// Acceptance gate: runs the full claim list against the library and prints one
// [PASS]/[FAIL] line per criterion. Exits nonzero if any criterion fails.
//
// The Monte-Carlo criteria use the bulk-elimination solver; its agreement with
// the dense default is itself one of the checks here and in the module tests.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "memlearn/emit.hpp"
#include "memlearn/experiments.hpp"
#include "nodal_oracle.hpp"

using namespace memlearn;

namespace {

int g_threads = 1;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

TrainerConfig mc_config() {
    TrainerConfig cfg = TrainerConfig::bms_defaults();
    cfg.solver = SolverMode::BulkSchur;
    return cfg;
}

SweepResult bms_sweep(int n, std::vector<int> bulks, int reals, std::uint64_t seed) {
    SweepSpec spec;
    spec.n_in = n;
    spec.n_out = n;
    spec.bulk_sizes = std::move(bulks);
    spec.realizations = reals;
    spec.trainer = mc_config();
    spec.seed = seed;
    spec.threads = g_threads;
    return run_success_sweep(spec);
}

std::string curve_detail(const SweepResult& result) {
    std::string s = "success@cap";
    for (const auto& point : result.points)
        s += " " + std::to_string(point.n_bulk) + ":" + fmt(point.success_at_cap);
    return s;
}

bool non_decreasing(const SweepResult& result) {
    for (std::size_t i = 1; i < result.points.size(); ++i)
        if (result.points[i].success_at_cap < result.points[i - 1].success_at_cap) return false;
    return true;
}

// first training step at which the success fraction reaches one half
int step_to_half(const SweepPoint& point) {
    for (std::size_t s = 0; s < point.success.size(); ++s)
        if (point.success[s] >= 0.5) return static_cast<int>(s) + 1;
    return std::numeric_limits<int>::max();
}

Outcome criterion_scaling_3x3() {
    SweepResult result = bms_sweep(3, {20, 100, 400}, 100, 101);
    double last = result.points.back().success_at_cap;
    bool pass = non_decreasing(result) && last >= 0.95;
    return {pass, curve_detail(result) + ", largest must reach 0.95"};
}

Outcome criterion_scaling_4x4() {
    SweepResult result = bms_sweep(4, {70, 200, 600}, 100, 102);
    double last = result.points.back().success_at_cap;
    bool pass = non_decreasing(result) && last >= 0.8;
    return {pass, curve_detail(result) + ", largest must reach 0.8"};
}

// known red: the implemented device law gives <CV> ~= 0.63 here (see README);
// the target is kept as the record of that discrepancy
Outcome criterion_relearn_cv() {
    RelearnResult result =
        run_relearn_shuffle({3, 400, 3}, mc_config(), 10, 103, 10, g_threads);
    double cv = result.final_cv_mean;
    bool pass = std::abs(cv - 1.0 / 3.0) <= 0.10;
    return {pass, "<CV> " + fmt(cv) + " (sem " + fmt(result.final_cv_sem) +
                      ") after " + std::to_string(result.passes.back().maps_learned) +
                      " maps, target 1/3 +- 0.10"};
}

Outcome criterion_perturbation() {
    PerturbResult result = run_perturbation({4, 200, 4}, mc_config(), 100, 0.1, 1.05, 104, 20);
    bool pass = result.learned_at >= 1 && result.recovered_events >= 19;
    return {pass, "recovered " + std::to_string(result.recovered_events) + "/20 events, initial learning " +
                      std::to_string(result.learned_at) + " steps, need >= 19"};
}

Outcome criterion_hysteresis() {
    DeviceTrace trace = run_device_demo(demo_device_bms(), demo_waveform_bms(), 1.0);
    // samples 0..299 are the three sub-threshold triangles, 300..499 the deep
    // negative excursion, 500..599 the final sub-threshold triangle
    bool quiet_before = true;
    for (int s = 0; s <= 300; ++s) quiet_before &= trace.r[static_cast<std::size_t>(s)] == 75.0;
    bool grew = trace.r[500] > trace.r[300];
    bool quiet_after = true;
    for (std::size_t s = 500; s < trace.r.size(); ++s) quiet_after &= trace.r[s] == trace.r[500];
    bool pass = quiet_before && grew && quiet_after;
    return {pass, std::string("R 75 -> ") + fmt(trace.r[500]) +
                      (quiet_before ? ", constant below threshold" : ", MOVED below threshold") +
                      (quiet_after ? ", constant after" : ", MOVED after")};
}

bool close_rel(double a, double b, double rel) {
    double scale = std::max({std::abs(a), std::abs(b), 1e-12});
    return std::abs(a - b) <= rel * scale;
}

Outcome criterion_solver_oracle() {
    Rng rng(105);
    int max_mismatches = 0;
    for (int c = 0; c < 100; ++c) {
        NetworkDims dims{1 + static_cast<int>(rng.next_below(3)),
                         1 + static_cast<int>(rng.next_below(5)),
                         1 + static_cast<int>(rng.next_below(3))};
        ModelKind model = (c % 2 == 0) ? ModelKind::Bms : ModelKind::Bcm;
        NetworkState net = build_network(dims, model, rng);
        int input = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(dims.n_in)));
        int output = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(dims.n_out)));
        double v = rng.uniform(1e-4, 2.0);

        CircuitSolution sol = solve(net, input, output, v, SolverMode::Dense);
        oracle::OracleSolution ref = oracle::solve_brute_force(net, input, output, v);
        for (std::size_t n = 0; n < ref.node_voltages.size(); ++n)
            if (!close_rel(sol.node_voltages[n], ref.node_voltages[n], 1e-9)) ++max_mismatches;
        if (!close_rel(sol.terminal_current, ref.sink_current, 1e-9)) ++max_mismatches;
        if (!close_rel(sol.source_current, ref.source_current, 1e-9)) ++max_mismatches;
    }

    // a full training run; the solver itself faults if any solve violates
    // current conservation at 1e-9 relative
    Rng train_rng(106);
    NetworkState net = build_network({3, 50, 3}, ModelKind::Bms, train_rng);
    TrainCounters counters;
    TrainerConfig cfg = TrainerConfig::bms_defaults();
    RunRecord run = train_until_learned(net, random_map(3, 3, train_rng), cfg, train_rng, &counters);

    // spot-check the conservation identity directly on the trained state
    int direct_violations = 0;
    for (int c = 0; c < 100; ++c) {
        int input = static_cast<int>(train_rng.next_below(3));
        int output = static_cast<int>(train_rng.next_below(3));
        double v = train_rng.uniform(1e-4, 1.0);
        CircuitSolution sol = solve(net, input, output, v,
                                    c % 2 == 0 ? SolverMode::Dense : SolverMode::BulkSchur);
        if (!close_rel(sol.source_current, sol.terminal_current, 1e-9)) ++direct_violations;
    }

    bool pass = max_mismatches == 0 && direct_violations == 0;
    return {pass, "oracle mismatches " + std::to_string(max_mismatches) + "/100 nets, conservation violations " +
                      std::to_string(direct_violations) + "/100, training solves " +
                      std::to_string(counters.solves) +
                      (run.learned_at ? " (map learned)" : " (map not learned)")};
}

Outcome criterion_bcm_scaling() {
    auto sweep = [&](int n, std::vector<int> bulks, std::uint64_t seed) {
        SweepSpec spec;
        spec.n_in = n;
        spec.n_out = n;
        spec.bulk_sizes = std::move(bulks);
        spec.realizations = 30;
        spec.model = ModelKind::Bcm;
        spec.trainer = TrainerConfig::bcm_defaults();
        spec.trainer.solver = SolverMode::BulkSchur;
        spec.seed = seed;
        spec.threads = g_threads;
        return run_success_sweep(spec);
    };
    SweepResult small = sweep(3, {20, 100, 400}, 107);
    SweepResult large = sweep(4, {70, 200, 600}, 108);
    bool pass = non_decreasing(small) && non_decreasing(large);
    return {pass, "3x3 " + curve_detail(small) + "; 4x4 " + curve_detail(large)};
}

Outcome criterion_variants() {
    SweepSpec base;
    base.n_in = 4;
    base.n_out = 4;
    base.bulk_sizes = {200};
    base.realizations = 100;
    base.trainer = mc_config();
    base.seed = 109;
    base.threads = g_threads;

    SweepResult baseline = run_success_sweep(base);
    SweepResult polarity = run_variants(VariantKind::RandomPolarity, base);
    SweepResult equal_r = run_variants(VariantKind::EqualRRandomVwrite, base);

    double pb = baseline.points[0].success_at_cap;
    double pp = polarity.points[0].success_at_cap;
    int base_half = step_to_half(baseline.points[0]);
    int eq_half = step_to_half(equal_r.points[0]);

    bool polarity_ok = std::abs(pp - pb) <= 0.1;
    bool equal_ok = eq_half > base_half && eq_half != std::numeric_limits<int>::max();
    return {polarity_ok && equal_ok,
            "baseline " + fmt(pb) + " vs random-polarity " + fmt(pp) +
                " (within 0.1); steps to 0.5 success: baseline " + std::to_string(base_half) +
                ", equal-R " +
                (eq_half == std::numeric_limits<int>::max() ? std::string("never")
                                                            : std::to_string(eq_half)) +
                " (must be later)"};
}

Outcome criterion_toy() {
    ToyConfig cfg;
    ToySequentialResult seq = run_toy_sequential(6, 300, 6, toy_map_schedule(), cfg, 110);
    bool all_learned = true;
    std::string steps;
    for (int s : seq.steps_to_learn) {
        all_learned &= s >= 1;
        steps += (steps.empty() ? "" : "/") + std::to_string(s);
    }

    ToySweepSpec spec;
    spec.mid_sizes = {50, 150, 300};
    spec.realizations = 100;
    spec.seed = 111;
    spec.threads = g_threads;
    auto points = run_toy_sweep(spec);
    bool decreasing = points[0].median_first_map > points[1].median_first_map &&
                      points[1].median_first_map > points[2].median_first_map;
    return {all_learned && decreasing,
            "six maps learned in " + steps + " steps; median first-map steps " +
                fmt(points[0].median_first_map) + " > " + fmt(points[1].median_first_map) +
                " > " + fmt(points[2].median_first_map)};
}

// randomized invariants, 1000 cases each
Outcome criterion_properties() {
    std::string fails;

    {
        Rng rng(112);
        int bad = 0;
        for (int c = 0; c < 1000; ++c) {
            DeviceRecord dev = sample_bms_device(rng);
            const auto& p = std::get<BmsParams>(dev.params);
            dev.state = rng.uniform(p.r_min, p.r_max);
            double before = dev.state;
            apply_voltage_substep(dev, rng.uniform(-p.v_threshold, p.v_threshold), rng.uniform(0.1, 2.0));
            if (dev.state != before) ++bad;
        }
        if (bad > 0) fails += " dead-zone:" + std::to_string(bad);
    }
    {
        Rng rng(113);
        int bad = 0;
        for (int c = 0; c < 1000; ++c) {
            DeviceRecord dev = c % 2 == 0 ? sample_bms_device(rng) : sample_bcm_device(rng);
            for (int k = 0; k < 5; ++k)
                apply_voltage_substep(dev, rng.uniform(-50.0, 50.0), rng.uniform(0.5, 10.0));
            // the state is the clamped quantity: R for the threshold model,
            // x in [0, 1] for the boundary model
            bool ok = c % 2 == 0 ? dev.state >= std::get<BmsParams>(dev.params).r_min &&
                                       dev.state <= std::get<BmsParams>(dev.params).r_max
                                 : dev.state >= 0.0 && dev.state <= 1.0;
            if (!ok) ++bad;
        }
        if (bad > 0) fails += " clamping:" + std::to_string(bad);
    }
    {
        Rng rng(114);
        int bad = 0;
        TrainerConfig cfg = TrainerConfig::bms_defaults();
        for (int c = 0; c < 1000; ++c) {
            NetworkState net = build_network({2, 3, 2}, ModelKind::Bms, rng);
            cfg.solver = c % 2 == 0 ? SolverMode::Dense : SolverMode::BulkSchur;
            std::uint64_t before = state_hash(net);
            read_winner(net, static_cast<int>(rng.next_below(2)), cfg);
            if (state_hash(net) != before) ++bad;
        }
        if (bad > 0) fails += " read-purity:" + std::to_string(bad);
    }
    {
        Rng rng(115);
        int bad = 0;
        for (int c = 0; c < 1000; ++c) {
            NetworkDims dims{1 + static_cast<int>(rng.next_below(3)),
                             1 + static_cast<int>(rng.next_below(6)),
                             1 + static_cast<int>(rng.next_below(3))};
            NetworkState net = build_network(dims, ModelKind::Bms, rng);
            std::vector<double> before = all_resistances(net);
            std::sort(before.begin(), before.end());
            shuffle_devices(net, rng, c % 2 == 0 ? ShuffleScope::Global : ShuffleScope::PerLayer);
            std::vector<double> after = all_resistances(net);
            std::sort(after.begin(), after.end());
            if (before != after) ++bad;
        }
        if (bad > 0) fails += " shuffle-conservation:" + std::to_string(bad);
    }
    {
        Rng rng(116);
        int bad = 0;
        for (int c = 0; c < 1000; ++c) {
            NetworkDims dims{1 + static_cast<int>(rng.next_below(3)),
                             1 + static_cast<int>(rng.next_below(6)),
                             1 + static_cast<int>(rng.next_below(3))};
            NetworkState net = build_network(dims, ModelKind::Bms, rng);
            double fraction = rng.uniform();
            std::vector<double> before = all_resistances(net);
            std::size_t touched = perturb(net, fraction, 1.05, rng);
            std::vector<double> after = all_resistances(net);
            std::size_t expected =
                static_cast<std::size_t>(fraction * static_cast<double>(net.device_count()));
            std::size_t changed = 0;
            for (std::size_t i = 0; i < before.size(); ++i)
                if (before[i] != after[i]) ++changed;
            // fresh networks start at r_min, so a 1.05x factor moves every
            // touched device
            if (touched != expected || changed != touched) ++bad;
        }
        if (bad > 0) fails += " perturb-count:" + std::to_string(bad);
    }
    {
        Rng rng(117);
        int bad = 0;
        for (int c = 0; c < 1000; ++c) {
            CsvCell cell = rng.coin() ? CsvCell{rng.uniform(-1e9, 1e9)}
                                      : CsvCell{static_cast<long long>(rng.next_u64() >> 16)};
            if (csv_format(cell) != csv_format(cell)) ++bad;
        }
        auto tmp = std::filesystem::temp_directory_path();
        auto write_once = [&](const std::filesystem::path& p, std::uint64_t seed) {
            Rng r2(seed);
            CsvWriter w(p, {"a", "b"});
            for (int i = 0; i < 1000; ++i)
                w.row({CsvCell{r2.uniform()}, CsvCell{static_cast<long long>(r2.next_u64() >> 8)}});
            w.close();
        };
        auto read_all = [](const std::filesystem::path& p) {
            std::FILE* f = std::fopen(p.string().c_str(), "rb");
            std::string text;
            char buf[4096];
            std::size_t got;
            while (f && (got = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, got);
            if (f) std::fclose(f);
            return text;
        };
        write_once(tmp / "memlearn_accept_a.csv", 118);
        write_once(tmp / "memlearn_accept_b.csv", 118);
        if (read_all(tmp / "memlearn_accept_a.csv") != read_all(tmp / "memlearn_accept_b.csv"))
            ++bad;
        std::filesystem::remove(tmp / "memlearn_accept_a.csv");
        std::filesystem::remove(tmp / "memlearn_accept_b.csv");
        if (bad > 0) fails += " csv-determinism:" + std::to_string(bad);
    }

    bool pass = fails.empty();
    return {pass, pass ? "dead-zone, clamping, read purity, shuffle conservation, perturb count, "
                         "csv determinism: 1000 cases each"
                       : "failing cases:" + fails};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    g_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (g_threads < 1) g_threads = 1;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) {
            g_threads = std::atoi(argv[++i]);
        } else {
            std::printf("usage: acceptance [--criterion N] [--threads T]\n");
            return 2;
        }
    }

    const std::vector<Criterion> criteria = {
        {1, "success scaling, 3x3 grid", criterion_scaling_3x3},
        {2, "success scaling, 4x4 grid", criterion_scaling_4x4},
        {3, "resistance spread after shuffle relearning", criterion_relearn_cv},
        {4, "perturbation recovery", criterion_perturbation},
        {5, "single-device hysteresis", criterion_hysteresis},
        {6, "solver oracle equivalence and conservation", criterion_solver_oracle},
        {7, "boundary-state model success scaling", criterion_bcm_scaling},
        {8, "construction variants", criterion_variants},
        {9, "toy model sequential learning", criterion_toy},
        {10, "randomized property suite", criterion_properties},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        if (only != 0 && criterion.id != only) continue;
        auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %2d %s: %s (%.1fs)\n", outcome.pass ? "PASS" : "FAIL", criterion.id,
                    criterion.name, outcome.detail.c_str(), secs);
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
