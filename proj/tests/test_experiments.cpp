#include "doctest.h"

#include <atomic>
#include <numeric>

#include "memlearn/experiments.hpp"

using namespace memlearn;

namespace {

TrainerConfig fast_trainer(int steps) {
    TrainerConfig cfg = TrainerConfig::bms_defaults();
    cfg.max_training_steps = steps;
    return cfg;
}

} // namespace

TEST_CASE("parallel_for visits every index exactly once") {
    for (int threads : {1, 4}) {
        std::vector<std::atomic<int>> hits(257);
        for (auto& h : hits) h = 0;
        parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
        for (auto& h : hits) CHECK(h == 1);
    }
}

TEST_CASE("parallel_for propagates worker exceptions") {
    CHECK_THROWS_AS(parallel_for(16, 4,
                                 [&](std::size_t i) {
                                     if (i == 7) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}

TEST_CASE("success curves are monotone, bounded and reproducible") {
    SweepSpec spec;
    spec.n_in = 2;
    spec.n_out = 2;
    spec.bulk_sizes = {5, 30};
    spec.realizations = 8;
    spec.trainer = fast_trainer(300);
    spec.seed = 41;
    spec.threads = 2;

    SweepResult a = run_success_sweep(spec);
    REQUIRE(a.points.size() == 2);
    for (const auto& point : a.points) {
        REQUIRE(point.success.size() == 300);
        for (std::size_t s = 0; s < point.success.size(); ++s) {
            CHECK(point.success[s] >= 0.0);
            CHECK(point.success[s] <= 1.0);
            if (s > 0) CHECK(point.success[s] >= point.success[s - 1]);
        }
        double p = point.success_at_cap;
        CHECK(point.sem == doctest::Approx(std::sqrt(p * (1.0 - p) / 8.0)));
        // curve must agree with the recorded learning steps
        int learned = 0;
        for (int st : point.learned_steps)
            if (st >= 1) ++learned;
        CHECK(point.success_at_cap == doctest::Approx(learned / 8.0));
    }

    // scheduling independence: a single worker gives the same realizations
    spec.threads = 1;
    SweepResult b = run_success_sweep(spec);
    for (std::size_t pi = 0; pi < a.points.size(); ++pi)
        CHECK(a.points[pi].learned_steps == b.points[pi].learned_steps);

    SweepSpec bad = spec;
    bad.realizations = 0;
    CHECK_THROWS_AS(run_success_sweep(bad), std::invalid_argument);
}

TEST_CASE("single realization gives a step-function curve") {
    SweepSpec spec;
    spec.n_in = 2;
    spec.n_out = 2;
    spec.bulk_sizes = {30};
    spec.realizations = 1;
    spec.trainer = fast_trainer(300);
    spec.seed = 42;

    SweepResult result = run_success_sweep(spec);
    const auto& point = result.points[0];
    int learned_at = point.learned_steps[0];
    REQUIRE(learned_at >= 1);
    for (std::size_t s = 0; s < point.success.size(); ++s)
        CHECK(point.success[s] == (static_cast<int>(s) + 1 >= learned_at ? 1.0 : 0.0));
}

TEST_CASE("variant sweeps run with the modified construction") {
    SweepSpec base;
    base.n_in = 2;
    base.n_out = 2;
    base.bulk_sizes = {10};
    base.realizations = 4;
    base.trainer = fast_trainer(200);
    base.seed = 43;

    SweepResult rp = run_variants(VariantKind::RandomPolarity, base);
    CHECK(rp.spec.variant.random_polarity);
    CHECK(rp.points[0].success.size() == 200);

    SweepResult eq = run_variants(VariantKind::EqualRRandomVwrite, base);
    CHECK(eq.spec.variant.equal_initial_r);
    REQUIRE(eq.spec.trainer.vwrite_jitter.has_value());
    CHECK(eq.spec.trainer.vwrite_jitter->lo == 0.15);
    CHECK(eq.spec.trainer.vwrite_jitter->hi == 0.3);
}

TEST_CASE("sequential schedule trains each map to zero error before advancing") {
    std::vector<TargetMap> schedule = default_sequential_schedule(3);
    CHECK(schedule.size() == 7);
    CHECK(schedule.front().assignment == std::vector<int>{0, 1, 2});
    CHECK(schedule[1].assignment == std::vector<int>{2, 1, 0});
    CHECK(schedule.back().assignment == std::vector<int>{0, 1, 2});

    SequentialResult result =
        run_sequential_maps({2, 40, 2}, default_sequential_schedule(2), fast_trainer(400), 44);
    REQUIRE(result.trace.size() > 0);
    int prev_map = 0, prev_step = 0;
    for (const auto& rec : result.trace) {
        CHECK(rec.step == prev_step + 1);
        CHECK(rec.map_index >= prev_map);
        prev_step = rec.step;
        prev_map = rec.map_index;
    }
    for (std::size_t mi = 0; mi < result.steps_to_learn.size(); ++mi) {
        if (result.steps_to_learn[mi] < 0) continue;
        // the last recorded error for this map is zero
        int last_error = -1;
        for (const auto& rec : result.trace)
            if (rec.map_index == static_cast<int>(mi)) last_error = rec.error;
        CHECK(last_error == 0);
    }
}

TEST_CASE("switching maps re-raises the error by the map distance") {
    Rng rng(45);
    NetworkState net = build_network({2, 40, 2}, ModelKind::Bms, rng);
    TrainerConfig cfg = fast_trainer(400);
    TargetMap id = identity_map(2);
    RunRecord run = train_until_learned(net, id, cfg, rng);
    REQUIRE(run.learned_at.has_value());

    TargetMap reversal;
    reversal.assignment = {1, 0};
    // every input disagrees between the two maps
    CHECK(compute_error(net, reversal, cfg) == 2);
}

TEST_CASE("perturbation runner marks events and counts recoveries") {
    PerturbResult result =
        run_perturbation({2, 30, 2}, fast_trainer(400), 20, 0.1, 1.05, 46, 3);
    CHECK(result.events == 3);
    CHECK(result.recovered_events <= 3);
    CHECK(result.learned_at >= 1);

    int marks = 0;
    for (const auto& rec : result.trace)
        if (rec.perturbed) ++marks;
    CHECK(marks == 3);

    // steps are contiguous
    for (std::size_t i = 1; i < result.trace.size(); ++i)
        CHECK(result.trace[i].step == result.trace[i - 1].step + 1);
    // initial learning + 3 event windows + trailing window
    CHECK(result.trace.size() == static_cast<std::size_t>(result.learned_at) + 4 * 20);
}

TEST_CASE("a zero perturbation fraction leaves the error flat") {
    PerturbResult result =
        run_perturbation({2, 30, 2}, fast_trainer(400), 10, 0.0, 1.05, 47, 2);
    REQUIRE(result.learned_at >= 1);
    for (const auto& rec : result.trace)
        if (rec.step > result.learned_at) CHECK(rec.error == 0);
    CHECK(result.recovered_events == 2);
}

TEST_CASE("relearn passes accumulate maps and resistance statistics") {
    RelearnResult result =
        run_relearn_shuffle({2, 20, 2}, fast_trainer(300), 3, 48, 2, 2);
    REQUIRE(result.passes.size() == 3);
    for (std::size_t p = 0; p < result.passes.size(); ++p) {
        const auto& pass = result.passes[p];
        CHECK(pass.pass == static_cast<int>(p) + 1);
        CHECK(pass.maps_learned == static_cast<long long>(p + 1) * 4);
        CHECK(pass.mean_r > 0.0);
        CHECK(pass.cv >= 0.0);
        CHECK(pass.cv < 1.0);

        double total = 0.0;
        for (const auto& bin : pass.norm_histogram) {
            CHECK(bin.hi > bin.lo);
            total += bin.mean_count;
        }
        CHECK(total == doctest::Approx(80.0)); // 2x20 + 20x2 devices
    }
    // correction writes can only raise resistances, so the mean must not fall
    for (std::size_t p = 1; p < result.passes.size(); ++p)
        CHECK(result.passes[p].mean_r >= result.passes[p - 1].mean_r - 1e-9);

    CHECK(result.final_cv_mean > 0.0);
    CHECK(result.final_cv_sem >= 0.0);

    RelearnResult again = run_relearn_shuffle({2, 20, 2}, fast_trainer(300), 3, 48, 2, 1);
    CHECK(again.final_cv_mean == result.final_cv_mean);
    CHECK(again.passes.back().mean_r == result.passes.back().mean_r);
}

TEST_CASE("device demo waveform holds the state through small voltages") {
    std::vector<double> wave = demo_waveform_bms();
    REQUIRE(wave.size() == 600);
    DeviceTrace trace = run_device_demo(demo_device_bms(), wave, 1.0);
    REQUIRE(trace.r.size() == 600);

    // three sub-threshold triangles: bit-exact constancy
    for (int s = 0; s < 300; ++s) CHECK(trace.r[static_cast<std::size_t>(s)] == 75.0);
    // the deep negative excursion raises the resistance
    CHECK(trace.r[500] > 75.0);
    // and the final small triangle does not move it again
    for (int s = 501; s < 600; ++s)
        CHECK(trace.r[static_cast<std::size_t>(s)] == trace.r[500]);
    // current follows Ohm's law sample by sample
    for (std::size_t s = 0; s < trace.r.size(); ++s)
        CHECK(trace.i[s] == doctest::Approx(trace.v[s] / trace.r[s]));
}

TEST_CASE("a zero waveform leaves the device untouched") {
    std::vector<double> zeros(100, 0.0);
    DeviceTrace trace = run_device_demo(demo_device_bms(), zeros, 1.0);
    for (double r : trace.r) CHECK(r == 75.0);
    for (double i : trace.i) CHECK(i == 0.0);
}

TEST_CASE("toy schedule and sweep") {
    std::vector<TargetMap> schedule = toy_map_schedule();
    REQUIRE(schedule.size() == 6);
    CHECK(schedule.front().assignment == std::vector<int>{0, 1, 2, 3, 4, 5});
    for (const auto& map : schedule) {
        CHECK(map.size() == 6);
        for (int i = 0; i < 6; ++i) {
            CHECK(map(i) >= 0);
            CHECK(map(i) < 6);
        }
    }

    ToyConfig cfg;
    ToySequentialResult seq = run_toy_sequential(6, 100, 6, schedule, cfg, 49);
    CHECK(seq.steps_to_learn.size() == 6);
    int prev_map = 0;
    for (const auto& rec : seq.trace) {
        CHECK(rec.map_index >= prev_map);
        prev_map = rec.map_index;
    }

    ToySweepSpec spec;
    spec.mid_sizes = {20, 60};
    spec.realizations = 6;
    spec.seed = 50;
    spec.threads = 2;
    auto points = run_toy_sweep(spec);
    REQUIRE(points.size() == 2);
    for (const auto& point : points) {
        CHECK(point.first_map_steps.size() == 6);
        CHECK(point.median_first_map > 0.0);
    }
}
