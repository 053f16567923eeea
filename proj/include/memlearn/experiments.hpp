#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "memlearn/network.hpp"
#include "memlearn/toy.hpp"
#include "memlearn/trainer.hpp"

namespace memlearn {

// Runs fn(0..n-1) on a bounded pool. Work items must not communicate; each
// writes only to its own output slot, so scheduling order is irrelevant.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

struct SweepSpec {
    int n_in = 3;
    int n_out = 3;
    std::vector<int> bulk_sizes{20, 100, 400};
    int realizations = 100;
    ModelKind model = ModelKind::Bms;
    BuildVariant variant;
    TrainerConfig trainer = TrainerConfig::bms_defaults();
    std::uint64_t seed = 1;
    int threads = 1;
};

struct SweepPoint {
    int n_bulk = 0;
    std::vector<double> success;    // fraction learned at or before step s (1-based)
    double success_at_cap = 0.0;
    double sem = 0.0;               // sqrt(p(1-p)/n) at the step cap
    std::vector<int> learned_steps; // per realization; -1 when never learned
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepPoint> points;
};

// Fresh network and fresh random map per realization; success(s) aggregates
// learned_at across realizations.
SweepResult run_success_sweep(const SweepSpec& spec);

enum class VariantKind { RandomPolarity, EqualRRandomVwrite };

// Same sweep with the variant's construction applied on top of `base`:
// RandomPolarity flips each device's orientation with probability 1/2;
// EqualRRandomVwrite starts every device at R=100 and draws the punish
// magnitude from U(0.15, 0.3), applied negative.
SweepResult run_variants(VariantKind kind, SweepSpec base);

struct SequentialStep {
    int step = 0;      // global 1-based step count
    int map_index = 0; // position in the schedule
    int error = 0;
};

struct SequentialResult {
    std::vector<TargetMap> schedule;
    std::vector<SequentialStep> trace;
    std::vector<int> steps_to_learn; // per map; -1 when the cap was hit
};

SequentialResult run_sequential_maps(const NetworkDims& dims, const std::vector<TargetMap>& maps,
                                     const TrainerConfig& cfg, std::uint64_t seed);

// Default seven-map schedule for an n x n network: identity, reversal, and
// five fixed derangement-style permutations, ending back at identity.
std::vector<TargetMap> default_sequential_schedule(int n);

struct PerturbStep {
    int step = 0;
    int error = 0;
    bool perturbed = false; // a perturbation was applied just before this step
};

struct PerturbResult {
    std::vector<PerturbStep> trace;
    int learned_at = -1;     // initial learning, in steps
    int events = 0;
    int recovered_events = 0; // error returned to 0 before the next event
};

// Learn the identity map, then `events` times: train `period` steps, perturb
// `fraction` of devices by `factor`. A trailing window of `period` steps makes
// the last recovery observable.
PerturbResult run_perturbation(const NetworkDims& dims, const TrainerConfig& cfg, int period,
                               double fraction, double factor, std::uint64_t seed, int events);

struct MeanHistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    double mean_count = 0.0; // averaged over realizations
};

struct RelearnPass {
    int pass = 0;          // 1-based
    long long maps_learned = 0;
    double mean_r = 0.0;   // mean over realizations of the per-network mean
    double cv = 0.0;       // mean over realizations of the per-network CV
    // histogram of r / mean(r), bin width 0.05, edges at multiples of 0.05
    std::vector<MeanHistogramBin> norm_histogram;
};

struct RelearnResult {
    std::vector<RelearnPass> passes;
    double final_cv_mean = 0.0; // <CV> over realizations at the last pass
    double final_cv_sem = 0.0;
};

enum class MapOrder { Lexicographic, SeededShuffle };

// Enumerates every map, learns them all, then `cycles - 1` times shuffles the
// device positions and relearns the full set. Pass statistics are averaged
// over realizations; pass p has seen p * n_maps cumulative maps.
RelearnResult run_relearn_shuffle(const NetworkDims& dims, const TrainerConfig& cfg, int cycles,
                                  std::uint64_t seed, int realizations, int threads = 1,
                                  MapOrder order = MapOrder::Lexicographic);

struct DeviceTrace {
    std::vector<double> t;
    std::vector<double> v;
    std::vector<double> i;
    std::vector<double> r;
};

// Single device driven directly by a sampled voltage source; one Euler substep
// of length dt per sample. The resistance recorded at each sample is the value
// the current was computed with, before that sample's update.
DeviceTrace run_device_demo(DeviceRecord dev, const std::vector<double>& waveform, double dt);

// Three sub-threshold triangles (peak 0.05), one deep negative excursion
// (peak -0.5), then one more small triangle to show the state held.
std::vector<double> demo_waveform_bms();
DeviceRecord demo_device_bms(); // V_up 0.075, R 75..5000, beta 0.9, starts at 75

struct ToySweepSpec {
    int n_in = 6;
    int n_out = 6;
    std::vector<int> mid_sizes{50, 150, 300};
    int realizations = 100;
    ToyConfig cfg;
    std::uint64_t seed = 1;
    int threads = 1;
};

struct ToySequentialResult {
    std::vector<SequentialStep> trace;
    std::vector<int> steps_to_learn;
};

// The six-map schedule used by the toy-model demonstration.
std::vector<TargetMap> toy_map_schedule();

ToySequentialResult run_toy_sequential(int n_in, int n_mid, int n_out,
                                       const std::vector<TargetMap>& maps, const ToyConfig& cfg,
                                       std::uint64_t seed);

struct ToySweepPoint {
    int n_mid = 0;
    std::vector<int> first_map_steps; // per realization, -1 when capped
    double median_first_map = 0.0;
};

// First-map learning time as a function of middle-layer size.
std::vector<ToySweepPoint> run_toy_sweep(const ToySweepSpec& spec);

} // namespace memlearn
