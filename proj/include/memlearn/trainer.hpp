#pragma once

#include <optional>
#include <vector>

#include "memlearn/network.hpp"
#include "memlearn/solver.hpp"

namespace memlearn {

// Desired input -> output association: one output index per input.
struct TargetMap {
    std::vector<int> assignment;

    int size() const { return static_cast<int>(assignment.size()); }
    int operator()(int input) const { return assignment[static_cast<std::size_t>(input)]; }
    bool operator==(const TargetMap&) const = default;
};

TargetMap identity_map(int n);
TargetMap random_map(int n_in, int n_out, Rng& rng);

// All n_out^n_in maps in lexicographic order (input 0 most significant).
// Throws std::length_error above 10^6 maps.
std::vector<TargetMap> enumerate_maps(int n_in, int n_out);

enum class TieBreak { LowestIndex, SeededRandom };

// Per-correction write magnitude drawn uniformly from [lo, hi], applied with
// the sign of v_write.
struct VwriteJitter {
    double lo = 0.15;
    double hi = 0.3;
};

struct TrainerConfig {
    double v_read = 1e-4;
    double v_write = -0.2;
    int write_substeps = 5;
    double substep_dt = 1.0;     // duration of one write substep
    int max_corrections = 80;    // write applications per training step
    int max_training_steps = 1000;
    TieBreak tie_break = TieBreak::LowestIndex;
    SolverMode solver = SolverMode::Dense;
    std::optional<VwriteJitter> vwrite_jitter;

    static TrainerConfig bms_defaults();
    static TrainerConfig bcm_defaults(); // V_write = -5 V, 1 ms split into 5 substeps
};

// Throws std::invalid_argument if the config violates its own constraints or,
// for BMS networks, if |v_read| reaches any device threshold.
void validate_config(const TrainerConfig& cfg, const NetworkState& net);

struct ReadResult {
    int winner = 0;
    std::vector<double> currents;
};

struct StepRecord {
    int step = 0;        // 1-based outer training step
    int input = 0;
    int corrections = 0; // write applications used
    bool resolved = false;
    int error = -1;      // Hamming error measured after the step
};

struct RunRecord {
    std::vector<StepRecord> steps;
    std::optional<int> learned_at; // outer step at which the error reached zero
    // cumulative corrections applied up to and including each step, so curves
    // can be plotted against either counter
    std::vector<long long> cumulative_corrections;
};

// Counters accumulated across write substeps; used to monitor how often a
// punishment actually decreased a resistance.
struct TrainCounters {
    unsigned long long device_updates = 0;
    unsigned long long resistance_decreases = 0;
    unsigned long long write_calls = 0;
    unsigned long long solves = 0;
};

// Argmax of the output read currents; ties by cfg.tie_break (SeededRandom
// requires tie_rng, otherwise falls back to lowest index).
ReadResult read_winner(const NetworkState& net, int input_idx, const TrainerConfig& cfg,
                       Rng* tie_rng = nullptr);

// One punishment: write_substeps explicit Euler substeps, re-solving the
// circuit before each one and updating every device simultaneously from its
// own voltage drop.
void write_punish(NetworkState& net, int input_idx, int output_idx, const TrainerConfig& cfg,
                  Rng* rng = nullptr, TrainCounters* counters = nullptr);

// One training step: pick a random input, then read-and-punish until the
// winner matches the map or max_corrections writes have been applied.
StepRecord training_step(NetworkState& net, const TargetMap& map, const TrainerConfig& cfg,
                         Rng& rng, TrainCounters* counters = nullptr);

// Hamming distance between the current winners and the map.
int compute_error(const NetworkState& net, const TargetMap& map, const TrainerConfig& cfg);

// Outer loop: training steps followed by an error evaluation, until the error
// reaches zero or max_training_steps is exhausted.
RunRecord train_until_learned(NetworkState& net, const TargetMap& map, const TrainerConfig& cfg,
                              Rng& rng, TrainCounters* counters = nullptr);

} // namespace memlearn
