#pragma once

#include <optional>
#include <vector>

#include "memlearn/rng.hpp"
#include "memlearn/trainer.hpp"

namespace memlearn {

// Abstract companion model: two all-to-all weight layers, winner-take-all
// propagation, and a fixed depression applied to the two weights that carried
// a wrong answer.
struct ToyNetwork {
    int n_in = 0;
    int n_mid = 0;
    int n_out = 0;
    std::vector<double> w1; // (i, j) at i * n_mid + j
    std::vector<double> w2; // (j, k) at j * n_out + k

    double& l1(int i, int j) { return w1[static_cast<std::size_t>(i * n_mid + j)]; }
    double& l2(int j, int k) { return w2[static_cast<std::size_t>(j * n_out + k)]; }
    double l1(int i, int j) const { return w1[static_cast<std::size_t>(i * n_mid + j)]; }
    double l2(int j, int k) const { return w2[static_cast<std::size_t>(j * n_out + k)]; }
};

struct ToyConfig {
    double depression = 0.01;
    // one step is a single presentation: propagate one random input and
    // depress at most once, so learning takes many more steps than the
    // memristor trainer's read-and-correct loops
    int max_training_steps = 100000;
};

ToyNetwork build_toy(int n_in, int n_mid, int n_out, Rng& rng); // weights U(0,1)

// Winner-take-all forward pass: strongest first-layer weight picks the middle
// node, strongest second-layer weight from there picks the output.
struct ToyPath {
    int mid = 0;
    int out = 0;
};
ToyPath toy_forward(const ToyNetwork& net, int input);

// Depress the two weights on the active path by cfg.depression (clamped at 0).
void toy_punish(ToyNetwork& net, int input, const ToyPath& path, const ToyConfig& cfg);

int toy_error(const ToyNetwork& net, const TargetMap& map);

// One presentation: pick a random input, propagate, and depress once if the
// output is wrong. corrections in the returned record is 0 or 1.
StepRecord toy_training_step(ToyNetwork& net, const TargetMap& map, const ToyConfig& cfg, Rng& rng);

RunRecord toy_train_until_learned(ToyNetwork& net, const TargetMap& map, const ToyConfig& cfg,
                                  Rng& rng);

} // namespace memlearn
