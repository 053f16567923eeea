#include "memlearn/toy.hpp"

#include <algorithm>
#include <stdexcept>

namespace memlearn {

ToyNetwork build_toy(int n_in, int n_mid, int n_out, Rng& rng) {
    if (n_in < 1 || n_mid < 1 || n_out < 1)
        throw std::invalid_argument("build_toy: all layer sizes must be positive");
    ToyNetwork net;
    net.n_in = n_in;
    net.n_mid = n_mid;
    net.n_out = n_out;
    net.w1.resize(static_cast<std::size_t>(n_in) * static_cast<std::size_t>(n_mid));
    net.w2.resize(static_cast<std::size_t>(n_mid) * static_cast<std::size_t>(n_out));
    for (auto& w : net.w1) w = rng.uniform();
    for (auto& w : net.w2) w = rng.uniform();
    return net;
}

ToyPath toy_forward(const ToyNetwork& net, int input) {
    ToyPath path;
    for (int j = 1; j < net.n_mid; ++j)
        if (net.l1(input, j) > net.l1(input, path.mid)) path.mid = j;
    for (int k = 1; k < net.n_out; ++k)
        if (net.l2(path.mid, k) > net.l2(path.mid, path.out)) path.out = k;
    return path;
}

void toy_punish(ToyNetwork& net, int input, const ToyPath& path, const ToyConfig& cfg) {
    auto& a = net.l1(input, path.mid);
    auto& b = net.l2(path.mid, path.out);
    a = std::max(0.0, a - cfg.depression);
    b = std::max(0.0, b - cfg.depression);
}

int toy_error(const ToyNetwork& net, const TargetMap& map) {
    int err = 0;
    for (int i = 0; i < net.n_in; ++i)
        if (toy_forward(net, i).out != map(i)) ++err;
    return err;
}

StepRecord toy_training_step(ToyNetwork& net, const TargetMap& map, const ToyConfig& cfg, Rng& rng) {
    StepRecord rec;
    rec.input = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(net.n_in)));
    ToyPath path = toy_forward(net, rec.input);
    if (path.out == map(rec.input)) {
        rec.resolved = true;
    } else {
        toy_punish(net, rec.input, path, cfg);
        rec.corrections = 1;
        rec.resolved = toy_forward(net, rec.input).out == map(rec.input);
    }
    return rec;
}

RunRecord toy_train_until_learned(ToyNetwork& net, const TargetMap& map, const ToyConfig& cfg,
                                  Rng& rng) {
    if (map.size() != net.n_in) throw std::invalid_argument("toy train: map size does not match n_in");
    for (int i = 0; i < net.n_in; ++i)
        if (map(i) < 0 || map(i) >= net.n_out)
            throw std::invalid_argument("toy train: map target out of range");
    RunRecord run;
    long long cum = 0;
    for (int step = 1; step <= cfg.max_training_steps; ++step) {
        StepRecord rec = toy_training_step(net, map, cfg, rng);
        rec.step = step;
        rec.error = toy_error(net, map);
        cum += rec.corrections;
        run.steps.push_back(rec);
        run.cumulative_corrections.push_back(cum);
        if (rec.error == 0) {
            run.learned_at = step;
            break;
        }
    }
    return run;
}

} // namespace memlearn
