#include "memlearn/trainer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace memlearn {

TargetMap identity_map(int n) {
    TargetMap m;
    m.assignment.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) m.assignment[static_cast<std::size_t>(i)] = i;
    return m;
}

TargetMap random_map(int n_in, int n_out, Rng& rng) {
    TargetMap m;
    m.assignment.resize(static_cast<std::size_t>(n_in));
    for (int i = 0; i < n_in; ++i)
        m.assignment[static_cast<std::size_t>(i)] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_out)));
    return m;
}

std::vector<TargetMap> enumerate_maps(int n_in, int n_out) {
    if (n_in < 1 || n_out < 1) throw std::invalid_argument("enumerate_maps: sizes must be positive");
    double total_d = std::pow(static_cast<double>(n_out), n_in);
    if (total_d > 1e6) throw std::length_error("enumerate_maps: more than 10^6 maps");
    auto total = static_cast<std::size_t>(total_d);

    std::vector<TargetMap> maps;
    maps.reserve(total);
    TargetMap cur;
    cur.assignment.assign(static_cast<std::size_t>(n_in), 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        maps.push_back(cur);
        // increment with input 0 as the most significant digit
        for (int pos = n_in - 1; pos >= 0; --pos) {
            auto& digit = cur.assignment[static_cast<std::size_t>(pos)];
            if (++digit < n_out) break;
            digit = 0;
        }
    }
    return maps;
}

TrainerConfig TrainerConfig::bms_defaults() { return TrainerConfig{}; }

TrainerConfig TrainerConfig::bcm_defaults() {
    TrainerConfig cfg;
    cfg.v_read = 1e-4;
    cfg.v_write = -5.0;
    cfg.write_substeps = 5;
    cfg.substep_dt = 2e-4; // 1 ms total
    return cfg;
}

void validate_config(const TrainerConfig& cfg, const NetworkState& net) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("trainer config: " + msg); };
    if (!(cfg.v_read > 0.0)) fail("v_read must be positive");
    if (cfg.v_write == 0.0) fail("v_write must be nonzero");
    if (cfg.write_substeps < 1) fail("write_substeps must be at least 1");
    if (!(cfg.substep_dt > 0.0)) fail("substep_dt must be positive");
    if (cfg.max_corrections < 1) fail("max_corrections must be at least 1");
    if (cfg.max_training_steps < 1) fail("max_training_steps must be at least 1");
    if (cfg.vwrite_jitter) {
        const auto& j = *cfg.vwrite_jitter;
        if (!(j.lo > 0.0) || !(j.hi >= j.lo)) fail("vwrite_jitter bounds must satisfy 0 < lo <= hi");
    }

    if (net.model == ModelKind::Bms) {
        // A read must never move device state. The applied read voltage divides
        // across two layers, so the full v_read at a single device is already a
        // conservative bound.
        for (const auto* layer : {&net.layer1, &net.layer2}) {
            for (const auto& dev : *layer) {
                const auto& p = std::get<BmsParams>(dev.params);
                if (cfg.v_read >= p.v_threshold)
                    fail("v_read reaches a device threshold; reads would not be passive");
            }
        }
    }
}

ReadResult read_winner(const NetworkState& net, int input_idx, const TrainerConfig& cfg,
                       Rng* tie_rng) {
    ReadResult res;
    res.currents = read_currents(net, input_idx, cfg.v_read, cfg.solver);

    int best = 0;
    int n_ties = 1;
    for (int k = 1; k < net.dims.n_out; ++k) {
        double c = res.currents[static_cast<std::size_t>(k)];
        double b = res.currents[static_cast<std::size_t>(best)];
        if (c > b) {
            best = k;
            n_ties = 1;
        } else if (c == b) {
            ++n_ties;
            if (cfg.tie_break == TieBreak::SeededRandom && tie_rng != nullptr) {
                // reservoir choice among the tied maxima
                if (tie_rng->next_below(static_cast<std::uint64_t>(n_ties)) == 0) best = k;
            }
        }
    }
    res.winner = best;
    return res;
}

void write_punish(NetworkState& net, int input_idx, int output_idx, const TrainerConfig& cfg,
                  Rng* rng, TrainCounters* counters) {
    double v_write = cfg.v_write;
    if (cfg.vwrite_jitter) {
        if (rng == nullptr) throw std::invalid_argument("write_punish: jitter requires an rng");
        double mag = rng->uniform(cfg.vwrite_jitter->lo, cfg.vwrite_jitter->hi);
        v_write = std::copysign(mag, cfg.v_write);
    }

    for (int s = 0; s < cfg.write_substeps; ++s) {
        CircuitSolution sol = solve(net, input_idx, output_idx, v_write, cfg.solver);
        if (counters != nullptr) ++counters->solves;
        for (std::size_t idx = 0; idx < net.layer1.size(); ++idx) {
            auto& dev = net.layer1[idx];
            double before = resistance_of(dev);
            apply_voltage_substep(dev, sol.layer1_drops[idx], cfg.substep_dt);
            if (counters != nullptr) {
                ++counters->device_updates;
                if (resistance_of(dev) < before) ++counters->resistance_decreases;
            }
        }
        for (std::size_t idx = 0; idx < net.layer2.size(); ++idx) {
            auto& dev = net.layer2[idx];
            double before = resistance_of(dev);
            apply_voltage_substep(dev, sol.layer2_drops[idx], cfg.substep_dt);
            if (counters != nullptr) {
                ++counters->device_updates;
                if (resistance_of(dev) < before) ++counters->resistance_decreases;
            }
        }
    }
    if (counters != nullptr) ++counters->write_calls;
}

StepRecord training_step(NetworkState& net, const TargetMap& map, const TrainerConfig& cfg,
                         Rng& rng, TrainCounters* counters) {
    StepRecord rec;
    rec.input = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(net.dims.n_in)));

    for (int c = 0; c < cfg.max_corrections; ++c) {
        ReadResult r = read_winner(net, rec.input, cfg, &rng);
        if (counters != nullptr) counters->solves += static_cast<unsigned long long>(net.dims.n_out);
        if (r.winner == map(rec.input)) {
            rec.resolved = true;
            break;
        }
        write_punish(net, rec.input, r.winner, cfg, &rng, counters);
        ++rec.corrections;
    }
    if (!rec.resolved) {
        ReadResult r = read_winner(net, rec.input, cfg, &rng);
        if (counters != nullptr) counters->solves += static_cast<unsigned long long>(net.dims.n_out);
        rec.resolved = r.winner == map(rec.input);
    }
    return rec;
}

int compute_error(const NetworkState& net, const TargetMap& map, const TrainerConfig& cfg) {
    int err = 0;
    for (int i = 0; i < net.dims.n_in; ++i) {
        ReadResult r = read_winner(net, i, cfg, nullptr);
        if (r.winner != map(i)) ++err;
    }
    return err;
}

RunRecord train_until_learned(NetworkState& net, const TargetMap& map, const TrainerConfig& cfg,
                              Rng& rng, TrainCounters* counters) {
    if (map.size() != net.dims.n_in) throw std::invalid_argument("train: map size does not match n_in");
    for (int i = 0; i < map.size(); ++i)
        if (map(i) < 0 || map(i) >= net.dims.n_out)
            throw std::invalid_argument("train: map target out of range");
    validate_config(cfg, net);

    RunRecord run;
    long long cum = 0;
    for (int step = 1; step <= cfg.max_training_steps; ++step) {
        StepRecord rec = training_step(net, map, cfg, rng, counters);
        rec.step = step;
        rec.error = compute_error(net, map, cfg);
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
