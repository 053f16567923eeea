#include "memlearn/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

namespace memlearn {

namespace {

std::uint64_t stream_id(std::size_t point, std::size_t realization) {
    return (static_cast<std::uint64_t>(point) << 32) | static_cast<std::uint64_t>(realization);
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    std::size_t workers = threads < 1 ? 1 : static_cast<std::size_t>(threads);
    workers = std::min(workers, n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failed.load()) std::rethrow_exception(error);
}

SweepResult run_success_sweep(const SweepSpec& spec) {
    if (spec.realizations < 1) throw std::invalid_argument("sweep: realizations must be at least 1");
    if (spec.bulk_sizes.empty()) throw std::invalid_argument("sweep: no bulk sizes given");

    SweepResult result;
    result.spec = spec;
    result.points.resize(spec.bulk_sizes.size());

    const auto n_real = static_cast<std::size_t>(spec.realizations);
    const int cap = spec.trainer.max_training_steps;

    for (std::size_t pi = 0; pi < spec.bulk_sizes.size(); ++pi) {
        SweepPoint& point = result.points[pi];
        point.n_bulk = spec.bulk_sizes[pi];
        point.learned_steps.assign(n_real, -1);

        NetworkDims dims{spec.n_in, point.n_bulk, spec.n_out};
        parallel_for(n_real, spec.threads, [&](std::size_t r) {
            Rng rng(mix_seed(spec.seed, stream_id(pi, r)));
            NetworkState net = build_network(dims, spec.model, rng, spec.variant);
            TargetMap map = random_map(spec.n_in, spec.n_out, rng);
            RunRecord run = train_until_learned(net, map, spec.trainer, rng);
            point.learned_steps[r] = run.learned_at.value_or(-1);
        });

        point.success.assign(static_cast<std::size_t>(cap), 0.0);
        for (int s : point.learned_steps) {
            if (s < 0) continue;
            for (int step = s; step <= cap; ++step)
                point.success[static_cast<std::size_t>(step - 1)] += 1.0;
        }
        for (auto& v : point.success) v /= static_cast<double>(n_real);
        point.success_at_cap = point.success.back();
        double p = point.success_at_cap;
        point.sem = std::sqrt(p * (1.0 - p) / static_cast<double>(n_real));
    }
    return result;
}

SweepResult run_variants(VariantKind kind, SweepSpec base) {
    switch (kind) {
    case VariantKind::RandomPolarity:
        base.variant.random_polarity = true;
        break;
    case VariantKind::EqualRRandomVwrite:
        base.variant.equal_initial_r = true;
        base.variant.equal_r_value = 100.0;
        base.trainer.vwrite_jitter = VwriteJitter{0.15, 0.3};
        break;
    }
    return run_success_sweep(base);
}

std::vector<TargetMap> default_sequential_schedule(int n) {
    auto from_rule = [n](auto&& rule) {
        TargetMap m;
        m.assignment.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) m.assignment[static_cast<std::size_t>(i)] = rule(i);
        return m;
    };
    std::vector<TargetMap> maps;
    maps.push_back(from_rule([](int i) { return i; }));
    maps.push_back(from_rule([n](int i) { return n - 1 - i; }));
    maps.push_back(from_rule([n](int i) { return (i + 1) % n; }));
    maps.push_back(from_rule([n](int i) { return (i + 2) % n; }));
    maps.push_back(from_rule([n](int i) { return (i + 3) % n; }));
    maps.push_back(from_rule([n](int i) { return i % 2 == 0 ? std::min(i + 1, n - 1) : i - 1; }));
    maps.push_back(from_rule([](int i) { return i; }));
    return maps;
}

SequentialResult run_sequential_maps(const NetworkDims& dims, const std::vector<TargetMap>& maps,
                                     const TrainerConfig& cfg, std::uint64_t seed) {
    SequentialResult result;
    result.schedule = maps;
    result.steps_to_learn.assign(maps.size(), -1);

    Rng rng(seed);
    NetworkState net = build_network(dims, ModelKind::Bms, rng);
    int global_step = 0;
    for (std::size_t mi = 0; mi < maps.size(); ++mi) {
        RunRecord run = train_until_learned(net, maps[mi], cfg, rng);
        for (const auto& rec : run.steps)
            result.trace.push_back({++global_step, static_cast<int>(mi), rec.error});
        if (run.learned_at) result.steps_to_learn[mi] = *run.learned_at;
    }
    return result;
}

PerturbResult run_perturbation(const NetworkDims& dims, const TrainerConfig& cfg, int period,
                               double fraction, double factor, std::uint64_t seed, int events) {
    if (period < 1) throw std::invalid_argument("perturbation: period must be at least 1");
    if (events < 0) throw std::invalid_argument("perturbation: events must be nonnegative");

    PerturbResult result;
    result.events = events;

    Rng rng(seed);
    NetworkState net = build_network(dims, ModelKind::Bms, rng);
    TargetMap map = identity_map(dims.n_in);
    validate_config(cfg, net);

    int step = 0;
    bool pending_mark = false;
    auto run_steps = [&](int count) {
        for (int s = 0; s < count; ++s) {
            training_step(net, map, cfg, rng);
            int err = compute_error(net, map, cfg);
            result.trace.push_back({++step, err, pending_mark});
            pending_mark = false;
        }
    };

    RunRecord initial = train_until_learned(net, map, cfg, rng);
    for (const auto& rec : initial.steps) result.trace.push_back({++step, rec.error, false});
    if (initial.learned_at) result.learned_at = *initial.learned_at;

    std::vector<std::size_t> event_positions;
    for (int e = 0; e < events; ++e) {
        run_steps(period);
        perturb(net, fraction, factor, rng);
        event_positions.push_back(result.trace.size());
        pending_mark = true;
    }
    run_steps(period);

    for (std::size_t e = 0; e < event_positions.size(); ++e) {
        std::size_t from = event_positions[e];
        std::size_t to = e + 1 < event_positions.size() ? event_positions[e + 1] : result.trace.size();
        bool recovered = false;
        for (std::size_t i = from; i < to; ++i) {
            if (result.trace[i].error == 0) {
                recovered = true;
                break;
            }
        }
        if (recovered) ++result.recovered_events;
    }
    return result;
}

RelearnResult run_relearn_shuffle(const NetworkDims& dims, const TrainerConfig& cfg, int cycles,
                                  std::uint64_t seed, int realizations, int threads,
                                  MapOrder order) {
    if (cycles < 1) throw std::invalid_argument("relearn: cycles must be at least 1");
    if (realizations < 1) throw std::invalid_argument("relearn: realizations must be at least 1");

    const std::vector<TargetMap> maps = enumerate_maps(dims.n_in, dims.n_out);
    const auto n_maps = static_cast<long long>(maps.size());
    const auto n_real = static_cast<std::size_t>(realizations);
    const auto n_pass = static_cast<std::size_t>(cycles);

    std::vector<std::vector<double>> mean_r(n_pass, std::vector<double>(n_real, 0.0));
    std::vector<std::vector<double>> cv(n_pass, std::vector<double>(n_real, 0.0));
    std::vector<std::vector<std::vector<HistogramBin>>> hists(
        n_pass, std::vector<std::vector<HistogramBin>>(n_real));

    parallel_for(n_real, threads, [&](std::size_t r) {
        Rng rng(mix_seed(seed, r));
        NetworkState net = build_network(dims, ModelKind::Bms, rng);
        std::vector<TargetMap> schedule = maps;
        for (std::size_t p = 0; p < n_pass; ++p) {
            if (p > 0) shuffle_devices(net, rng);
            if (order == MapOrder::SeededShuffle) {
                for (std::size_t i = schedule.size(); i > 1; --i)
                    std::swap(schedule[i - 1], schedule[rng.next_below(i)]);
            }
            for (const auto& map : schedule) train_until_learned(net, map, cfg, rng);

            std::vector<double> rs = all_resistances(net);
            double sum = 0.0;
            for (double v : rs) sum += v;
            double mean = sum / static_cast<double>(rs.size());
            double sq = 0.0;
            for (double v : rs) sq += (v - mean) * (v - mean);
            double sd = std::sqrt(sq / static_cast<double>(rs.size()));
            mean_r[p][r] = mean;
            cv[p][r] = sd / mean;

            std::vector<double> norm = rs;
            for (double& v : norm) v /= mean;
            hists[p][r] = histogram_aligned(norm, 0.05);
        }
    });

    RelearnResult result;
    result.passes.resize(n_pass);
    for (std::size_t p = 0; p < n_pass; ++p) {
        RelearnPass& pass = result.passes[p];
        pass.pass = static_cast<int>(p + 1);
        pass.maps_learned = static_cast<long long>(p + 1) * n_maps;
        for (std::size_t r = 0; r < n_real; ++r) {
            pass.mean_r += mean_r[p][r];
            pass.cv += cv[p][r];
        }
        pass.mean_r /= static_cast<double>(n_real);
        pass.cv /= static_cast<double>(n_real);

        // accumulate aligned bins by lower edge
        std::map<long long, MeanHistogramBin> merged;
        for (std::size_t r = 0; r < n_real; ++r) {
            for (const auto& bin : hists[p][r]) {
                auto key = static_cast<long long>(std::llround(bin.lo / 0.05));
                auto& slot = merged[key];
                slot.lo = bin.lo;
                slot.hi = bin.hi;
                slot.mean_count += static_cast<double>(bin.count);
            }
        }
        for (auto& [key, bin] : merged) {
            bin.mean_count /= static_cast<double>(n_real);
            pass.norm_histogram.push_back(bin);
        }
    }

    const auto& final_cv = cv[n_pass - 1];
    double sum = 0.0;
    for (double v : final_cv) sum += v;
    result.final_cv_mean = sum / static_cast<double>(n_real);
    double sq = 0.0;
    for (double v : final_cv) sq += (v - result.final_cv_mean) * (v - result.final_cv_mean);
    double sd = n_real > 1 ? std::sqrt(sq / static_cast<double>(n_real - 1)) : 0.0;
    result.final_cv_sem = sd / std::sqrt(static_cast<double>(n_real));
    return result;
}

DeviceTrace run_device_demo(DeviceRecord dev, const std::vector<double>& waveform, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("device demo: dt must be positive");
    DeviceTrace trace;
    trace.t.reserve(waveform.size());
    trace.v.reserve(waveform.size());
    trace.i.reserve(waveform.size());
    trace.r.reserve(waveform.size());
    double t = 0.0;
    for (double v : waveform) {
        double r = resistance_of(dev);
        trace.t.push_back(t);
        trace.v.push_back(v);
        trace.i.push_back(v / r);
        trace.r.push_back(r);
        apply_voltage_substep(dev, v, dt);
        t += dt;
    }
    return trace;
}

namespace {

void append_triangle(std::vector<double>& wave, double peak, int samples) {
    // 0 -> peak -> 0 over `samples` points, endpoint exclusive
    int half = samples / 2;
    for (int s = 0; s < samples; ++s) {
        double frac = s <= half ? static_cast<double>(s) / half
                                : static_cast<double>(samples - s) / (samples - half);
        wave.push_back(peak * frac);
    }
}

} // namespace

std::vector<double> demo_waveform_bms() {
    std::vector<double> wave;
    for (int k = 0; k < 3; ++k) append_triangle(wave, 0.05, 100);
    append_triangle(wave, -0.5, 200);
    append_triangle(wave, 0.05, 100);
    return wave;
}

DeviceRecord demo_device_bms() {
    DeviceRecord dev;
    BmsParams p;
    p.beta = 0.9;
    p.v_threshold = 0.075;
    p.r_min = 75.0;
    p.r_max = 5000.0;
    dev.params = p;
    dev.polarity = 1;
    dev.state = p.r_min;
    return dev;
}

std::vector<TargetMap> toy_map_schedule() {
    auto make = [](std::initializer_list<int> vals) {
        TargetMap m;
        m.assignment.assign(vals);
        return m;
    };
    return {
        make({0, 1, 2, 3, 4, 5}),
        make({5, 4, 3, 2, 1, 0}),
        make({1, 2, 3, 4, 5, 0}),
        make({1, 0, 3, 2, 5, 4}),
        make({0, 0, 0, 0, 0, 0}),
        make({2, 4, 0, 5, 1, 3}),
    };
}

ToySequentialResult run_toy_sequential(int n_in, int n_mid, int n_out,
                                       const std::vector<TargetMap>& maps, const ToyConfig& cfg,
                                       std::uint64_t seed) {
    ToySequentialResult result;
    result.steps_to_learn.assign(maps.size(), -1);
    Rng rng(seed);
    ToyNetwork net = build_toy(n_in, n_mid, n_out, rng);
    int global_step = 0;
    for (std::size_t mi = 0; mi < maps.size(); ++mi) {
        RunRecord run = toy_train_until_learned(net, maps[mi], cfg, rng);
        for (const auto& rec : run.steps)
            result.trace.push_back({++global_step, static_cast<int>(mi), rec.error});
        if (run.learned_at) result.steps_to_learn[mi] = *run.learned_at;
    }
    return result;
}

std::vector<ToySweepPoint> run_toy_sweep(const ToySweepSpec& spec) {
    if (spec.realizations < 1) throw std::invalid_argument("toy sweep: realizations must be at least 1");
    std::vector<ToySweepPoint> points(spec.mid_sizes.size());
    const auto n_real = static_cast<std::size_t>(spec.realizations);
    const TargetMap first = identity_map(spec.n_in);

    for (std::size_t pi = 0; pi < spec.mid_sizes.size(); ++pi) {
        ToySweepPoint& point = points[pi];
        point.n_mid = spec.mid_sizes[pi];
        point.first_map_steps.assign(n_real, -1);

        parallel_for(n_real, spec.threads, [&](std::size_t r) {
            Rng rng(mix_seed(spec.seed, stream_id(pi, r)));
            ToyNetwork net = build_toy(spec.n_in, point.n_mid, spec.n_out, rng);
            RunRecord run = toy_train_until_learned(net, first, spec.cfg, rng);
            point.first_map_steps[r] = run.learned_at.value_or(-1);
        });

        std::vector<double> times;
        times.reserve(n_real);
        for (int s : point.first_map_steps)
            times.push_back(s < 0 ? static_cast<double>(spec.cfg.max_training_steps + 1)
                                  : static_cast<double>(s));
        point.median_first_map = median(std::move(times));
    }
    return points;
}

} // namespace memlearn
