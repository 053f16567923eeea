#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "memlearn/emit.hpp"
#include "memlearn/experiments.hpp"

namespace fs = std::filesystem;
using namespace memlearn;

namespace {

struct CommonOpts {
    std::string outdir = ".";
    std::uint64_t seed = 1;
    int threads = 0; // 0 = hardware concurrency
    bool plot = false;
    SolverMode solver = SolverMode::Dense;
    std::string config;
};

const std::map<std::string, SolverMode> solver_names{{"dense", SolverMode::Dense},
                                                     {"schur", SolverMode::BulkSchur}};
const std::map<std::string, ModelKind> model_names{{"bms", ModelKind::Bms},
                                                   {"bcm", ModelKind::Bcm}};

void add_common(CLI::App* sub, CommonOpts& c) {
    sub->add_option("--outdir", c.outdir, "Output directory")->envname("MEMLEARN_OUTDIR");
    sub->add_option("--seed", c.seed, "Base RNG seed");
    sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
    sub->add_flag("--plot", c.plot, "Also write SVG plots");
    sub->add_option("--solver", c.solver, "Circuit solver backend")
        ->transform(CLI::CheckedTransformer(solver_names, CLI::ignore_case));
    sub->add_option("--config", c.config,
                    "Read options from a key=value file (command-line flags win)");
}

// Flat key=value settings for one subcommand. Unknown and duplicate keys are
// rejected; keys already given on the command line are skipped.
void apply_config_file(CLI::App* sub, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);

    auto trim = [](std::string s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())) != 0)
            s.erase(s.begin());
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())) != 0)
            s.pop_back();
        return s;
    };

    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string entry = trim(line);
        if (entry.empty() || entry[0] == '#') continue;
        auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        ": expected key=value");
        std::string key = trim(entry.substr(0, eq));
        std::string value = trim(entry.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config: line " + std::to_string(lineno) + ": empty key");
        if (!seen.insert(key).second)
            throw std::invalid_argument("config: duplicate key '" + key + "'");
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr || opt == sub->get_help_ptr() || key == "config")
            throw std::invalid_argument("config: unknown key '" + key + "'");
        if (opt->count() > 0) continue;
        opt->add_result(value);
        opt->run_callback();
    }
}

int resolve_threads(const CommonOpts& c) {
    if (c.threads > 0) return c.threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

fs::path prepare_outdir(const CommonOpts& c) {
    fs::path dir(c.outdir);
    fs::create_directories(dir);
    return dir;
}

// Per-subcommand trainer options layered over the model's defaults.
struct TrainerOpts {
    double vread = 0.0;
    double vwrite = 0.0;
    int steps = 0;
    int corrections = 0;
};

void add_trainer(CLI::App* sub, TrainerOpts& t) {
    sub->add_option("--vread", t.vread, "Read voltage");
    sub->add_option("--vwrite", t.vwrite, "Write (punish) voltage");
    sub->add_option("--steps", t.steps, "Training step cap")->check(CLI::PositiveNumber);
    sub->add_option("--corrections", t.corrections, "Correction cap per step")
        ->check(CLI::PositiveNumber);
}

TrainerConfig make_trainer(const CLI::App* sub, const TrainerOpts& t, ModelKind model,
                           const CommonOpts& c) {
    TrainerConfig cfg =
        model == ModelKind::Bcm ? TrainerConfig::bcm_defaults() : TrainerConfig::bms_defaults();
    cfg.solver = c.solver;
    if (sub->count("--vread") > 0) cfg.v_read = t.vread;
    if (sub->count("--vwrite") > 0) cfg.v_write = t.vwrite;
    if (sub->count("--steps") > 0) cfg.max_training_steps = t.steps;
    if (sub->count("--corrections") > 0) cfg.max_corrections = t.corrections;
    return cfg;
}

void write_sweep_csv(const fs::path& path, const SweepResult& result) {
    CsvWriter csv(path, {"n_in", "n_out", "n_bulk", "step", "success", "sem"});
    auto n = static_cast<double>(result.spec.realizations);
    for (const auto& point : result.points) {
        for (std::size_t s = 0; s < point.success.size(); ++s) {
            double p = point.success[s];
            csv.row({static_cast<long long>(result.spec.n_in),
                     static_cast<long long>(result.spec.n_out),
                     static_cast<long long>(point.n_bulk), static_cast<long long>(s + 1), p,
                     std::sqrt(p * (1.0 - p) / n)});
        }
    }
    csv.close();
}

void plot_sweep(const fs::path& path, const SweepResult& result, const std::string& title) {
    PlotSpec spec;
    spec.title = title;
    spec.x_label = "training step";
    spec.y_label = "success fraction";
    spec.log_x = true;
    for (const auto& point : result.points) {
        PlotSeries s;
        s.label = "n_bulk " + std::to_string(point.n_bulk);
        for (std::size_t i = 0; i < point.success.size(); ++i) {
            s.x.push_back(static_cast<double>(i + 1));
            s.y.push_back(point.success[i]);
        }
        spec.series.push_back(std::move(s));
    }
    write_svg_plot(path, spec);
}

int run_sweep_cmd(const CLI::App* sub, const CommonOpts& common, const TrainerOpts& topts,
                  int nin, int nout, const std::vector<int>& bulks, int reals, ModelKind model) {
    SweepSpec spec;
    spec.n_in = nin;
    spec.n_out = nout;
    spec.bulk_sizes = bulks;
    spec.realizations = reals;
    spec.model = model;
    spec.trainer = make_trainer(sub, topts, model, common);
    spec.seed = common.seed;
    spec.threads = resolve_threads(common);

    SweepResult result = run_success_sweep(spec);
    fs::path dir = prepare_outdir(common);
    write_sweep_csv(dir / "sweep.csv", result);
    if (common.plot) plot_sweep(dir / "sweep.svg", result, "success vs training step");
    for (const auto& point : result.points)
        std::cout << "n_bulk " << point.n_bulk << ": success " << point.success_at_cap << " (sem "
                  << point.sem << ")\n";
    return 0;
}

int run_variants_cmd(const CLI::App* sub, const CommonOpts& common, const TrainerOpts& topts,
                     int nin, int nout, const std::vector<int>& bulks, int reals,
                     const std::string& tag) {
    SweepSpec base;
    base.n_in = nin;
    base.n_out = nout;
    base.bulk_sizes = bulks;
    base.realizations = reals;
    base.model = ModelKind::Bms;
    base.trainer = make_trainer(sub, topts, ModelKind::Bms, common);
    base.seed = common.seed;
    base.threads = resolve_threads(common);

    VariantKind kind =
        tag == "random-polarity" ? VariantKind::RandomPolarity : VariantKind::EqualRRandomVwrite;
    SweepResult result = run_variants(kind, base);
    fs::path dir = prepare_outdir(common);
    write_sweep_csv(dir / ("variants_" + tag + ".csv"), result);
    if (common.plot)
        plot_sweep(dir / ("variants_" + tag + ".svg"), result, "variant: " + tag);
    for (const auto& point : result.points)
        std::cout << "n_bulk " << point.n_bulk << ": success " << point.success_at_cap << "\n";
    return 0;
}

int run_train_cmd(const CLI::App* sub, const CommonOpts& common, const TrainerOpts& topts, int nin,
                  int nbulk, int nout, ModelKind model, const std::string& map_kind,
                  const std::string& load_path, const std::string& save_path) {
    Rng rng(common.seed);
    NetworkState net;
    if (!load_path.empty()) {
        net = load_network_file(load_path);
        model = net.model;
    } else {
        net = build_network({nin, nbulk, nout}, model, rng);
    }
    TrainerConfig cfg = make_trainer(sub, topts, model, common);

    TargetMap map = map_kind == "random" ? random_map(net.dims.n_in, net.dims.n_out, rng)
                                         : identity_map(net.dims.n_in);
    RunRecord run = train_until_learned(net, map, cfg, rng);

    fs::path dir = prepare_outdir(common);
    CsvWriter csv(dir / "train.csv", {"step", "input", "corrections", "resolved", "error"});
    for (const auto& rec : run.steps)
        csv.row({static_cast<long long>(rec.step), static_cast<long long>(rec.input),
                 static_cast<long long>(rec.corrections), static_cast<long long>(rec.resolved),
                 static_cast<long long>(rec.error)});
    csv.close();

    if (common.plot) {
        PlotSpec spec;
        spec.title = "training error";
        spec.x_label = "training step";
        spec.y_label = "error";
        PlotSeries s;
        s.label = "error";
        for (const auto& rec : run.steps) {
            s.x.push_back(rec.step);
            s.y.push_back(rec.error);
        }
        spec.series.push_back(std::move(s));
        write_svg_plot(dir / "train.svg", spec);
    }
    if (!save_path.empty()) save_network_file(net, save_path);

    if (run.learned_at)
        std::cout << "learned in " << *run.learned_at << " steps\n";
    else
        std::cout << "not learned within " << cfg.max_training_steps << " steps\n";
    return 0;
}

int run_perturb_cmd(const CLI::App* sub, const CommonOpts& common, const TrainerOpts& topts,
                    int nin, int nbulk, int nout, int period, double fraction, double factor,
                    int events) {
    TrainerConfig cfg = make_trainer(sub, topts, ModelKind::Bms, common);
    PerturbResult result =
        run_perturbation({nin, nbulk, nout}, cfg, period, fraction, factor, common.seed, events);

    fs::path dir = prepare_outdir(common);
    CsvWriter csv(dir / "perturb.csv", {"step", "error", "perturbed"});
    for (const auto& rec : result.trace)
        csv.row({static_cast<long long>(rec.step), static_cast<long long>(rec.error),
                 static_cast<long long>(rec.perturbed)});
    csv.close();

    if (common.plot) {
        PlotSpec spec;
        spec.title = "perturbation recovery";
        spec.x_label = "training step";
        spec.y_label = "error";
        PlotSeries s;
        for (const auto& rec : result.trace) {
            s.x.push_back(rec.step);
            s.y.push_back(rec.error);
        }
        spec.series.push_back(std::move(s));
        write_svg_plot(dir / "perturb.svg", spec);
    }
    std::cout << "recovered " << result.recovered_events << "/" << result.events << " events\n";
    return 0;
}

int run_relearn_cmd(const CLI::App* sub, const CommonOpts& common, const TrainerOpts& topts,
                    int nin, int nbulk, int nout, int cycles, int reals,
                    const std::string& order_name) {
    TrainerConfig cfg = make_trainer(sub, topts, ModelKind::Bms, common);
    MapOrder order = order_name == "shuffled" ? MapOrder::SeededShuffle : MapOrder::Lexicographic;
    RelearnResult result = run_relearn_shuffle({nin, nbulk, nout}, cfg, cycles, common.seed, reals,
                                               resolve_threads(common), order);

    fs::path dir = prepare_outdir(common);
    CsvWriter csv(dir / "relearn.csv", {"maps_learned", "mean_r", "cv"});
    for (const auto& pass : result.passes)
        csv.row({pass.maps_learned, pass.mean_r, pass.cv});
    csv.close();

    for (const auto& pass : result.passes) {
        CsvWriter hist(dir / ("relearn_hist_" + std::to_string(pass.maps_learned) + ".csv"),
                       {"bin_low", "bin_high", "count"});
        for (const auto& bin : pass.norm_histogram) hist.row({bin.lo, bin.hi, bin.mean_count});
        hist.close();
    }

    if (common.plot) {
        PlotSpec spec;
        spec.title = "resistance spread while relearning";
        spec.x_label = "maps learned";
        spec.y_label = "<CV>";
        PlotSeries s;
        for (const auto& pass : result.passes) {
            s.x.push_back(static_cast<double>(pass.maps_learned));
            s.y.push_back(pass.cv);
        }
        spec.series.push_back(std::move(s));
        write_svg_plot(dir / "relearn.svg", spec);
    }
    std::cout << "final <CV> " << result.final_cv_mean << " (sem " << result.final_cv_sem << ")\n";
    return 0;
}

int run_device_demo_cmd(const CLI::App* sub, const CommonOpts& common, double beta, double vup,
                        double rmin, double rmax, double dt) {
    DeviceRecord dev = demo_device_bms();
    auto& p = std::get<BmsParams>(dev.params);
    if (sub->count("--beta") > 0) p.beta = beta;
    if (sub->count("--vup") > 0) p.v_threshold = vup;
    if (sub->count("--rmin") > 0) {
        p.r_min = rmin;
        dev.state = rmin;
    }
    if (sub->count("--rmax") > 0) p.r_max = rmax;

    DeviceTrace trace = run_device_demo(dev, demo_waveform_bms(), dt);
    fs::path dir = prepare_outdir(common);
    CsvWriter csv(dir / "device_demo.csv", {"t", "v", "i", "r"});
    for (std::size_t k = 0; k < trace.t.size(); ++k)
        csv.row({trace.t[k], trace.v[k], trace.i[k], trace.r[k]});
    csv.close();

    if (common.plot) {
        PlotSpec rt;
        rt.title = "device resistance under drive";
        rt.x_label = "time";
        rt.y_label = "resistance";
        rt.series.push_back({"R", trace.t, trace.r});
        write_svg_plot(dir / "device_demo_r.svg", rt);

        PlotSpec iv;
        iv.title = "device I-V";
        iv.x_label = "voltage";
        iv.y_label = "current";
        iv.series.push_back({"", trace.v, trace.i});
        write_svg_plot(dir / "device_demo_iv.svg", iv);
    }
    std::cout << "final resistance " << trace.r.back() << "\n";
    return 0;
}

int run_toy_cmd(const CommonOpts& common, int nin, int nmid, int nout,
                const std::vector<int>& mid_sizes, int reals) {
    ToyConfig cfg;
    ToySequentialResult seq = run_toy_sequential(nin, nmid, nout, toy_map_schedule(), cfg,
                                                 common.seed);
    fs::path dir = prepare_outdir(common);
    CsvWriter csv(dir / "toy.csv", {"step", "map_index", "error"});
    for (const auto& rec : seq.trace)
        csv.row({static_cast<long long>(rec.step), static_cast<long long>(rec.map_index),
                 static_cast<long long>(rec.error)});
    csv.close();

    if (!mid_sizes.empty()) {
        ToySweepSpec spec;
        spec.n_in = nin;
        spec.n_out = nout;
        spec.mid_sizes = mid_sizes;
        spec.realizations = reals;
        spec.cfg = cfg;
        spec.seed = common.seed;
        spec.threads = resolve_threads(common);
        auto points = run_toy_sweep(spec);
        CsvWriter sw(dir / "toy_sweep.csv", {"n_mid", "realization", "first_map_steps"});
        for (const auto& point : points)
            for (std::size_t r = 0; r < point.first_map_steps.size(); ++r)
                sw.row({static_cast<long long>(point.n_mid), static_cast<long long>(r),
                        static_cast<long long>(point.first_map_steps[r])});
        sw.close();
        for (const auto& point : points)
            std::cout << "n_mid " << point.n_mid << ": median first-map steps "
                      << point.median_first_map << "\n";
    }

    if (common.plot) {
        PlotSpec spec;
        spec.title = "toy model sequential learning";
        spec.x_label = "training step";
        spec.y_label = "error";
        PlotSeries s;
        for (const auto& rec : seq.trace) {
            s.x.push_back(rec.step);
            s.y.push_back(rec.error);
        }
        spec.series.push_back(std::move(s));
        write_svg_plot(dir / "toy.svg", spec);
    }

    int learned = 0;
    for (int s : seq.steps_to_learn)
        if (s >= 0) ++learned;
    std::cout << "learned " << learned << "/" << seq.steps_to_learn.size() << " maps\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Three-layer memristor network learning simulator"};
    app.require_subcommand(1);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Success rate vs middle-layer size");
    CommonOpts sweep_common;
    TrainerOpts sweep_trainer;
    int sweep_nin = 3, sweep_nout = 3, sweep_reals = 100;
    std::vector<int> sweep_bulks{20, 100, 400};
    ModelKind sweep_model = ModelKind::Bms;
    add_common(sweep, sweep_common);
    add_trainer(sweep, sweep_trainer);
    sweep->add_option("--nin", sweep_nin)->check(CLI::PositiveNumber);
    sweep->add_option("--nout", sweep_nout)->check(CLI::PositiveNumber);
    sweep->add_option("--nbulk", sweep_bulks, "Comma-separated middle-layer sizes")
        ->delimiter(',');
    sweep->add_option("--reals", sweep_reals)->check(CLI::PositiveNumber);
    sweep->add_option("--model", sweep_model)
        ->transform(CLI::CheckedTransformer(model_names, CLI::ignore_case));

    // train
    auto* train = app.add_subcommand("train", "Train one network on one map");
    CommonOpts train_common;
    TrainerOpts train_trainer;
    int train_nin = 3, train_nbulk = 100, train_nout = 3;
    ModelKind train_model = ModelKind::Bms;
    std::string train_map = "random", train_load, train_save;
    add_common(train, train_common);
    add_trainer(train, train_trainer);
    train->add_option("--nin", train_nin)->check(CLI::PositiveNumber);
    train->add_option("--nbulk", train_nbulk)->check(CLI::PositiveNumber);
    train->add_option("--nout", train_nout)->check(CLI::PositiveNumber);
    train->add_option("--model", train_model)
        ->transform(CLI::CheckedTransformer(model_names, CLI::ignore_case));
    train->add_option("--map", train_map, "identity or random")
        ->check(CLI::IsMember({"identity", "random"}));
    train->add_option("--load-net", train_load, "Start from a saved network");
    train->add_option("--save-net", train_save, "Save the trained network");

    // perturb
    auto* pert = app.add_subcommand("perturb", "Perturbation recovery on a learned map");
    CommonOpts pert_common;
    TrainerOpts pert_trainer;
    int pert_nin = 4, pert_nbulk = 200, pert_nout = 4, pert_period = 100, pert_events = 20;
    double pert_fraction = 0.1, pert_factor = 1.05;
    add_common(pert, pert_common);
    add_trainer(pert, pert_trainer);
    pert->add_option("--nin", pert_nin)->check(CLI::PositiveNumber);
    pert->add_option("--nbulk", pert_nbulk)->check(CLI::PositiveNumber);
    pert->add_option("--nout", pert_nout)->check(CLI::PositiveNumber);
    pert->add_option("--period", pert_period)->check(CLI::PositiveNumber);
    pert->add_option("--fraction", pert_fraction, "Fraction of devices perturbed")
        ->check(CLI::Range(0.0, 1.0));
    pert->add_option("--factor", pert_factor, "Resistance multiplier");
    pert->add_option("--events", pert_events)->check(CLI::NonNegativeNumber);

    // relearn
    auto* rel = app.add_subcommand("relearn", "Shuffle/relearn resistance statistics");
    CommonOpts rel_common;
    TrainerOpts rel_trainer;
    int rel_nin = 3, rel_nbulk = 400, rel_nout = 3, rel_cycles = 10, rel_reals = 10;
    std::string rel_order = "lex";
    add_common(rel, rel_common);
    add_trainer(rel, rel_trainer);
    rel->add_option("--nin", rel_nin)->check(CLI::PositiveNumber);
    rel->add_option("--nbulk", rel_nbulk)->check(CLI::PositiveNumber);
    rel->add_option("--nout", rel_nout)->check(CLI::PositiveNumber);
    rel->add_option("--cycles", rel_cycles, "Passes over the full map set")
        ->check(CLI::PositiveNumber);
    rel->add_option("--reals", rel_reals)->check(CLI::PositiveNumber);
    rel->add_option("--map-order", rel_order)->check(CLI::IsMember({"lex", "shuffled"}));

    // variants
    auto* var = app.add_subcommand("variants", "Construction-variant sweeps");
    CommonOpts var_common;
    TrainerOpts var_trainer;
    int var_nin = 4, var_nout = 4, var_reals = 100;
    std::vector<int> var_bulks{200};
    std::string var_tag = "random-polarity";
    add_common(var, var_common);
    add_trainer(var, var_trainer);
    var->add_option("--nin", var_nin)->check(CLI::PositiveNumber);
    var->add_option("--nout", var_nout)->check(CLI::PositiveNumber);
    var->add_option("--nbulk", var_bulks, "Comma-separated middle-layer sizes")->delimiter(',');
    var->add_option("--reals", var_reals)->check(CLI::PositiveNumber);
    var->add_option("--variant", var_tag)
        ->check(CLI::IsMember({"random-polarity", "equal-r"}));

    // device-demo
    auto* demo = app.add_subcommand("device-demo", "Single-device hysteresis trace");
    CommonOpts demo_common;
    double demo_beta = 0.9, demo_vup = 0.075, demo_rmin = 75.0, demo_rmax = 5000.0, demo_dt = 1.0;
    add_common(demo, demo_common);
    demo->add_option("--beta", demo_beta, "Rate coefficient");
    demo->add_option("--vup", demo_vup, "Threshold voltage")->check(CLI::PositiveNumber);
    demo->add_option("--rmin", demo_rmin)->check(CLI::PositiveNumber);
    demo->add_option("--rmax", demo_rmax)->check(CLI::PositiveNumber);
    demo->add_option("--dt", demo_dt, "Sample duration")->check(CLI::PositiveNumber);

    // toy
    auto* toy = app.add_subcommand("toy", "Abstract winner-take-all model");
    CommonOpts toy_common;
    int toy_nin = 6, toy_nmid = 300, toy_nout = 6, toy_reals = 100;
    std::vector<int> toy_mid_sizes;
    add_common(toy, toy_common);
    toy->add_option("--nin", toy_nin)->check(CLI::PositiveNumber);
    toy->add_option("--nmid", toy_nmid)->check(CLI::PositiveNumber);
    toy->add_option("--nout", toy_nout)->check(CLI::PositiveNumber);
    toy->add_option("--mid-sizes", toy_mid_sizes,
                    "Also sweep first-map learning time over these middle sizes")
        ->delimiter(',');
    toy->add_option("--reals", toy_reals)->check(CLI::PositiveNumber);

    if (argc <= 1) {
        std::cout << app.help();
        return 2;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*sweep) {
            apply_config_file(sweep, sweep_common.config);
            return run_sweep_cmd(sweep, sweep_common, sweep_trainer, sweep_nin, sweep_nout,
                                 sweep_bulks, sweep_reals, sweep_model);
        }
        if (*train) {
            apply_config_file(train, train_common.config);
            return run_train_cmd(train, train_common, train_trainer, train_nin, train_nbulk,
                                 train_nout, train_model, train_map, train_load, train_save);
        }
        if (*pert) {
            apply_config_file(pert, pert_common.config);
            return run_perturb_cmd(pert, pert_common, pert_trainer, pert_nin, pert_nbulk,
                                   pert_nout, pert_period, pert_fraction, pert_factor,
                                   pert_events);
        }
        if (*rel) {
            apply_config_file(rel, rel_common.config);
            return run_relearn_cmd(rel, rel_common, rel_trainer, rel_nin, rel_nbulk, rel_nout,
                                   rel_cycles, rel_reals, rel_order);
        }
        if (*var) {
            apply_config_file(var, var_common.config);
            return run_variants_cmd(var, var_common, var_trainer, var_nin, var_nout, var_bulks,
                                    var_reals, var_tag);
        }
        if (*demo) {
            apply_config_file(demo, demo_common.config);
            return run_device_demo_cmd(demo, demo_common, demo_beta, demo_vup, demo_rmin,
                                       demo_rmax, demo_dt);
        }
        if (*toy) {
            apply_config_file(toy, toy_common.config);
            return run_toy_cmd(toy_common, toy_nin, toy_nmid, toy_nout, toy_mid_sizes, toy_reals);
        }
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
