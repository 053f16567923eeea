#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "memlearn/device.hpp"
#include "memlearn/rng.hpp"

namespace memlearn {

struct NetworkDims {
    int n_in = 0;
    int n_bulk = 0;
    int n_out = 0;

    int total_nodes() const { return n_in + n_bulk + n_out; }
    bool valid() const { return n_in >= 1 && n_bulk >= 1 && n_out >= 1; }
};

// Construction-time variations. The defaults give the baseline network:
// uniform polarity and randomly sampled initial resistances.
struct BuildVariant {
    bool random_polarity = false; // polarity +1/-1 with probability 1/2 each
    bool equal_initial_r = false; // every device starts at the same resistance
    double equal_r_value = 100.0; // used when equal_initial_r is set (BMS only)
};

// Two fully connected crossbars: layer1 couples input i to bulk j, layer2
// couples bulk j to output k. Row-major device tables.
struct NetworkState {
    NetworkDims dims;
    ModelKind model = ModelKind::Bms;
    std::vector<DeviceRecord> layer1; // index i * n_bulk + j
    std::vector<DeviceRecord> layer2; // index j * n_out + k

    DeviceRecord& l1(int i, int j) { return layer1[static_cast<size_t>(i) * dims.n_bulk + j]; }
    DeviceRecord& l2(int j, int k) { return layer2[static_cast<size_t>(j) * dims.n_out + k]; }
    const DeviceRecord& l1(int i, int j) const { return layer1[static_cast<size_t>(i) * dims.n_bulk + j]; }
    const DeviceRecord& l2(int j, int k) const { return layer2[static_cast<size_t>(j) * dims.n_out + k]; }

    std::size_t device_count() const { return layer1.size() + layer2.size(); }
};

NetworkState build_network(NetworkDims dims, ModelKind model, Rng& rng,
                           const BuildVariant& variant = {});

// Multiplies the resistance of floor(fraction * device_count) devices, chosen
// uniformly without replacement, by `factor` (clamped to the device's valid
// range). Returns the number of devices touched.
std::size_t perturb(NetworkState& net, double fraction, double factor, Rng& rng);

enum class ShuffleScope { Global, PerLayer };

// Randomly permutes whole device records (parameters, polarity and state)
// across edge slots. Global scope permutes over both layers at once.
void shuffle_devices(NetworkState& net, Rng& rng, ShuffleScope scope = ShuffleScope::Global);

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    std::uint64_t count = 0;
};

struct ResistanceStats {
    double mean = 0.0;
    double stddev = 0.0; // population standard deviation
    double cv = 0.0;     // stddev / mean
    std::vector<HistogramBin> histogram;
};

std::vector<double> all_resistances(const NetworkState& net);

// Fixed-width histogram with the first bin's lower edge at min(values).
std::vector<HistogramBin> histogram(const std::vector<double>& values, double bin_width);

// Same, but bin edges aligned to multiples of bin_width so histograms from
// different networks can be accumulated bin by bin.
std::vector<HistogramBin> histogram_aligned(const std::vector<double>& values, double bin_width);

ResistanceStats resistance_stats(const NetworkState& net, double bin_width);

// FNV-1a over every device's parameters, polarity and state. Two networks
// hash equal iff they are bit-identical.
std::uint64_t state_hash(const NetworkState& net);

// Versioned plain-text persistence, one device per line. Round-trips
// bit-exactly. load_network throws std::runtime_error naming the offending
// line on malformed input, version mismatch, or invariant violations.
void save_network(const NetworkState& net, std::ostream& out);
NetworkState load_network(std::istream& in);
void save_network_file(const NetworkState& net, const std::string& path);
NetworkState load_network_file(const std::string& path);

} // namespace memlearn
