#include "memlearn/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace memlearn {

namespace {

DeviceRecord sample_device(ModelKind model, Rng& rng, const BuildVariant& variant)
{
    DeviceRecord dev = (model == ModelKind::Bms) ? sample_bms_device(rng) : sample_bcm_device(rng);
    if (variant.equal_initial_r) {
        if (model != ModelKind::Bms)
            throw std::invalid_argument("equal initial resistance variant is defined for the BMS model only");
        auto& p = std::get<BmsParams>(dev.params);
        p.r_min = variant.equal_r_value;
        dev.state = variant.equal_r_value;
    }
    if (variant.random_polarity)
        dev.polarity = rng.coin() ? std::int8_t{+1} : std::int8_t{-1};
    return dev;
}

} // namespace

NetworkState build_network(NetworkDims dims, ModelKind model, Rng& rng, const BuildVariant& variant)
{
    if (!dims.valid())
        throw std::invalid_argument("network dimensions must all be >= 1");
    NetworkState net;
    net.dims = dims;
    net.model = model;
    net.layer1.reserve(static_cast<size_t>(dims.n_in) * dims.n_bulk);
    net.layer2.reserve(static_cast<size_t>(dims.n_bulk) * dims.n_out);
    for (int i = 0; i < dims.n_in; ++i)
        for (int j = 0; j < dims.n_bulk; ++j)
            net.layer1.push_back(sample_device(model, rng, variant));
    for (int j = 0; j < dims.n_bulk; ++j)
        for (int k = 0; k < dims.n_out; ++k)
            net.layer2.push_back(sample_device(model, rng, variant));
    return net;
}

std::size_t perturb(NetworkState& net, double fraction, double factor, Rng& rng)
{
    if (fraction < 0.0 || fraction > 1.0)
        throw std::invalid_argument("perturb fraction must be in [0, 1]");
    if (factor <= 0.0)
        throw std::invalid_argument("perturb factor must be positive");

    const std::size_t total = net.device_count();
    const std::size_t count = static_cast<std::size_t>(fraction * static_cast<double>(total));
    if (count == 0)
        return 0;

    std::vector<std::size_t> slots(total);
    std::iota(slots.begin(), slots.end(), std::size_t{0});
    // partial Fisher-Yates: the first `count` entries are a uniform sample
    // without replacement
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + rng.next_below(total - i);
        std::swap(slots[i], slots[j]);
    }
    const std::size_t n1 = net.layer1.size();
    for (std::size_t i = 0; i < count; ++i) {
        DeviceRecord& dev = slots[i] < n1 ? net.layer1[slots[i]] : net.layer2[slots[i] - n1];
        set_resistance(dev, resistance_of(dev) * factor);
    }
    return count;
}

void shuffle_devices(NetworkState& net, Rng& rng, ShuffleScope scope)
{
    const std::size_t n1 = net.layer1.size();
    auto slot = [&](std::size_t idx) -> DeviceRecord& {
        return idx < n1 ? net.layer1[idx] : net.layer2[idx - n1];
    };
    if (scope == ShuffleScope::Global) {
        const std::size_t n = net.device_count();
        for (std::size_t i = n - 1; i > 0; --i) {
            const std::size_t j = rng.next_below(i + 1);
            std::swap(slot(i), slot(j));
        }
    } else {
        for (auto* layer : {&net.layer1, &net.layer2}) {
            for (std::size_t i = layer->size() - 1; i > 0; --i) {
                const std::size_t j = rng.next_below(i + 1);
                std::swap((*layer)[i], (*layer)[j]);
            }
        }
    }
}

std::vector<double> all_resistances(const NetworkState& net)
{
    std::vector<double> r;
    r.reserve(net.device_count());
    for (const auto& dev : net.layer1)
        r.push_back(resistance_of(dev));
    for (const auto& dev : net.layer2)
        r.push_back(resistance_of(dev));
    return r;
}

std::vector<HistogramBin> histogram(const std::vector<double>& values, double bin_width)
{
    if (bin_width <= 0.0)
        throw std::invalid_argument("histogram bin width must be positive");
    if (values.empty())
        return {};
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const std::size_t nbins =
        static_cast<std::size_t>(std::floor((*mx - *mn) / bin_width)) + 1;
    std::vector<HistogramBin> bins(nbins);
    for (std::size_t b = 0; b < nbins; ++b) {
        bins[b].lo = *mn + static_cast<double>(b) * bin_width;
        bins[b].hi = *mn + static_cast<double>(b + 1) * bin_width;
    }
    for (double v : values) {
        auto idx = static_cast<std::size_t>(std::floor((v - *mn) / bin_width));
        if (idx >= nbins)
            idx = nbins - 1;
        ++bins[idx].count;
    }
    return bins;
}

std::vector<HistogramBin> histogram_aligned(const std::vector<double>& values, double bin_width)
{
    if (bin_width <= 0.0)
        throw std::invalid_argument("histogram bin width must be positive");
    if (values.empty())
        return {};
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const auto k0 = static_cast<long long>(std::floor(*mn / bin_width));
    const auto k1 = static_cast<long long>(std::floor(*mx / bin_width));
    const std::size_t nbins = static_cast<std::size_t>(k1 - k0) + 1;
    std::vector<HistogramBin> bins(nbins);
    for (std::size_t b = 0; b < nbins; ++b) {
        bins[b].lo = static_cast<double>(k0 + static_cast<long long>(b)) * bin_width;
        bins[b].hi = static_cast<double>(k0 + static_cast<long long>(b) + 1) * bin_width;
    }
    for (double v : values) {
        auto k = static_cast<long long>(std::floor(v / bin_width)) - k0;
        if (k < 0)
            k = 0;
        if (k >= static_cast<long long>(nbins))
            k = static_cast<long long>(nbins) - 1;
        ++bins[static_cast<std::size_t>(k)].count;
    }
    return bins;
}

ResistanceStats resistance_stats(const NetworkState& net, double bin_width)
{
    const std::vector<double> r = all_resistances(net);
    ResistanceStats s;
    const double n = static_cast<double>(r.size());
    s.mean = std::accumulate(r.begin(), r.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : r)
        ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / n);
    s.cv = s.mean != 0.0 ? s.stddev / s.mean : 0.0;
    s.histogram = histogram(r, bin_width);
    return s;
}

namespace {

inline void hash_bytes(std::uint64_t& h, const void* data, std::size_t len)
{
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ull;
    }
}

inline void hash_double(std::uint64_t& h, double v)
{
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    hash_bytes(h, &bits, sizeof bits);
}

void hash_device(std::uint64_t& h, const DeviceRecord& dev)
{
    if (const auto* p = std::get_if<BmsParams>(&dev.params)) {
        hash_double(h, p->beta);
        hash_double(h, p->v_threshold);
        hash_double(h, p->r_min);
        hash_double(h, p->r_max);
    } else {
        const auto& q = std::get<BcmParams>(dev.params);
        for (double v : {q.a, q.b, q.v_t0, q.v_t1, q.v_th0, q.v_th1, q.mu, q.d, q.r_min, q.r_max})
            hash_double(h, v);
    }
    hash_bytes(h, &dev.polarity, sizeof dev.polarity);
    hash_double(h, dev.state);
}

} // namespace

std::uint64_t state_hash(const NetworkState& net)
{
    std::uint64_t h = 0xCBF29CE484222325ull;
    const int model_tag = net.model == ModelKind::Bms ? 0 : 1;
    hash_bytes(h, &model_tag, sizeof model_tag);
    hash_bytes(h, &net.dims, sizeof net.dims);
    for (const auto& dev : net.layer1)
        hash_device(h, dev);
    for (const auto& dev : net.layer2)
        hash_device(h, dev);
    return h;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kMagic = "memlearn-network v1";

std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what)
{
    throw std::runtime_error("network file, line " + std::to_string(line_no) + ": " + what);
}

void write_device(std::ostream& out, const DeviceRecord& dev, int a, int b)
{
    out << a << ' ' << b;
    if (const auto* p = std::get_if<BmsParams>(&dev.params)) {
        out << ' ' << fmt_double(p->beta) << ' ' << fmt_double(p->v_threshold) << ' '
            << fmt_double(p->r_min) << ' ' << fmt_double(p->r_max);
    } else {
        const auto& q = std::get<BcmParams>(dev.params);
        for (double v : {q.a, q.b, q.v_t0, q.v_t1, q.v_th0, q.v_th1, q.mu, q.d, q.r_min, q.r_max})
            out << ' ' << fmt_double(v);
    }
    out << ' ' << static_cast<int>(dev.polarity) << ' ' << fmt_double(dev.state) << '\n';
}

DeviceRecord parse_device(const std::string& line, std::size_t line_no, ModelKind model,
                          int expect_a, int expect_b)
{
    std::istringstream ss(line);
    int a = -1, b = -1;
    if (!(ss >> a >> b))
        parse_fail(line_no, "expected device indices");
    if (a != expect_a || b != expect_b)
        parse_fail(line_no, "device indices out of order (expected " + std::to_string(expect_a) +
                               " " + std::to_string(expect_b) + ")");
    DeviceRecord dev;
    int polarity = 0;
    if (model == ModelKind::Bms) {
        BmsParams p{};
        if (!(ss >> p.beta >> p.v_threshold >> p.r_min >> p.r_max >> polarity >> dev.state))
            parse_fail(line_no, "malformed BMS device fields");
        if (!(p.beta > 0.0))
            parse_fail(line_no, "beta must be positive");
        if (!(p.v_threshold > 0.0))
            parse_fail(line_no, "v_threshold must be positive");
        if (!(0.0 < p.r_min && p.r_min < p.r_max))
            parse_fail(line_no, "requires 0 < r_min < r_max");
        if (dev.state < p.r_min || dev.state > p.r_max)
            parse_fail(line_no, "resistance outside [r_min, r_max]");
        dev.params = p;
    } else {
        BcmParams p{};
        if (!(ss >> p.a >> p.b >> p.v_t0 >> p.v_t1 >> p.v_th0 >> p.v_th1 >> p.mu >> p.d >>
              p.r_min >> p.r_max >> polarity >> dev.state))
            parse_fail(line_no, "malformed BCM device fields");
        if (!(0.0 < p.a && p.a < p.b))
            parse_fail(line_no, "requires 0 < a < b");
        if (p.v_t0 < 0.0 || p.v_t1 < 0.0 || p.v_th0 < 0.0 || p.v_th1 < 0.0)
            parse_fail(line_no, "voltage thresholds must be nonnegative");
        if (!(p.mu > 0.0) || !(p.d > 0.0))
            parse_fail(line_no, "mu and d must be positive");
        if (!(0.0 < p.r_min && p.r_min < p.r_max))
            parse_fail(line_no, "requires 0 < r_min < r_max");
        if (dev.state < 0.0 || dev.state > 1.0)
            parse_fail(line_no, "internal state outside [0, 1]");
        dev.params = p;
    }
    std::string trailing;
    if (ss >> trailing)
        parse_fail(line_no, "unexpected trailing fields");
    if (polarity != 1 && polarity != -1)
        parse_fail(line_no, "polarity must be +1 or -1");
    dev.polarity = static_cast<std::int8_t>(polarity);
    return dev;
}

// Reads the next non-comment line; returns false at end of file.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no)
{
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!line.empty() && line[0] != '#')
            return true;
    }
    return false;
}

} // namespace

void save_network(const NetworkState& net, std::ostream& out)
{
    out << kMagic << '\n';
    out << "model " << (net.model == ModelKind::Bms ? "bms" : "bcm") << '\n';
    out << "dims " << net.dims.n_in << ' ' << net.dims.n_bulk << ' ' << net.dims.n_out << '\n';
    out << "layer1\n";
    for (int i = 0; i < net.dims.n_in; ++i)
        for (int j = 0; j < net.dims.n_bulk; ++j)
            write_device(out, net.l1(i, j), i, j);
    out << "layer2\n";
    for (int j = 0; j < net.dims.n_bulk; ++j)
        for (int k = 0; k < net.dims.n_out; ++k)
            write_device(out, net.l2(j, k), j, k);
    out << "end\n";
}

NetworkState load_network(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    if (!next_line(in, line, line_no))
        throw std::runtime_error("network file: empty input");
    if (line != kMagic)
        throw std::runtime_error("network file: unsupported format/version (expected '" +
                                 std::string(kMagic) + "')");

    NetworkState net;
    if (!next_line(in, line, line_no))
        throw std::runtime_error("network file: missing model section");
    {
        std::istringstream ss(line);
        std::string key, value;
        ss >> key >> value;
        if (key != "model" || (value != "bms" && value != "bcm"))
            parse_fail(line_no, "expected 'model bms|bcm'");
        net.model = value == "bms" ? ModelKind::Bms : ModelKind::Bcm;
    }
    if (!next_line(in, line, line_no))
        throw std::runtime_error("network file: missing dims section");
    {
        std::istringstream ss(line);
        std::string key;
        ss >> key >> net.dims.n_in >> net.dims.n_bulk >> net.dims.n_out;
        if (key != "dims" || ss.fail())
            parse_fail(line_no, "expected 'dims <n_in> <n_bulk> <n_out>'");
        if (!net.dims.valid())
            parse_fail(line_no, "dims must all be >= 1");
    }
    if (!next_line(in, line, line_no) || line != "layer1")
        throw std::runtime_error("network file: missing layer1 section");
    net.layer1.reserve(static_cast<size_t>(net.dims.n_in) * net.dims.n_bulk);
    for (int i = 0; i < net.dims.n_in; ++i)
        for (int j = 0; j < net.dims.n_bulk; ++j) {
            if (!next_line(in, line, line_no))
                throw std::runtime_error("network file: truncated layer1 section");
            net.layer1.push_back(parse_device(line, line_no, net.model, i, j));
        }
    if (!next_line(in, line, line_no) || line != "layer2")
        throw std::runtime_error("network file: missing layer2 section");
    net.layer2.reserve(static_cast<size_t>(net.dims.n_bulk) * net.dims.n_out);
    for (int j = 0; j < net.dims.n_bulk; ++j)
        for (int k = 0; k < net.dims.n_out; ++k) {
            if (!next_line(in, line, line_no))
                throw std::runtime_error("network file: truncated layer2 section");
            net.layer2.push_back(parse_device(line, line_no, net.model, j, k));
        }
    if (!next_line(in, line, line_no) || line != "end")
        throw std::runtime_error("network file: missing end marker");
    return net;
}

void save_network_file(const NetworkState& net, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    save_network(net, out);
    if (!out.good())
        throw std::runtime_error("write failed: " + path);
}

NetworkState load_network_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open: " + path);
    return load_network(in);
}

} // namespace memlearn
