#include "memlearn/device.hpp"

#include <algorithm>
#include <cassert>

namespace memlearn {

double bms_rate(double r, double v, const BmsParams& p)
{
    assert(r >= p.r_min && r <= p.r_max);
    if (v > p.v_threshold && r > p.r_min)
        return -p.beta * (v - p.v_threshold); // resistance decreases
    if (v < -p.v_threshold && r < p.r_max)
        return -p.beta * (v + p.v_threshold); // resistance increases
    return 0.0;
}

double bcm_rate(double x, double v, const BcmParams& p)
{
    assert(x >= 0.0 && x <= 1.0);
    const double r = p.r_max - x * (p.r_max - p.r_min);
    const double i = v / r;
    double f;
    if (x >= 1.0)
        f = (v < -p.v_th1) ? p.b : 0.0;
    else if (x <= 0.0)
        f = (v > p.v_th0) ? p.b : 0.0;
    else
        f = (v >= -p.v_t1 && v <= p.v_t0) ? p.a : p.b;
    return p.mu * p.r_min / (p.d * p.d) * i * f;
}

void apply_voltage_substep(DeviceRecord& dev, double v_terminal, double dt)
{
    assert(dt > 0.0);
    const double v = static_cast<double>(dev.polarity) * v_terminal;
    if (const auto* bms = std::get_if<BmsParams>(&dev.params)) {
        const double rate = bms_rate(dev.state, v, *bms);
        if (rate != 0.0)
            dev.state = std::clamp(dev.state + rate * dt, bms->r_min, bms->r_max);
    } else {
        const auto& bcm = std::get<BcmParams>(dev.params);
        const double rate = bcm_rate(dev.state, v, bcm);
        if (rate != 0.0)
            dev.state = std::clamp(dev.state + rate * dt, 0.0, 1.0);
    }
}

double resistance_of(const DeviceRecord& dev)
{
    if (std::holds_alternative<BmsParams>(dev.params))
        return dev.state;
    const auto& bcm = std::get<BcmParams>(dev.params);
    return bcm.r_max - dev.state * (bcm.r_max - bcm.r_min);
}

void set_resistance(DeviceRecord& dev, double r)
{
    if (const auto* bms = std::get_if<BmsParams>(&dev.params)) {
        dev.state = std::clamp(r, bms->r_min, bms->r_max);
        return;
    }
    const auto& bcm = std::get<BcmParams>(dev.params);
    const double x = (bcm.r_max - r) / (bcm.r_max - bcm.r_min);
    dev.state = std::clamp(x, 0.0, 1.0);
}

BcmParams reference_bcm_params()
{
    BcmParams p;
    p.a = 0.1494;
    p.b = 1.6182;
    p.v_t0 = 0.915;
    p.v_t1 = 1.3048;
    p.v_th0 = 4.7404;
    p.v_th1 = 2.4629;
    p.mu = 1e-16;
    p.d = 1e-8;
    p.r_min = 1e3;
    p.r_max = 1e4;
    return p;
}

DeviceRecord sample_bms_device(Rng& rng)
{
    BmsParams p;
    p.beta = rng.uniform(0.8, 1.0);
    p.v_threshold = rng.uniform(0.05, 0.1);
    p.r_min = rng.uniform(50.0, 100.0);
    p.r_max = 5000.0;
    DeviceRecord dev;
    dev.params = p;
    dev.polarity = +1;
    dev.state = p.r_min;
    return dev;
}

DeviceRecord sample_bcm_device(Rng& rng)
{
    BcmParams p = reference_bcm_params();
    p.r_min = rng.uniform(500.0, 1000.0);
    DeviceRecord dev;
    dev.params = p;
    dev.polarity = +1;
    dev.state = 1.0; // minimum resistance
    return dev;
}

} // namespace memlearn
