#pragma once

#include <cstdint>
#include <variant>

#include "memlearn/rng.hpp"

namespace memlearn {

enum class ModelKind { Bms, Bcm };

// Bipolar memristive system with threshold. Resistance moves only while the
// applied voltage magnitude exceeds v_threshold, at a rate proportional to the
// excess, and saturates at [r_min, r_max].
struct BmsParams {
    double beta;        // resistance change per volt per time unit, > 0
    double v_threshold; // volts, > 0
    double r_min;       // ohms
    double r_max;       // ohms, > r_min
};

// Boundary condition memristor. The internal state x in [0, 1] maps linearly
// to resistance (x = 1 is r_min) and drifts at a rate proportional to the
// device current, with slow/fast branches selected by four voltage thresholds.
struct BcmParams {
    double a;     // slow dimensionless rate, 0 < a < b
    double b;     // fast dimensionless rate
    double v_t0;  // volts, upper edge of the interior slow branch
    double v_t1;  // volts, lower edge (applied as -v_t1)
    double v_th0; // volts, escape threshold out of x = 0
    double v_th1; // volts, escape threshold out of x = 1 (applied as -v_th1)
    double mu;    // mobility, m^2 V^-1 s^-1
    double d;     // film thickness, m
    double r_min; // ohms
    double r_max; // ohms
};

// One memristor: quenched parameters, orientation, and mutable state.
// For BMS the state is the resistance in ohms; for BCM it is the normalized
// internal state x in [0, 1].
struct DeviceRecord {
    std::variant<BmsParams, BcmParams> params;
    std::int8_t polarity = +1; // with +1, a negative terminal voltage raises resistance
    double state = 0.0;

    ModelKind kind() const
    {
        return std::holds_alternative<BmsParams>(params) ? ModelKind::Bms : ModelKind::Bcm;
    }
};

// dR/dt for a BMS device at resistance r under device voltage v.
double bms_rate(double r, double v, const BmsParams& p);

// dx/dt for a BCM device at state x under device voltage v.
double bcm_rate(double x, double v, const BcmParams& p);

// One explicit Euler substep of duration dt. v_terminal is the voltage drop
// across the device in circuit orientation; the device's polarity decides the
// sign it actually experiences. State is clamped to its valid range.
void apply_voltage_substep(DeviceRecord& dev, double v_terminal, double dt);

double resistance_of(const DeviceRecord& dev);

// Sets the device to the given resistance, clamped to [r_min, r_max]
// (for BCM the internal state is recomputed from the resistance map).
void set_resistance(DeviceRecord& dev, double r);

// The BCM parameter set that reproduces the TiO2 device characteristics,
// with r_min left to per-device sampling.
BcmParams reference_bcm_params();

// Fresh BMS device: beta ~ U(0.8, 1), v_threshold ~ U(0.05, 0.1),
// r_min ~ U(50, 100), r_max = 5000, initial R = r_min, polarity +1.
DeviceRecord sample_bms_device(Rng& rng);

// Fresh BCM device: reference parameters with r_min ~ U(500, 1000) ohm,
// initial state x = 1 (minimum resistance), polarity +1.
DeviceRecord sample_bcm_device(Rng& rng);

} // namespace memlearn
