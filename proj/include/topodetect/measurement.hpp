#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "topodetect/power_flow.hpp"

namespace topodetect {

enum class DeviceKind { MicroPmu, Scada };

/// Unit in which a μPMU's angle sigma/accuracy are expressed.
enum class AngleUnit { Radian, Degree };

/// Noise model of one device class.
///
/// sigma is a relative standard deviation: of the nominal voltage for μPMU
/// magnitudes, of one angle unit for μPMU angles, of the measurand for SCADA.
/// accuracy bounds a systematic offset drawn uniformly in [-accuracy, accuracy]
/// (same scaling as sigma) once per device per run.
struct DeviceSpec {
    DeviceKind kind = DeviceKind::MicroPmu;
    double sigma = 0.0;
    double accuracy = 0.0;
    AngleUnit angle_unit = AngleUnit::Radian;

    static DeviceSpec micro_pmu(double sigma, double accuracy, AngleUnit unit = AngleUnit::Radian) {
        return {DeviceKind::MicroPmu, sigma, accuracy, unit};
    }
    static DeviceSpec scada(double sigma, double accuracy) {
        return {DeviceKind::Scada, sigma, accuracy, AngleUnit::Radian};
    }

    /// Angle std in degrees implied by sigma and angle_unit.
    double angle_sigma_deg() const;
    double angle_accuracy_deg() const;
    void validate() const;
};

struct PhasorMeasurement {
    int bus_id = 0;
    double vm_meas = 0.0;  // p.u.
    double va_meas = 0.0;  // degrees
    int time_index = 0;
};

struct ScadaPowerMeasurement {
    int bus_id = 0;
    double p_meas = 0.0;  // p.u. net injection
    double q_meas = 0.0;
    int time_index = 0;
};

/// Everything the detector sees at one time step.
struct MeasurementSet {
    std::vector<PhasorMeasurement> phasors;
    std::vector<ScadaPowerMeasurement> scada;
    std::uint64_t rng_seed = 0;

    /// N_pmu x 2 matrix, columns (vm p.u., va degrees), rows in phasor order.
    Eigen::MatrixXd measurement_matrix() const;
};

using RandomStream = std::mt19937_64;

/// Stream namespaces; combined with a bus id to form a device id.
enum class NoiseChannel : std::uint32_t {
    PmuNoise = 1,
    PmuOffset = 2,
    ScadaNoise = 3,
    ScadaOffset = 4,
};

constexpr std::uint64_t device_id(NoiseChannel channel, int bus_id) {
    return (static_cast<std::uint64_t>(channel) << 32) | static_cast<std::uint32_t>(bus_id);
}

/// Deterministic stream for (master_seed, trial_index, device_id). Distinct
/// tuples give statistically independent streams, regardless of the order in
/// which they are created.
RandomStream derive_rng_stream(std::uint64_t master_seed, std::uint64_t trial_index,
                               std::uint64_t device);

/// Identifies which random draws a sampling call uses. Offsets come from
/// run_index, per-sample noise from trial_index.
struct NoiseKey {
    std::uint64_t master_seed = 0;
    std::uint64_t run_index = 0;
    std::uint64_t trial_index = 0;
};

/// vm = |v| + offset + sigma*V0*z, va = angle(v) + offset + sigma_deg*z, with
/// V0 the nominal 1 p.u.
std::vector<PhasorMeasurement> sample_pmu(const PowerFlowSolution& truth,
                                          std::span<const int> pmu_buses,
                                          const DeviceSpec& spec, const NoiseKey& key,
                                          int time_index);

/// Multiplicative: p = p_true * (1 + offset + sigma*z); q likewise with its own draws.
std::vector<ScadaPowerMeasurement> sample_scada(const InjectionSnapshot& truth,
                                                std::span<const int> scada_buses,
                                                const DeviceSpec& spec, const NoiseKey& key,
                                                int time_index);

/// Injection snapshot as the SCADA system reports it; unmonitored buses get zero.
InjectionSnapshot injections_from_scada(std::size_t bus_count,
                                        std::span<const ScadaPowerMeasurement> readings);

}  // namespace topodetect
