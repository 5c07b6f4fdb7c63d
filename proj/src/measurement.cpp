#include "topodetect/measurement.hpp"

#include <cmath>
#include <numbers>

#include "topodetect/errors.hpp"

namespace topodetect {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kNominalVoltage = 1.0;

double standard_normal(RandomStream& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    return dist(rng);
}

// Uniform in [-bound, bound]; exactly zero when bound is zero.
double symmetric_uniform(RandomStream& rng, double bound) {
    const double u = std::generate_canonical<double, 53>(rng);
    return bound * (2.0 * u - 1.0);
}

std::uint32_t lo(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
std::uint32_t hi(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

}  // namespace

double DeviceSpec::angle_sigma_deg() const {
    return angle_unit == AngleUnit::Radian ? sigma * kRadToDeg : sigma;
}

double DeviceSpec::angle_accuracy_deg() const {
    return angle_unit == AngleUnit::Radian ? accuracy * kRadToDeg : accuracy;
}

void DeviceSpec::validate() const {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("device sigma must be finite and >= 0");
    if (!(accuracy >= 0.0) || !std::isfinite(accuracy)) throw ConfigError("device accuracy must be finite and >= 0");
}

Eigen::MatrixXd MeasurementSet::measurement_matrix() const {
    Eigen::MatrixXd y(static_cast<Eigen::Index>(phasors.size()), 2);
    for (std::size_t i = 0; i < phasors.size(); ++i) {
        y(static_cast<Eigen::Index>(i), 0) = phasors[i].vm_meas;
        y(static_cast<Eigen::Index>(i), 1) = phasors[i].va_meas;
    }
    return y;
}

RandomStream derive_rng_stream(std::uint64_t master_seed, std::uint64_t trial_index,
                               std::uint64_t device) {
    std::seed_seq seq{lo(master_seed), hi(master_seed), lo(trial_index),
                      hi(trial_index), lo(device),      hi(device)};
    return RandomStream(seq);
}

std::vector<PhasorMeasurement> sample_pmu(const PowerFlowSolution& truth,
                                          std::span<const int> pmu_buses,
                                          const DeviceSpec& spec, const NoiseKey& key,
                                          int time_index) {
    if (spec.kind != DeviceKind::MicroPmu) throw ConfigError("sample_pmu needs a μPMU device spec");
    spec.validate();
    const double vm_sigma = spec.sigma * kNominalVoltage;
    const double va_sigma = spec.angle_sigma_deg();

    std::vector<PhasorMeasurement> out;
    out.reserve(pmu_buses.size());
    for (int bus : pmu_buses) {
        const auto idx = static_cast<std::size_t>(bus - 1);
        if (bus < 1 || idx >= truth.vm.size()) {
            throw ConsistencyError("μPMU bus " + std::to_string(bus) + " not in power-flow solution");
        }
        auto offset_rng = derive_rng_stream(key.master_seed, key.run_index,
                                            device_id(NoiseChannel::PmuOffset, bus));
        const double vm_offset = symmetric_uniform(offset_rng, spec.accuracy * kNominalVoltage);
        const double va_offset = symmetric_uniform(offset_rng, spec.angle_accuracy_deg());

        auto noise_rng = derive_rng_stream(key.master_seed, key.trial_index,
                                           device_id(NoiseChannel::PmuNoise, bus));
        const double zv = standard_normal(noise_rng);
        const double za = standard_normal(noise_rng);

        out.push_back({bus, truth.vm[idx] + vm_offset + vm_sigma * zv,
                       truth.va_deg[idx] + va_offset + va_sigma * za, time_index});
    }
    return out;
}

std::vector<ScadaPowerMeasurement> sample_scada(const InjectionSnapshot& truth,
                                                std::span<const int> scada_buses,
                                                const DeviceSpec& spec, const NoiseKey& key,
                                                int time_index) {
    if (spec.kind != DeviceKind::Scada) throw ConfigError("sample_scada needs a SCADA device spec");
    spec.validate();
    std::vector<ScadaPowerMeasurement> out;
    out.reserve(scada_buses.size());
    for (int bus : scada_buses) {
        const auto idx = static_cast<std::size_t>(bus - 1);
        if (bus < 1 || idx >= truth.power.size()) {
            throw ConsistencyError("SCADA bus " + std::to_string(bus) + " not in injection snapshot");
        }
        auto offset_rng = derive_rng_stream(key.master_seed, key.run_index,
                                            device_id(NoiseChannel::ScadaOffset, bus));
        const double p_offset = symmetric_uniform(offset_rng, spec.accuracy);
        const double q_offset = symmetric_uniform(offset_rng, spec.accuracy);

        auto noise_rng = derive_rng_stream(key.master_seed, key.trial_index,
                                           device_id(NoiseChannel::ScadaNoise, bus));
        const double zp = standard_normal(noise_rng);
        const double zq = standard_normal(noise_rng);

        const auto s = truth.power[idx];
        out.push_back({bus, s.real() * (1.0 + p_offset + spec.sigma * zp),
                       s.imag() * (1.0 + q_offset + spec.sigma * zq), time_index});
    }
    return out;
}

InjectionSnapshot injections_from_scada(std::size_t bus_count,
                                        std::span<const ScadaPowerMeasurement> readings) {
    auto inj = InjectionSnapshot::zeros(bus_count);
    for (const auto& r : readings) {
        const auto idx = static_cast<std::size_t>(r.bus_id - 1);
        if (r.bus_id < 1 || idx >= bus_count) {
            throw ConsistencyError("SCADA reading for unknown bus " + std::to_string(r.bus_id));
        }
        inj.power[idx] = {r.p_meas, r.q_meas};
    }
    return inj;
}

}  // namespace topodetect
