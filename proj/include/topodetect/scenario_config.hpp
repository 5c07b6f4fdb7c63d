#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "topodetect/detector.hpp"
#include "topodetect/measurement.hpp"
#include "topodetect/power_flow.hpp"

namespace topodetect {

/// Everything needed to reproduce one Monte Carlo experiment.
struct ScenarioConfig {
    std::filesystem::path network;
    std::string profile = "default";  // "default" or a profile CSV path

    DeviceSpec pmu = DeviceSpec::micro_pmu(0.00025, 0.00025);
    DeviceSpec scada = DeviceSpec::scada(0.025, 0.0005);

    int repetitions = 20;
    std::vector<Criterion> criteria{std::begin(kAllCriteria), std::end(kAllCriteria)};
    std::vector<Signal> signals{std::begin(kAllSignals), std::end(kAllSignals)};
    std::uint64_t master_seed = 1;

    /// μPMU bus ids. Empty means every non-slack bus, or every bus when
    /// pmu_at_all_buses is set.
    std::vector<int> pmu_buses;
    bool pmu_at_all_buses = false;
    SolverOptions solver;

    void validate() const;
};

/// Key-value text, one `key = value` per line, '#' comments. Recognised keys:
/// network, profile, pmu_sigma, pmu_accuracy, pmu_angle_unit (radian|degree),
/// scada_sigma, scada_accuracy, repetitions, criteria, signals, master_seed,
/// pmu_buses (comma list or "all"). Relative paths resolve against base_dir.
ScenarioConfig parse_scenario_config(std::string_view text, const std::filesystem::path& base_dir,
                                     const std::string& source = "<string>");
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

/// Inverse of parse_scenario_config (paths written as given).
std::string format_scenario_config(const ScenarioConfig& cfg);

}  // namespace topodetect
