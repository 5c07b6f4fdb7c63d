#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "topodetect/detector.hpp"
#include "topodetect/errors.hpp"
#include "topodetect/network_io.hpp"
#include "topodetect/profiles.hpp"
#include "topodetect/scenario_config.hpp"

namespace topodetect {

/// A configured experiment with everything that doesn't depend on noise
/// precomputed: Y-bus per topology and the true state for every
/// (topology, time step). Immutable and shared read-only by trial workers.
class Scenario {
public:
    static Scenario prepare(const ScenarioConfig& config);
    static Scenario prepare(const ScenarioConfig& config, NetworkDefinition network,
                            InjectionSeries injections);

    const ScenarioConfig& config() const { return config_; }
    const NetworkDefinition& network() const { return network_; }
    const InjectionSeries& injections() const { return injections_; }
    const std::vector<int>& pmu_buses() const { return pmu_buses_; }
    const std::vector<std::string>& topology_ids() const { return topology_ids_; }
    const std::vector<AdmittanceMatrix>& ybuses() const { return ybuses_; }
    std::size_t topology_count() const { return topology_ids_.size(); }
    int step_count() const { return static_cast<int>(injections_.steps.size()); }

    const PowerFlowSolution& true_state(std::size_t topology, int t) const;

    /// Trials per full experiment: topologies x steps x repetitions.
    std::size_t trial_count() const;
    std::uint64_t trial_index(std::size_t topology, int t, int repetition) const;

private:
    ScenarioConfig config_;
    NetworkDefinition network_;
    InjectionSeries injections_;
    std::vector<int> pmu_buses_;
    std::vector<std::string> topology_ids_;
    std::vector<AdmittanceMatrix> ybuses_;
    std::vector<PowerFlowSolution> true_states_;  // [topology * steps + t]
};

/// Detection results of one (true topology, time step, repetition).
struct TrialOutcome {
    std::size_t true_topology = 0;
    int time_index = 0;
    int repetition = 0;
    std::vector<DetectionOutcome> outcomes;  // config criteria x signals, criterion-major
    std::array<std::vector<std::optional<std::size_t>>, 2> row_votes;  // per Signal
};

/// SCADA sample and topology library for one (time step, repetition). Shared
/// by all candidate true topologies at that step.
TopologyLibrary build_step_library(const Scenario& scenario, int t, int repetition,
                                   MeasurementSet* scada_out = nullptr);

/// μPMU sampling, difference matrices and voting against a prebuilt library.
TrialOutcome evaluate_trial(const Scenario& scenario, const TopologyLibrary& library,
                            std::size_t true_topology, int t, int repetition,
                            DifferenceMatrices* matrices_out = nullptr);

/// Full pipeline for one trial: true state -> SCADA + μPMU sampling ->
/// library -> difference matrices -> every configured criterion and signal.
TrialOutcome run_trial(const Scenario& scenario, std::size_t true_topology, int t, int repetition,
                       DifferenceMatrices* matrices_out = nullptr);

/// Correct / incorrect / inconclusive counters for one report cell.
struct RateCell {
    std::uint64_t correct = 0;
    std::uint64_t incorrect = 0;
    std::uint64_t inconclusive = 0;

    std::uint64_t n() const { return correct + incorrect + inconclusive; }
    double correct_rate() const { return n() ? static_cast<double>(correct) / static_cast<double>(n()) : 0.0; }
    double incorrect_rate() const { return n() ? static_cast<double>(incorrect) / static_cast<double>(n()) : 0.0; }
    double inconclusive_rate() const { return n() ? static_cast<double>(inconclusive) / static_cast<double>(n()) : 0.0; }

    RateCell& operator+=(const RateCell& o) {
        correct += o.correct;
        incorrect += o.incorrect;
        inconclusive += o.inconclusive;
        return *this;
    }
    bool operator==(const RateCell&) const = default;
};

inline constexpr int kTimeBands = 4;  // 6-hour bands starting at 00:00

/// Detection rates keyed by (true topology, criterion, signal) with per-bus,
/// aggregate and time-band breakdowns, plus a confusion matrix. Counters are
/// plain sums so trials may be added in any order.
class DetectionRateReport {
public:
    DetectionRateReport() = default;
    DetectionRateReport(std::vector<std::string> topology_ids, std::vector<int> pmu_buses,
                        std::vector<Criterion> criteria, std::vector<Signal> signals);

    void add(const TrialOutcome& trial);
    void merge(const DetectionRateReport& other);

    const std::vector<std::string>& topology_ids() const { return topology_ids_; }
    const std::vector<int>& pmu_buses() const { return pmu_buses_; }
    const std::vector<Criterion>& criteria() const { return criteria_; }
    const std::vector<Signal>& signals() const { return signals_; }

    const RateCell& aggregate(std::size_t topology, Criterion c, Signal s) const;
    const RateCell& per_bus(std::size_t topology, Criterion c, Signal s, std::size_t pmu_row) const;
    const RateCell& band(std::size_t topology, Criterion c, Signal s, int band) const;
    /// Count of trials with this (true, detected) pair; detected == topology
    /// count stands for "inconclusive".
    std::uint64_t confusion(Criterion c, Signal s, std::size_t true_topology, std::size_t detected) const;

    /// Pooled over every true topology.
    RateCell overall(Criterion c, Signal s) const;

    bool operator==(const DetectionRateReport&) const = default;

private:
    std::size_t key(std::size_t topology, std::size_t c, std::size_t s) const;
    std::size_t criterion_slot(Criterion c) const;
    std::size_t signal_slot(Signal s) const;

    std::vector<std::string> topology_ids_;
    std::vector<int> pmu_buses_;
    std::vector<Criterion> criteria_;
    std::vector<Signal> signals_;
    std::vector<RateCell> aggregate_;
    std::vector<RateCell> per_bus_;
    std::vector<RateCell> band_;
    std::vector<std::uint64_t> confusion_;
};

/// Raised after an experiment completes with failed trials.
class ExperimentError : public Error {
public:
    ExperimentError(std::size_t failed, std::size_t total, const std::string& first);
    std::size_t failed() const noexcept { return failed_; }

private:
    std::size_t failed_;
};

/// Reference implementation: every (repetition, step) unit in order on one thread.
DetectionRateReport run_experiment_serial(const Scenario& scenario);

/// OpenMP over (repetition, step) units; jobs <= 0 uses the runtime default.
/// Produces a report identical to run_experiment_serial.
DetectionRateReport run_experiment(const Scenario& scenario, int jobs = 0);

/// Writes rates.csv, confusion.csv and rates_by_band.csv into dir (created if
/// needed). Returns the written paths.
std::vector<std::filesystem::path> write_report(const DetectionRateReport& report,
                                                const std::filesystem::path& dir);

/// One line per (criterion, signal) with the pooled correct and inconclusive rates.
std::string format_summary(const DetectionRateReport& report);

}  // namespace topodetect
