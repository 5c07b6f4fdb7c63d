#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "topodetect/measurement.hpp"
#include "topodetect/network.hpp"
#include "topodetect/power_flow.hpp"

namespace topodetect {

enum class Criterion { RMV, ARMV, ORMV };
enum class Signal { Angle, Magnitude };

std::string_view to_string(Criterion c);
std::string_view to_string(Signal s);
Criterion parse_criterion(std::string_view name);
Signal parse_signal(std::string_view name);

inline constexpr Criterion kAllCriteria[] = {Criterion::RMV, Criterion::ARMV, Criterion::ORMV};
inline constexpr Signal kAllSignals[] = {Signal::Angle, Signal::Magnitude};

/// Injections the library is computed from at one time step.
struct StepInjections {
    int time_index = 0;
    InjectionSnapshot injections;
};

/// Calculated states for every candidate topology at every library time step.
class TopologyLibrary {
public:
    TopologyLibrary() = default;
    TopologyLibrary(std::vector<std::string> topology_ids, std::vector<int> time_indices,
                    std::vector<PowerFlowSolution> solutions);

    const std::vector<std::string>& topology_ids() const { return topology_ids_; }
    const std::vector<int>& time_indices() const { return time_indices_; }
    std::size_t topology_count() const { return topology_ids_.size(); }
    std::size_t size() const { return solutions_.size(); }

    bool has_time(int t) const;
    /// Throws ConsistencyError if t is not in the library.
    const PowerFlowSolution& at(std::size_t topology, int t) const;

private:
    std::size_t time_slot(int t) const;

    std::vector<std::string> topology_ids_;
    std::vector<int> time_indices_;
    std::vector<PowerFlowSolution> solutions_;  // [topology * times + slot]
};

/// One Y-bus per topology. Throws TopologyError on the first disconnected one.
std::vector<AdmittanceMatrix> build_ybus_set(const NetworkGraph& graph,
                                             std::span<const TopologyConfig> topologies);

/// Runs Newton-Raphson for every (topology, step). Throws LibraryError naming
/// the failing (topology, t).
TopologyLibrary build_library(std::span<const std::string> topology_ids,
                              std::span<const AdmittanceMatrix> ybuses,
                              std::span<const StepInjections> steps,
                              const SolverOptions& opts = {});

TopologyLibrary build_library(const NetworkGraph& graph, std::span<const TopologyConfig> topologies,
                              std::span<const StepInjections> steps,
                              const SolverOptions& opts = {});

/// Library from SCADA readings, one reading list per time step.
TopologyLibrary build_library_from_scada(
    const NetworkGraph& graph, std::span<const TopologyConfig> topologies,
    std::span<const std::vector<ScadaPowerMeasurement>> readings_per_step,
    const SolverOptions& opts = {});

/// |measured - calculated| per (μPMU row, topology column).
struct DifferenceMatrices {
    Eigen::MatrixXd adm;  // degrees
    Eigen::MatrixXd mdm;  // p.u.
    std::vector<int> pmu_buses;
    std::vector<std::string> topology_ids;

    const Eigen::MatrixXd& of(Signal s) const { return s == Signal::Angle ? adm : mdm; }
};

DifferenceMatrices compute_difference_matrices(const MeasurementSet& measurements,
                                               const TopologyLibrary& library, int t);

/// Writes one matrix as CSV: header `bus,<topology ids...>`, one row per μPMU bus.
void write_difference_csv(std::ostream& out, const DifferenceMatrices& m, Signal s);

struct DetectionOutcome {
    Criterion criterion = Criterion::RMV;
    Signal signal = Signal::Angle;
    std::optional<std::size_t> verdict;  // topology column; nullopt = inconclusive
    std::vector<std::optional<std::size_t>> per_row_votes;  // empty for ARMV

    bool conclusive() const { return verdict.has_value(); }
};

/// Column of the row minimum, lowest index on ties. A row whose entries are
/// all equal carries no information and abstains (nullopt).
std::optional<std::size_t> row_vote(const Eigen::MatrixXd& m, Eigen::Index row);
std::vector<std::optional<std::size_t>> row_votes(const Eigen::MatrixXd& m);

/// Majority of per-row votes; a tie for first place, or no votes, is inconclusive.
DetectionOutcome detect_rmv(const Eigen::MatrixXd& m, Signal s);
/// argmin over columns of the column mean.
DetectionOutcome detect_armv(const Eigen::MatrixXd& m, Signal s);
/// Conclusive only when every voting row picks the same column.
DetectionOutcome detect_ormv(const Eigen::MatrixXd& m, Signal s);

DetectionOutcome detect(Criterion c, const Eigen::MatrixXd& m, Signal s);

}  // namespace topodetect
