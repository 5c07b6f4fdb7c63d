#include "topodetect/detector.hpp"

#include <algorithm>
#include <cmath>

#include "topodetect/errors.hpp"
#include "topodetect/text.hpp"

namespace topodetect {

std::string_view to_string(Criterion c) {
    switch (c) {
    case Criterion::RMV: return "RMV";
    case Criterion::ARMV: return "ARMV";
    case Criterion::ORMV: return "ORMV";
    }
    return "?";
}

std::string_view to_string(Signal s) {
    return s == Signal::Angle ? "angle" : "magnitude";
}

Criterion parse_criterion(std::string_view name) {
    const auto n = text::lower(std::string(name));
    if (n == "rmv") return Criterion::RMV;
    if (n == "armv") return Criterion::ARMV;
    if (n == "ormv") return Criterion::ORMV;
    throw ConfigError("unknown criterion '" + std::string(name) + "'");
}

Signal parse_signal(std::string_view name) {
    const auto n = text::lower(std::string(name));
    if (n == "angle") return Signal::Angle;
    if (n == "magnitude") return Signal::Magnitude;
    throw ConfigError("unknown signal '" + std::string(name) + "'");
}

// --- library ----------------------------------------------------------------

TopologyLibrary::TopologyLibrary(std::vector<std::string> topology_ids,
                                 std::vector<int> time_indices,
                                 std::vector<PowerFlowSolution> solutions)
    : topology_ids_(std::move(topology_ids)),
      time_indices_(std::move(time_indices)),
      solutions_(std::move(solutions)) {
    if (solutions_.size() != topology_ids_.size() * time_indices_.size()) {
        throw ConsistencyError("library solution count does not match topologies x time steps");
    }
}

bool TopologyLibrary::has_time(int t) const {
    return std::find(time_indices_.begin(), time_indices_.end(), t) != time_indices_.end();
}

std::size_t TopologyLibrary::time_slot(int t) const {
    auto it = std::find(time_indices_.begin(), time_indices_.end(), t);
    if (it == time_indices_.end()) {
        throw ConsistencyError("library has no entries at t=" + std::to_string(t));
    }
    return static_cast<std::size_t>(it - time_indices_.begin());
}

const PowerFlowSolution& TopologyLibrary::at(std::size_t topology, int t) const {
    if (topology >= topology_ids_.size()) throw ConsistencyError("topology column out of range");
    return solutions_[topology * time_indices_.size() + time_slot(t)];
}

std::vector<AdmittanceMatrix> build_ybus_set(const NetworkGraph& graph,
                                             std::span<const TopologyConfig> topologies) {
    std::vector<AdmittanceMatrix> out;
    out.reserve(topologies.size());
    for (const auto& t : topologies) out.push_back(build_ybus(graph, t));
    return out;
}

TopologyLibrary build_library(std::span<const std::string> topology_ids,
                              std::span<const AdmittanceMatrix> ybuses,
                              std::span<const StepInjections> steps, const SolverOptions& opts) {
    if (topology_ids.size() != ybuses.size()) {
        throw ConsistencyError("one admittance matrix per topology required");
    }
    std::vector<int> times;
    times.reserve(steps.size());
    for (const auto& s : steps) times.push_back(s.time_index);

    std::vector<PowerFlowSolution> solutions;
    solutions.reserve(ybuses.size() * steps.size());
    for (std::size_t q = 0; q < ybuses.size(); ++q) {
        for (const auto& s : steps) {
            try {
                solutions.push_back(solve_newton_raphson(ybuses[q], s.injections, opts));
            } catch (const Error& e) {
                throw LibraryError(topology_ids[q], s.time_index, e.what());
            }
        }
    }
    return TopologyLibrary({topology_ids.begin(), topology_ids.end()}, std::move(times),
                           std::move(solutions));
}

TopologyLibrary build_library(const NetworkGraph& graph, std::span<const TopologyConfig> topologies,
                              std::span<const StepInjections> steps, const SolverOptions& opts) {
    std::vector<std::string> ids;
    for (const auto& t : topologies) ids.push_back(t.id);
    const auto ybuses = build_ybus_set(graph, topologies);
    return build_library(ids, ybuses, steps, opts);
}

TopologyLibrary build_library_from_scada(
    const NetworkGraph& graph, std::span<const TopologyConfig> topologies,
    std::span<const std::vector<ScadaPowerMeasurement>> readings_per_step,
    const SolverOptions& opts) {
    std::vector<StepInjections> steps;
    steps.reserve(readings_per_step.size());
    for (std::size_t k = 0; k < readings_per_step.size(); ++k) {
        const auto& readings = readings_per_step[k];
        const int t = readings.empty() ? static_cast<int>(k) : readings.front().time_index;
        for (const auto& r : readings) {
            if (r.time_index != t) throw ConsistencyError("SCADA readings from mixed time steps");
        }
        steps.push_back({t, injections_from_scada(graph.bus_count(), readings)});
    }
    return build_library(graph, topologies, steps, opts);
}

// --- difference matrices ----------------------------------------------------

DifferenceMatrices compute_difference_matrices(const MeasurementSet& measurements,
                                               const TopologyLibrary& library, int t) {
    const auto rows = static_cast<Eigen::Index>(measurements.phasors.size());
    const auto cols = static_cast<Eigen::Index>(library.topology_count());
    DifferenceMatrices d;
    d.adm.resize(rows, cols);
    d.mdm.resize(rows, cols);
    d.topology_ids = library.topology_ids();
    for (Eigen::Index p = 0; p < rows; ++p) {
        const auto& meas = measurements.phasors[static_cast<std::size_t>(p)];
        d.pmu_buses.push_back(meas.bus_id);
        const auto idx = static_cast<std::size_t>(meas.bus_id - 1);
        for (Eigen::Index q = 0; q < cols; ++q) {
            const auto& calc = library.at(static_cast<std::size_t>(q), t);
            if (meas.bus_id < 1 || idx >= calc.vm.size()) {
                throw ConsistencyError("μPMU bus " + std::to_string(meas.bus_id) +
                                       " absent from library solution");
            }
            d.adm(p, q) = std::abs(meas.va_meas - calc.va_deg[idx]);
            d.mdm(p, q) = std::abs(meas.vm_meas - calc.vm[idx]);
        }
    }
    return d;
}

void write_difference_csv(std::ostream& out, const DifferenceMatrices& m, Signal s) {
    const auto& mat = m.of(s);
    out << "bus";
    for (const auto& id : m.topology_ids) out << ',' << id;
    out << '\n';
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
        out << m.pmu_buses[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < mat.cols(); ++c) out << ',' << text::format_double(mat(r, c));
        out << '\n';
    }
}

// --- voting -----------------------------------------------------------------

std::optional<std::size_t> row_vote(const Eigen::MatrixXd& m, Eigen::Index row) {
    Eigen::Index best = 0;
    double lo = m(row, 0);
    double hi = m(row, 0);
    for (Eigen::Index c = 1; c < m.cols(); ++c) {
        const double v = m(row, c);
        if (v < lo) {
            lo = v;
            best = c;
        }
        hi = std::max(hi, v);
    }
    if (m.cols() > 1 && lo == hi) return std::nullopt;
    return static_cast<std::size_t>(best);
}

std::vector<std::optional<std::size_t>> row_votes(const Eigen::MatrixXd& m) {
    std::vector<std::optional<std::size_t>> votes;
    votes.reserve(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) votes.push_back(row_vote(m, r));
    return votes;
}

namespace {

void require_nonempty(const Eigen::MatrixXd& m) {
    if (m.rows() == 0 || m.cols() == 0) throw ConfigError("difference matrix is empty");
}

}  // namespace

DetectionOutcome detect_rmv(const Eigen::MatrixXd& m, Signal s) {
    require_nonempty(m);
    DetectionOutcome out{Criterion::RMV, s, std::nullopt, row_votes(m)};
    std::vector<int> tally(static_cast<std::size_t>(m.cols()), 0);
    for (const auto& v : out.per_row_votes) {
        if (v) ++tally[*v];
    }
    const auto top = std::max_element(tally.begin(), tally.end());
    if (*top == 0) return out;
    if (std::count(tally.begin(), tally.end(), *top) == 1) {
        out.verdict = static_cast<std::size_t>(top - tally.begin());
    }
    return out;
}

DetectionOutcome detect_armv(const Eigen::MatrixXd& m, Signal s) {
    require_nonempty(m);
    const Eigen::RowVectorXd means = m.colwise().mean();
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < means.size(); ++c) {
        if (means(c) < means(best)) best = c;
    }
    return {Criterion::ARMV, s, static_cast<std::size_t>(best), {}};
}

DetectionOutcome detect_ormv(const Eigen::MatrixXd& m, Signal s) {
    require_nonempty(m);
    DetectionOutcome out{Criterion::ORMV, s, std::nullopt, row_votes(m)};
    std::optional<std::size_t> common;
    for (const auto& v : out.per_row_votes) {
        if (!v) continue;
        if (common && *common != *v) return out;
        common = v;
    }
    out.verdict = common;
    return out;
}

DetectionOutcome detect(Criterion c, const Eigen::MatrixXd& m, Signal s) {
    switch (c) {
    case Criterion::RMV: return detect_rmv(m, s);
    case Criterion::ARMV: return detect_armv(m, s);
    case Criterion::ORMV: return detect_ormv(m, s);
    }
    throw ConfigError("unknown criterion");
}

}  // namespace topodetect
