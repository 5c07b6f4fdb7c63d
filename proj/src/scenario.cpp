#include "topodetect/scenario.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include <omp.h>

namespace topodetect {

// --- Scenario ---------------------------------------------------------------

Scenario Scenario::prepare(const ScenarioConfig& config) {
    auto network = load_network(config.network);
    auto injections = resolve_profile(config.profile, network.graph);
    return prepare(config, std::move(network), std::move(injections));
}

Scenario Scenario::prepare(const ScenarioConfig& config, NetworkDefinition network,
                           InjectionSeries injections) {
    config.validate();
    if (network.topologies.empty()) throw ConfigError("network defines no candidate topologies");
    if (injections.steps.empty()) throw ConfigError("injection series is empty");

    Scenario s;
    s.config_ = config;
    s.network_ = std::move(network);
    s.injections_ = std::move(injections);

    const auto& graph = s.network_.graph;
    if (config.pmu_at_all_buses) {
        for (const auto& b : graph.buses) s.pmu_buses_.push_back(b.id);
    } else if (config.pmu_buses.empty()) {
        for (const auto& b : graph.buses) {
            if (b.kind != BusKind::Slack) s.pmu_buses_.push_back(b.id);
        }
    } else {
        std::set<int> unique;
        for (int b : config.pmu_buses) {
            graph.bus_index(b);  // throws on unknown ids
            if (!unique.insert(b).second) throw ConfigError("duplicate μPMU bus " + std::to_string(b));
        }
        s.pmu_buses_ = config.pmu_buses;
    }
    if (s.pmu_buses_.empty()) throw ConfigError("no μPMU buses");

    for (const auto& t : s.network_.topologies) s.topology_ids_.push_back(t.id);
    s.ybuses_ = build_ybus_set(graph, s.network_.topologies);

    const int steps = s.step_count();
    s.true_states_.reserve(s.ybuses_.size() * static_cast<std::size_t>(steps));
    for (std::size_t q = 0; q < s.ybuses_.size(); ++q) {
        for (int t = 0; t < steps; ++t) {
            try {
                s.true_states_.push_back(solve_newton_raphson(s.ybuses_[q], s.injections_.at(t), config.solver));
            } catch (const Error& e) {
                throw LibraryError(s.topology_ids_[q], t, std::string("true state: ") + e.what());
            }
        }
    }
    return s;
}

const PowerFlowSolution& Scenario::true_state(std::size_t topology, int t) const {
    if (topology >= topology_ids_.size() || t < 0 || t >= step_count()) {
        throw ConfigError("true state (" + std::to_string(topology) + ", " + std::to_string(t) + ") out of range");
    }
    return true_states_[topology * static_cast<std::size_t>(step_count()) + static_cast<std::size_t>(t)];
}

std::size_t Scenario::trial_count() const {
    return topology_count() * static_cast<std::size_t>(step_count()) *
           static_cast<std::size_t>(config_.repetitions);
}

std::uint64_t Scenario::trial_index(std::size_t topology, int t, int repetition) const {
    const auto nt = static_cast<std::uint64_t>(topology_count());
    const auto steps = static_cast<std::uint64_t>(step_count());
    return (static_cast<std::uint64_t>(repetition) * nt + topology) * steps + static_cast<std::uint64_t>(t);
}

// --- trials -----------------------------------------------------------------

TopologyLibrary build_step_library(const Scenario& scenario, int t, int repetition,
                                   MeasurementSet* scada_out) {
    const auto& cfg = scenario.config();
    const auto steps = static_cast<std::uint64_t>(scenario.step_count());
    const NoiseKey key{cfg.master_seed, static_cast<std::uint64_t>(repetition),
                       static_cast<std::uint64_t>(repetition) * steps + static_cast<std::uint64_t>(t)};
    auto readings = sample_scada(scenario.injections().at(t), scenario.injections().monitored_buses,
                                 cfg.scada, key, t);
    const StepInjections step{t, injections_from_scada(scenario.network().graph.bus_count(), readings)};
    auto library = build_library(scenario.topology_ids(), scenario.ybuses(), std::span(&step, 1), cfg.solver);
    if (scada_out) {
        scada_out->scada = std::move(readings);
        scada_out->rng_seed = cfg.master_seed;
    }
    return library;
}

TrialOutcome evaluate_trial(const Scenario& scenario, const TopologyLibrary& library,
                            std::size_t true_topology, int t, int repetition,
                            DifferenceMatrices* matrices_out) {
    const auto& cfg = scenario.config();
    const NoiseKey key{cfg.master_seed, static_cast<std::uint64_t>(repetition),
                       scenario.trial_index(true_topology, t, repetition)};

    MeasurementSet meas;
    meas.rng_seed = cfg.master_seed;
    meas.phasors = sample_pmu(scenario.true_state(true_topology, t), scenario.pmu_buses(), cfg.pmu, key, t);

    auto diff = compute_difference_matrices(meas, library, t);

    TrialOutcome out;
    out.true_topology = true_topology;
    out.time_index = t;
    out.repetition = repetition;
    for (auto c : cfg.criteria) {
        for (auto s : cfg.signals) out.outcomes.push_back(detect(c, diff.of(s), s));
    }
    for (auto s : cfg.signals) out.row_votes[static_cast<std::size_t>(s)] = row_votes(diff.of(s));
    if (matrices_out) *matrices_out = std::move(diff);
    return out;
}

TrialOutcome run_trial(const Scenario& scenario, std::size_t true_topology, int t, int repetition,
                       DifferenceMatrices* matrices_out) {
    const auto library = build_step_library(scenario, t, repetition);
    return evaluate_trial(scenario, library, true_topology, t, repetition, matrices_out);
}

// --- report -----------------------------------------------------------------

DetectionRateReport::DetectionRateReport(std::vector<std::string> topology_ids,
                                         std::vector<int> pmu_buses,
                                         std::vector<Criterion> criteria,
                                         std::vector<Signal> signals)
    : topology_ids_(std::move(topology_ids)),
      pmu_buses_(std::move(pmu_buses)),
      criteria_(std::move(criteria)),
      signals_(std::move(signals)) {
    const auto cells = topology_ids_.size() * criteria_.size() * signals_.size();
    aggregate_.resize(cells);
    per_bus_.resize(cells * pmu_buses_.size());
    band_.resize(cells * kTimeBands);
    const auto nt = topology_ids_.size();
    confusion_.resize(criteria_.size() * signals_.size() * nt * (nt + 1));
}

std::size_t DetectionRateReport::criterion_slot(Criterion c) const {
    auto it = std::find(criteria_.begin(), criteria_.end(), c);
    if (it == criteria_.end()) throw ConfigError("criterion " + std::string(to_string(c)) + " not in report");
    return static_cast<std::size_t>(it - criteria_.begin());
}

std::size_t DetectionRateReport::signal_slot(Signal s) const {
    auto it = std::find(signals_.begin(), signals_.end(), s);
    if (it == signals_.end()) throw ConfigError("signal " + std::string(to_string(s)) + " not in report");
    return static_cast<std::size_t>(it - signals_.begin());
}

std::size_t DetectionRateReport::key(std::size_t topology, std::size_t c, std::size_t s) const {
    return (topology * criteria_.size() + c) * signals_.size() + s;
}

namespace {

void tally(RateCell& cell, const std::optional<std::size_t>& verdict, std::size_t truth) {
    if (!verdict) ++cell.inconclusive;
    else if (*verdict == truth) ++cell.correct;
    else ++cell.incorrect;
}

int time_band(int t) {
    return std::clamp(t * kTimeBands / kStepsPerDay, 0, kTimeBands - 1);
}

}  // namespace

void DetectionRateReport::add(const TrialOutcome& trial) {
    const auto q = trial.true_topology;
    const auto nt = topology_ids_.size();
    const auto nb = pmu_buses_.size();
    for (const auto& o : trial.outcomes) {
        const auto c = criterion_slot(o.criterion);
        const auto s = signal_slot(o.signal);
        const auto k = key(q, c, s);
        tally(aggregate_[k], o.verdict, q);
        tally(band_[k * kTimeBands + static_cast<std::size_t>(time_band(trial.time_index))], o.verdict, q);
        const auto detected = o.verdict.value_or(nt);
        ++confusion_[((c * signals_.size() + s) * nt + q) * (nt + 1) + detected];

        const auto& votes = trial.row_votes[static_cast<std::size_t>(o.signal)];
        for (std::size_t b = 0; b < nb && b < votes.size(); ++b) tally(per_bus_[k * nb + b], votes[b], q);
    }
}

void DetectionRateReport::merge(const DetectionRateReport& other) {
    if (other.topology_ids_ != topology_ids_ || other.pmu_buses_ != pmu_buses_ ||
        other.criteria_ != criteria_ || other.signals_ != signals_) {
        throw ConsistencyError("cannot merge reports with different layouts");
    }
    for (std::size_t i = 0; i < aggregate_.size(); ++i) aggregate_[i] += other.aggregate_[i];
    for (std::size_t i = 0; i < per_bus_.size(); ++i) per_bus_[i] += other.per_bus_[i];
    for (std::size_t i = 0; i < band_.size(); ++i) band_[i] += other.band_[i];
    for (std::size_t i = 0; i < confusion_.size(); ++i) confusion_[i] += other.confusion_[i];
}

const RateCell& DetectionRateReport::aggregate(std::size_t topology, Criterion c, Signal s) const {
    return aggregate_.at(key(topology, criterion_slot(c), signal_slot(s)));
}

const RateCell& DetectionRateReport::per_bus(std::size_t topology, Criterion c, Signal s,
                                             std::size_t pmu_row) const {
    if (pmu_row >= pmu_buses_.size()) throw ConfigError("μPMU row out of range");
    return per_bus_.at(key(topology, criterion_slot(c), signal_slot(s)) * pmu_buses_.size() + pmu_row);
}

const RateCell& DetectionRateReport::band(std::size_t topology, Criterion c, Signal s, int b) const {
    if (b < 0 || b >= kTimeBands) throw ConfigError("time band out of range");
    return band_.at(key(topology, criterion_slot(c), signal_slot(s)) * kTimeBands + static_cast<std::size_t>(b));
}

std::uint64_t DetectionRateReport::confusion(Criterion c, Signal s, std::size_t true_topology,
                                             std::size_t detected) const {
    const auto nt = topology_ids_.size();
    if (true_topology >= nt || detected > nt) throw ConfigError("confusion index out of range");
    return confusion_.at(((criterion_slot(c) * signals_.size() + signal_slot(s)) * nt + true_topology) * (nt + 1) + detected);
}

RateCell DetectionRateReport::overall(Criterion c, Signal s) const {
    RateCell total;
    for (std::size_t q = 0; q < topology_ids_.size(); ++q) total += aggregate(q, c, s);
    return total;
}

ExperimentError::ExperimentError(std::size_t failed, std::size_t total, const std::string& first)
    : Error(std::to_string(failed) + " of " + std::to_string(total) +
            " trials failed; first failure: " + first),
      failed_(failed) {}

// --- experiment kernels -----------------------------------------------------

namespace {

DetectionRateReport empty_report(const Scenario& scenario) {
    const auto& cfg = scenario.config();
    return {scenario.topology_ids(), scenario.pmu_buses(), cfg.criteria, cfg.signals};
}

// Runs every true topology at one (repetition, step) unit. Returns the number
// of failed trials and records the first failure message.
std::size_t run_unit(const Scenario& scenario, int t, int repetition, DetectionRateReport& report,
                     std::string& first_error) {
    std::size_t failed = 0;
    auto note = [&](const std::exception& e, std::size_t count) {
        if (first_error.empty()) {
            first_error = "t=" + std::to_string(t) + " rep=" + std::to_string(repetition) + ": " + e.what();
        }
        failed += count;
    };
    TopologyLibrary library;
    try {
        library = build_step_library(scenario, t, repetition);
    } catch (const std::exception& e) {
        note(e, scenario.topology_count());
        return failed;
    }
    for (std::size_t q = 0; q < scenario.topology_count(); ++q) {
        try {
            report.add(evaluate_trial(scenario, library, q, t, repetition));
        } catch (const std::exception& e) {
            note(e, 1);
        }
    }
    return failed;
}

}  // namespace

DetectionRateReport run_experiment_serial(const Scenario& scenario) {
    auto report = empty_report(scenario);
    const int steps = scenario.step_count();
    std::size_t failed = 0;
    std::string first;
    for (int rep = 0; rep < scenario.config().repetitions; ++rep) {
        for (int t = 0; t < steps; ++t) failed += run_unit(scenario, t, rep, report, first);
    }
    if (failed) throw ExperimentError(failed, scenario.trial_count(), first);
    return report;
}

DetectionRateReport run_experiment(const Scenario& scenario, int jobs) {
    auto report = empty_report(scenario);
    const int steps = scenario.step_count();
    const long units = static_cast<long>(scenario.config().repetitions) * steps;
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();

    std::size_t failed = 0;
    long first_unit = std::numeric_limits<long>::max();
    std::string first;

#pragma omp parallel num_threads(threads)
    {
        auto local = empty_report(scenario);
        std::size_t local_failed = 0;
        long local_first_unit = std::numeric_limits<long>::max();
        std::string local_first;

#pragma omp for schedule(dynamic, 4) nowait
        for (long u = 0; u < units; ++u) {
            const int rep = static_cast<int>(u / steps);
            const int t = static_cast<int>(u % steps);
            std::string msg;
            const auto f = run_unit(scenario, t, rep, local, msg);
            if (f) {
                local_failed += f;
                if (u < local_first_unit) {
                    local_first_unit = u;
                    local_first = std::move(msg);
                }
            }
        }

#pragma omp critical(topodetect_merge)
        {
            report.merge(local);
            failed += local_failed;
            if (local_first_unit < first_unit) {
                first_unit = local_first_unit;
                first = std::move(local_first);
            }
        }
    }
    if (failed) throw ExperimentError(failed, scenario.trial_count(), first);
    return report;
}

}  // namespace topodetect
