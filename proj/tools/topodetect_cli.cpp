// topodetect: power flow, topology library, single-trial detection, Monte
// Carlo detection-rate experiments and network validation from one binary.
//
// Exit codes: 0 success, 1 usage error, 2 validation/configuration error,
// 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "topodetect/detector.hpp"
#include "topodetect/errors.hpp"
#include "topodetect/network_io.hpp"
#include "topodetect/profiles.hpp"
#include "topodetect/scenario.hpp"
#include "topodetect/scenario_config.hpp"
#include "topodetect/text.hpp"

namespace td = topodetect;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kNumerical = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::size_t topology_arg(const td::NetworkDefinition& net, const std::string& id) {
    for (std::size_t i = 0; i < net.topologies.size(); ++i) {
        if (net.topologies[i].id == id) return i;
    }
    std::string known;
    for (const auto& t : net.topologies) known += (known.empty() ? "" : ", ") + t.id;
    throw UsageError("unknown topology '" + id + "' (known: " + known + ")");
}

void print_solution(std::ostream& out, const td::PowerFlowSolution& sol) {
    out << " bus     vm [p.u.]     va [deg]\n";
    out << std::fixed;
    for (std::size_t i = 0; i < sol.vm.size(); ++i) {
        out << std::setw(4) << i + 1 << std::setw(14) << std::setprecision(6) << sol.vm[i]
            << std::setw(13) << std::setprecision(6) << sol.va_deg[i] << '\n';
    }
    out << std::defaultfloat << "iterations: " << sol.iterations << ", max mismatch: " << sol.max_mismatch
        << " p.u.\n";
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw td::Error("cannot write " + path);
    return f;
}

// --- powerflow --------------------------------------------------------------

struct PowerflowArgs {
    std::string net;
    std::string topo;
    std::string profile = "default";
    std::optional<int> t;
    bool zero_load = false;
    std::string csv;
};

int cmd_powerflow(const PowerflowArgs& a) {
    const auto net = td::load_network(a.net);
    const auto q = topology_arg(net, a.topo);
    td::InjectionSnapshot inj;
    if (a.zero_load) {
        inj = td::InjectionSnapshot::zeros(net.graph.bus_count());
    } else {
        if (!a.t) throw UsageError("powerflow needs --t <step> or --zero-load");
        inj = td::resolve_profile(a.profile, net.graph).at(*a.t);
    }
    const auto ybus = td::build_ybus(net.graph, net.topologies[q]);
    const auto sol = td::solve_newton_raphson(ybus, inj);
    std::cout << "topology " << net.topologies[q].id;
    if (!a.zero_load) std::cout << ", step " << *a.t;
    std::cout << '\n';
    print_solution(std::cout, sol);
    if (!a.csv.empty()) {
        auto f = open_out(a.csv);
        f << "bus_id,vm_pu,va_deg\n";
        for (std::size_t i = 0; i < sol.vm.size(); ++i) {
            f << i + 1 << ',' << td::text::format_double(sol.vm[i]) << ','
              << td::text::format_double(sol.va_deg[i]) << '\n';
        }
    }
    return kOk;
}

// --- library ----------------------------------------------------------------

struct LibraryArgs {
    std::string net;
    std::string profile = "default";
    double scada_sigma = 0.0;
    double scada_accuracy = 0.0;
    std::uint64_t seed = 1;
    std::string csv;
};

int cmd_library(const LibraryArgs& a) {
    const auto net = td::load_network(a.net);
    const auto series = td::resolve_profile(a.profile, net.graph);
    const auto spec = td::DeviceSpec::scada(a.scada_sigma, a.scada_accuracy);

    std::vector<std::vector<td::ScadaPowerMeasurement>> readings;
    for (int t = 0; t < static_cast<int>(series.steps.size()); ++t) {
        readings.push_back(td::sample_scada(series.at(t), series.monitored_buses, spec,
                                            {a.seed, 0, static_cast<std::uint64_t>(t)}, t));
    }
    const auto lib = td::build_library_from_scada(net.graph, net.topologies, readings);
    std::cout << lib.topology_count() << " topologies x " << lib.time_indices().size()
              << " steps = " << lib.size() << " power-flow solutions\n";

    int max_iter = 0;
    for (std::size_t q = 0; q < lib.topology_count(); ++q) {
        for (int t : lib.time_indices()) max_iter = std::max(max_iter, lib.at(q, t).iterations);
    }
    std::cout << "max Newton-Raphson iterations: " << max_iter << '\n';

    if (!a.csv.empty()) {
        auto f = open_out(a.csv);
        f << "topology,time_index,bus_id,vm_pu,va_deg\n";
        for (std::size_t q = 0; q < lib.topology_count(); ++q) {
            for (int t : lib.time_indices()) {
                const auto& sol = lib.at(q, t);
                for (std::size_t i = 0; i < sol.vm.size(); ++i) {
                    f << lib.topology_ids()[q] << ',' << t << ',' << i + 1 << ','
                      << td::text::format_double(sol.vm[i]) << ',' << td::text::format_double(sol.va_deg[i]) << '\n';
                }
            }
        }
    }
    return kOk;
}

// --- shared noise overrides -------------------------------------------------

struct NoiseOverrides {
    std::optional<double> pmu_sigma, pmu_accuracy, scada_sigma, scada_accuracy;
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    bool noiseless = false;

    void add_to(CLI::App* app) {
        app->add_flag("--noiseless", noiseless, "zero sigma and accuracy for both device classes");
        app->add_option("--pmu-sigma", pmu_sigma, "μPMU relative noise std");
        app->add_option("--pmu-accuracy", pmu_accuracy, "μPMU systematic offset bound");
        app->add_option("--scada-sigma", scada_sigma, "SCADA relative noise std");
        app->add_option("--scada-accuracy", scada_accuracy, "SCADA systematic offset bound");
        app->add_option("--seed", seed, "master seed");
    }

    void apply(td::ScenarioConfig& cfg) const {
        if (noiseless) {
            cfg.pmu.sigma = cfg.pmu.accuracy = 0.0;
            cfg.scada.sigma = cfg.scada.accuracy = 0.0;
        }
        if (pmu_sigma) cfg.pmu.sigma = *pmu_sigma;
        if (pmu_accuracy) cfg.pmu.accuracy = *pmu_accuracy;
        if (scada_sigma) cfg.scada.sigma = *scada_sigma;
        if (scada_accuracy) cfg.scada.accuracy = *scada_accuracy;
        if (seed) cfg.master_seed = *seed;
        if (reps) cfg.repetitions = *reps;
        cfg.validate();
    }
};

// --- detect -----------------------------------------------------------------

struct DetectArgs {
    std::string config;
    std::string net;
    std::string profile;
    std::string topo;
    int t = 0;
    int rep = 0;
    std::string dump_dir;
    NoiseOverrides noise;
};

int cmd_detect(const DetectArgs& a) {
    td::ScenarioConfig cfg;
    if (!a.config.empty()) cfg = td::load_scenario_config(a.config);
    if (!a.net.empty()) cfg.network = a.net;
    if (!a.profile.empty()) cfg.profile = a.profile;
    if (cfg.network.empty()) throw UsageError("detect needs --net or --config");
    a.noise.apply(cfg);

    const auto scenario = td::Scenario::prepare(cfg);
    const auto q = topology_arg(scenario.network(), a.topo);
    if (a.t < 0 || a.t >= scenario.step_count()) throw UsageError("--t out of range");

    td::DifferenceMatrices m;
    const auto trial = td::run_trial(scenario, q, a.t, a.rep, &m);
    const auto& ids = scenario.topology_ids();

    std::cout << "true topology " << ids[q] << ", step " << a.t << ", repetition " << a.rep << '\n';
    for (const auto& o : trial.outcomes) {
        std::cout << std::left << std::setw(6) << td::to_string(o.criterion) << std::setw(10)
                  << td::to_string(o.signal) << ' ' << (o.verdict ? ids[*o.verdict] : "inconclusive");
        if (!o.per_row_votes.empty()) {
            std::cout << "   votes:";
            for (std::size_t r = 0; r < o.per_row_votes.size(); ++r) {
                const auto& v = o.per_row_votes[r];
                std::cout << ' ' << m.pmu_buses[r] << '=' << (v ? ids[*v] : "-");
            }
        }
        std::cout << '\n';
    }
    if (!a.dump_dir.empty()) {
        std::filesystem::create_directories(a.dump_dir);
        for (auto s : td::kAllSignals) {
            const auto path = std::filesystem::path(a.dump_dir) /
                              (s == td::Signal::Angle ? "adm.csv" : "mdm.csv");
            auto f = open_out(path.string());
            td::write_difference_csv(f, m, s);
            std::cout << "wrote " << path.string() << '\n';
        }
    }
    return kOk;
}

// --- experiment -------------------------------------------------------------

struct ExperimentArgs {
    std::string config;
    std::string out_dir = "results";
    int jobs = 0;
    bool serial = false;
    NoiseOverrides noise;
};

int cmd_experiment(const ExperimentArgs& a) {
    auto cfg = td::load_scenario_config(a.config);
    a.noise.apply(cfg);
    const auto scenario = td::Scenario::prepare(cfg);
    const auto report = a.serial ? td::run_experiment_serial(scenario) : td::run_experiment(scenario, a.jobs);
    const auto paths = td::write_report(report, a.out_dir);

    std::cout << scenario.topology_count() << " topologies x " << scenario.step_count() << " steps x "
              << cfg.repetitions << " repetitions = " << scenario.trial_count() << " trials (seed "
              << cfg.master_seed << ")\n\n";
    std::cout << td::format_summary(report) << '\n';
    for (const auto& p : paths) std::cout << "wrote " << p.string() << '\n';
    return kOk;
}

// --- validate ---------------------------------------------------------------

int cmd_validate(const std::string& path) {
    const auto net = td::load_network(path);
    std::size_t islanded = 0;
    for (const auto& t : net.topologies) {
        const auto conn = td::check_connectivity(net.graph, t);
        if (!conn.connected) {
            ++islanded;
            std::cout << "topology " << t.id << ": unreachable buses";
            for (int b : conn.unreachable) std::cout << ' ' << b;
            std::cout << '\n';
        }
    }
    std::cout << net.graph.bus_count() << " buses, " << net.graph.line_count() << " lines, "
              << net.topologies.size() << " topologies, "
              << (islanded == 0 ? std::string("all connected")
                                : std::to_string(islanded) + " disconnected")
              << '\n';
    return islanded == 0 ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Microgrid topology detection from μPMU measurements"};
    app.require_subcommand(1);

    PowerflowArgs pf;
    auto* pf_cmd = app.add_subcommand("powerflow", "Solve one power flow");
    pf_cmd->add_option("--net", pf.net, "network definition file")->required();
    pf_cmd->add_option("--topo", pf.topo, "topology id")->required();
    pf_cmd->add_option("--profile", pf.profile, "'default' or profile CSV");
    pf_cmd->add_option("--t", pf.t, "profile step 0..95");
    pf_cmd->add_flag("--zero-load", pf.zero_load, "all injections zero");
    pf_cmd->add_option("--csv", pf.csv, "also write the solution as CSV");

    LibraryArgs lib;
    auto* lib_cmd = app.add_subcommand("library", "Build the topology library for a whole day");
    lib_cmd->add_option("--net", lib.net, "network definition file")->required();
    lib_cmd->add_option("--profile", lib.profile, "'default' or profile CSV");
    lib_cmd->add_option("--scada-sigma", lib.scada_sigma, "SCADA relative noise std");
    lib_cmd->add_option("--scada-accuracy", lib.scada_accuracy, "SCADA systematic offset bound");
    lib_cmd->add_option("--seed", lib.seed, "master seed");
    lib_cmd->add_option("--csv", lib.csv, "write every library entry as CSV");

    DetectArgs det;
    auto* det_cmd = app.add_subcommand("detect", "Run one detection trial");
    det_cmd->add_option("--config", det.config, "experiment config supplying defaults");
    det_cmd->add_option("--net", det.net, "network definition file");
    det_cmd->add_option("--profile", det.profile, "'default' or profile CSV");
    det_cmd->add_option("--topo", det.topo, "true topology id")->required();
    det_cmd->add_option("--t", det.t, "time step 0..95")->required();
    det_cmd->add_option("--rep", det.rep, "repetition index (selects noise draws)");
    det_cmd->add_option("--dump-matrices", det.dump_dir, "write adm.csv and mdm.csv into this directory");
    det.noise.add_to(det_cmd);

    ExperimentArgs exp;
    auto* exp_cmd = app.add_subcommand("experiment", "Monte Carlo detection-rate experiment");
    exp_cmd->add_option("config", exp.config, "experiment config file")->required();
    exp_cmd->add_option("--out-dir", exp.out_dir, "directory for rates.csv and confusion.csv");
    exp_cmd->add_option("--jobs", exp.jobs, "worker threads (default: all cores)");
    exp_cmd->add_option("--reps", exp.noise.reps, "repetitions per (topology, step)");
    exp_cmd->add_flag("--serial", exp.serial, "use the single-threaded reference kernel");
    exp.noise.add_to(exp_cmd);

    std::string validate_path, validate_net;
    auto* val_cmd = app.add_subcommand("validate", "Check a network definition and its topologies");
    val_cmd->add_option("network", validate_path, "network definition file");
    val_cmd->add_option("--net", validate_net, "network definition file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*pf_cmd) return cmd_powerflow(pf);
        if (*lib_cmd) return cmd_library(lib);
        if (*det_cmd) return cmd_detect(det);
        if (*exp_cmd) return cmd_experiment(exp);
        if (*val_cmd) {
            const auto& p = validate_path.empty() ? validate_net : validate_path;
            if (p.empty()) throw UsageError("validate needs a network file");
            return cmd_validate(p);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const td::DivergedError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const td::NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const td::LibraryError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const td::ExperimentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const td::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    }
    return kUsage;
}
