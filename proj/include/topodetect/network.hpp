#pragma once

#include <complex>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace topodetect {

enum class BusKind { Slack, PQ };

struct Bus {
    int id = 0;  // 1..N, contiguous
    BusKind kind = BusKind::PQ;
    double base_voltage = 1.0;  // p.u.
};

struct Line {
    std::string id;  // e.g. "L12"
    int from_bus = 0;
    int to_bus = 0;
    double r = 0.0;  // p.u.
    double x = 0.0;  // p.u.
    std::string switch_id;

    std::complex<double> impedance() const { return {r, x}; }
    std::complex<double> admittance() const { return 1.0 / impedance(); }
};

/// Buses and switchable lines of a microgrid. Immutable once validated.
struct NetworkGraph {
    std::vector<Bus> buses;
    std::vector<Line> lines;

    std::size_t bus_count() const { return buses.size(); }
    std::size_t line_count() const { return lines.size(); }

    /// Column/row index of a bus id in every N-sized vector and matrix.
    std::size_t bus_index(int bus_id) const;
    std::size_t slack_index() const;
    const Line* find_line_by_switch(const std::string& switch_id) const;
};

/// One candidate switch configuration.
struct TopologyConfig {
    std::string id;
    std::set<std::string> closed_switches;

    bool is_closed(const Line& line) const { return closed_switches.count(line.switch_id) != 0; }
};

/// E_closed x N matrix over {-1, 0, +1}; row l is -1 at the from-bus, +1 at the to-bus.
struct IncidenceMatrix {
    Eigen::MatrixXi entries;
    std::vector<std::string> line_ids;  // row labels
};

/// Bus admittance matrix together with the slack reference it is solved against.
struct AdmittanceMatrix {
    Eigen::MatrixXcd entries;
    std::size_t slack_index = 0;
    double slack_voltage = 1.0;

    std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
};

struct ConnectivityReport {
    bool connected = false;
    std::vector<int> unreachable;  // bus ids, ascending
};

/// Throws ValidationError listing every violated graph invariant.
void validate_graph(const NetworkGraph& graph);

/// Throws ConfigError when the topology names a switch the graph doesn't have.
void validate_topology(const NetworkGraph& graph, const TopologyConfig& topo);

IncidenceMatrix build_incidence_matrix(const NetworkGraph& graph, const TopologyConfig& topo);

/// Y[i][i] = sum of incident closed-line admittances, Y[i][j] = -y_ij.
/// Throws TopologyError if the closed lines leave a bus unreachable from the slack.
AdmittanceMatrix build_ybus(const NetworkGraph& graph, const TopologyConfig& topo);

/// BFS from the slack bus over closed lines.
ConnectivityReport check_connectivity(const NetworkGraph& graph, const TopologyConfig& topo);

/// Closed-line admittances in incidence-row order, for Y = A^T diag(y) A checks.
Eigen::VectorXcd closed_line_admittances(const NetworkGraph& graph, const TopologyConfig& topo);

}  // namespace topodetect
