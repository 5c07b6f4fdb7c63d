#include "topodetect/network.hpp"

#include <algorithm>
#include <queue>

#include "topodetect/errors.hpp"

namespace topodetect {

std::size_t NetworkGraph::bus_index(int bus_id) const {
    if (bus_id < 1 || static_cast<std::size_t>(bus_id) > buses.size()) {
        throw ConfigError("unknown bus id " + std::to_string(bus_id));
    }
    return static_cast<std::size_t>(bus_id - 1);
}

std::size_t NetworkGraph::slack_index() const {
    for (const auto& b : buses) {
        if (b.kind == BusKind::Slack) return bus_index(b.id);
    }
    throw ConfigError("network has no slack bus");
}

const Line* NetworkGraph::find_line_by_switch(const std::string& switch_id) const {
    auto it = std::find_if(lines.begin(), lines.end(),
                           [&](const Line& l) { return l.switch_id == switch_id; });
    return it == lines.end() ? nullptr : &*it;
}

void validate_graph(const NetworkGraph& graph) {
    std::vector<std::string> errs;
    const auto n = graph.buses.size();
    if (n == 0) errs.emplace_back("network has no buses");

    std::vector<int> seen(n + 1, 0);
    int slack_count = 0;
    for (const auto& b : graph.buses) {
        if (b.id < 1 || static_cast<std::size_t>(b.id) > n) {
            errs.push_back("bus id " + std::to_string(b.id) + " outside contiguous range 1.." +
                           std::to_string(n));
        } else if (seen[static_cast<std::size_t>(b.id)]++) {
            errs.push_back("duplicate bus id " + std::to_string(b.id));
        }
        if (b.kind == BusKind::Slack) ++slack_count;
        if (!(b.base_voltage > 0.0)) {
            errs.push_back("bus " + std::to_string(b.id) + " has non-positive base voltage");
        }
    }
    if (n > 0 && slack_count == 0) errs.emplace_back("no slack bus");
    if (slack_count > 1) errs.push_back(std::to_string(slack_count) + " slack buses (exactly one required)");

    std::set<std::string> line_ids, switch_ids;
    for (const auto& l : graph.lines) {
        if (!line_ids.insert(l.id).second) errs.push_back("duplicate line id " + l.id);
        if (!switch_ids.insert(l.switch_id).second) errs.push_back("duplicate switch id " + l.switch_id);
        auto valid_bus = [&](int id) { return id >= 1 && static_cast<std::size_t>(id) <= n; };
        if (!valid_bus(l.from_bus)) errs.push_back("line " + l.id + " references unknown bus " + std::to_string(l.from_bus));
        if (!valid_bus(l.to_bus)) errs.push_back("line " + l.id + " references unknown bus " + std::to_string(l.to_bus));
        if (l.from_bus == l.to_bus) errs.push_back("line " + l.id + " is a self-loop");
        if (l.r < 0.0) errs.push_back("line " + l.id + " has negative resistance");
        if (std::abs(l.impedance()) == 0.0) errs.push_back("line " + l.id + " has zero impedance");
    }
    if (!errs.empty()) throw ValidationError(std::move(errs));
}

void validate_topology(const NetworkGraph& graph, const TopologyConfig& topo) {
    for (const auto& sw : topo.closed_switches) {
        if (graph.find_line_by_switch(sw) == nullptr) {
            throw ConfigError("topology " + topo.id + " references unknown switch " + sw);
        }
    }
}

IncidenceMatrix build_incidence_matrix(const NetworkGraph& graph, const TopologyConfig& topo) {
    validate_topology(graph, topo);
    IncidenceMatrix a;
    for (const auto& l : graph.lines) {
        if (topo.is_closed(l)) a.line_ids.push_back(l.id);
    }
    a.entries = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(a.line_ids.size()),
                                      static_cast<Eigen::Index>(graph.bus_count()));
    Eigen::Index row = 0;
    for (const auto& l : graph.lines) {
        if (!topo.is_closed(l)) continue;
        a.entries(row, static_cast<Eigen::Index>(graph.bus_index(l.from_bus))) = -1;
        a.entries(row, static_cast<Eigen::Index>(graph.bus_index(l.to_bus))) = 1;
        ++row;
    }
    return a;
}

Eigen::VectorXcd closed_line_admittances(const NetworkGraph& graph, const TopologyConfig& topo) {
    std::vector<std::complex<double>> ys;
    for (const auto& l : graph.lines) {
        if (topo.is_closed(l)) ys.push_back(l.admittance());
    }
    return Eigen::Map<Eigen::VectorXcd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
}

ConnectivityReport check_connectivity(const NetworkGraph& graph, const TopologyConfig& topo) {
    const auto n = graph.bus_count();
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& l : graph.lines) {
        if (!topo.is_closed(l)) continue;
        auto a = graph.bus_index(l.from_bus);
        auto b = graph.bus_index(l.to_bus);
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<bool> reached(n, false);
    std::queue<std::size_t> frontier;
    const auto slack = graph.slack_index();
    reached[slack] = true;
    frontier.push(slack);
    while (!frontier.empty()) {
        auto u = frontier.front();
        frontier.pop();
        for (auto v : adj[u]) {
            if (!reached[v]) {
                reached[v] = true;
                frontier.push(v);
            }
        }
    }
    ConnectivityReport report;
    for (std::size_t i = 0; i < n; ++i) {
        if (!reached[i]) report.unreachable.push_back(graph.buses[i].id);
    }
    std::sort(report.unreachable.begin(), report.unreachable.end());
    report.connected = report.unreachable.empty();
    return report;
}

AdmittanceMatrix build_ybus(const NetworkGraph& graph, const TopologyConfig& topo) {
    validate_topology(graph, topo);
    if (auto conn = check_connectivity(graph, topo); !conn.connected) {
        throw TopologyError(topo.id, conn.unreachable);
    }
    const auto n = static_cast<Eigen::Index>(graph.bus_count());
    AdmittanceMatrix y;
    y.entries = Eigen::MatrixXcd::Zero(n, n);
    y.slack_index = graph.slack_index();
    y.slack_voltage = graph.buses[y.slack_index].base_voltage;
    for (const auto& l : graph.lines) {
        if (!topo.is_closed(l)) continue;
        const auto i = static_cast<Eigen::Index>(graph.bus_index(l.from_bus));
        const auto j = static_cast<Eigen::Index>(graph.bus_index(l.to_bus));
        const auto yl = l.admittance();
        y.entries(i, i) += yl;
        y.entries(j, j) += yl;
        y.entries(i, j) -= yl;
        y.entries(j, i) -= yl;
    }
    return y;
}

}  // namespace topodetect
