#include <doctest.h>

#include <bitset>
#include <complex>
#include <string>

#include "paths.hpp"
#include "topodetect/errors.hpp"
#include "topodetect/network.hpp"
#include "topodetect/network_io.hpp"

using namespace topodetect;

namespace {

const NetworkDefinition& fivebus() {
    static const NetworkDefinition net = load_network(testpaths::fivebus());
    return net;
}

TopologyConfig subset_topology(const NetworkGraph& g, unsigned mask) {
    TopologyConfig t{"mask" + std::to_string(mask), {}};
    for (std::size_t l = 0; l < g.line_count(); ++l) {
        if (mask & (1u << l)) t.closed_switches.insert(g.lines[l].switch_id);
    }
    return t;
}

// Reachability by boolean transitive closure (Warshall), independent of BFS.
std::vector<int> closure_unreachable(const NetworkGraph& g, const TopologyConfig& topo) {
    const auto n = g.bus_count();
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) r[i][i] = true;
    for (const auto& l : g.lines) {
        if (!topo.is_closed(l)) continue;
        const auto a = static_cast<std::size_t>(l.from_bus - 1);
        const auto b = static_cast<std::size_t>(l.to_bus - 1);
        r[a][b] = r[b][a] = true;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (r[i][k] && r[k][j]) r[i][j] = true;
    std::vector<int> out;
    const auto s = g.slack_index();
    for (std::size_t j = 0; j < n; ++j) {
        if (!r[s][j]) out.push_back(static_cast<int>(j + 1));
    }
    return out;
}

}  // namespace

TEST_CASE("fixture matches the five-bus feeder") {
    const auto& net = fivebus();
    CHECK(net.graph.bus_count() == 5);
    CHECK(net.graph.line_count() == 5);
    REQUIRE(net.topologies.size() == 5);
    CHECK(net.graph.buses[0].kind == BusKind::Slack);
    for (std::size_t i = 1; i < 5; ++i) CHECK(net.graph.buses[i].kind == BusKind::PQ);

    const std::pair<const char*, const char*> open_line[] = {
        {"I", "S24"}, {"II", "S12"}, {"III", "S13"}, {"IV", "S34"}};
    for (const auto& [id, sw] : open_line) {
        const auto& t = net.topology(id);
        CHECK(t.closed_switches.size() == 4);
        CHECK(t.closed_switches.count(sw) == 0);
    }
    CHECK(net.topology("V").closed_switches.size() == 5);
}

TEST_CASE("incidence rows have one -1 at the from bus and one +1 at the to bus") {
    const auto& net = fivebus();
    for (const auto& topo : net.topologies) {
        const auto a = build_incidence_matrix(net.graph, topo);
        REQUIRE(a.entries.rows() == static_cast<Eigen::Index>(a.line_ids.size()));
        for (Eigen::Index r = 0; r < a.entries.rows(); ++r) {
            int neg = 0, pos = 0, zero = 0;
            for (Eigen::Index c = 0; c < a.entries.cols(); ++c) {
                const int v = a.entries(r, c);
                neg += v == -1;
                pos += v == 1;
                zero += v == 0;
            }
            CHECK(neg == 1);
            CHECK(pos == 1);
            CHECK(zero == 3);
        }
    }
    const auto a = build_incidence_matrix(net.graph, net.topology("V"));
    CHECK(a.line_ids.front() == "L12");
    CHECK(a.entries(0, 0) == -1);
    CHECK(a.entries(0, 1) == 1);
    CHECK(a.entries.row(0).cwiseAbs().sum() == 2);
    CHECK(a.entries.rows() == 5);
    CHECK(a.entries.rowwise().sum().cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("no closed switches gives an empty incidence matrix and is rejected") {
    const auto& net = fivebus();
    const TopologyConfig none{"none", {}};
    const auto a = build_incidence_matrix(net.graph, none);
    CHECK(a.entries.rows() == 0);
    CHECK(a.entries.cols() == 5);
    const auto rep = check_connectivity(net.graph, none);
    CHECK_FALSE(rep.connected);
    CHECK(rep.unreachable == std::vector<int>{2, 3, 4, 5});
    CHECK_THROWS_AS(build_ybus(net.graph, none), TopologyError);
}

TEST_CASE("Y-bus equals A^T diag(y) A for every topology") {
    const auto& net = fivebus();
    for (const auto& topo : net.topologies) {
        CAPTURE(topo.id);
        const auto y = build_ybus(net.graph, topo).entries;
        const Eigen::MatrixXcd a = build_incidence_matrix(net.graph, topo).entries.cast<std::complex<double>>();
        const Eigen::MatrixXcd ref = a.transpose() * closed_line_admittances(net.graph, topo).asDiagonal() * a;
        CHECK((y - ref).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((y - y.transpose()).cwiseAbs().maxCoeff() < 1e-15);
        CHECK(y.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("L13 admittance matches the high-precision reciprocal") {
    // 1 / (0.005 + j0.006) evaluated at 40 digits.
    const std::complex<double> y13(81.967213114754098360655, -98.360655737704918032787);
    const auto& net = fivebus();
    const TopologyConfig only13{"L13", {"S13"}};
    const auto a = build_incidence_matrix(net.graph, only13);
    CHECK(a.entries.rows() == 1);
    const auto y = closed_line_admittances(net.graph, only13);
    CHECK(std::abs(y(0) - y13) < 1e-11);

    const auto yv = build_ybus(net.graph, net.topology("V")).entries;
    CHECK(std::abs(yv(0, 2) + y13) < 1e-11);
    const auto* l34 = net.graph.find_line_by_switch("S34");
    const auto* l35 = net.graph.find_line_by_switch("S35");
    REQUIRE(l34);
    REQUIRE(l35);
    CHECK(std::abs(yv(2, 2) - (y13 + l34->admittance() + l35->admittance())) < 1e-11);
}

TEST_CASE("opening one line changes exactly four Y entries") {
    const auto& net = fivebus();
    const auto& v = net.topology("V");
    const auto yv = build_ybus(net.graph, v).entries;
    for (const auto& line : net.graph.lines) {
        CAPTURE(line.id);
        TopologyConfig t = v;
        t.closed_switches.erase(line.switch_id);
        if (!check_connectivity(net.graph, t).connected) continue;
        const auto yt = build_ybus(net.graph, t).entries;
        int changed = 0;
        for (Eigen::Index i = 0; i < 5; ++i)
            for (Eigen::Index j = 0; j < 5; ++j)
                changed += yt(i, j) != yv(i, j);
        CHECK(changed == 4);
        const auto f = static_cast<Eigen::Index>(line.from_bus - 1);
        const auto to = static_cast<Eigen::Index>(line.to_bus - 1);
        CHECK(yt(f, to) == std::complex<double>(0.0, 0.0));
    }
}

TEST_CASE("topologies I and V differ only through line L24") {
    const auto& net = fivebus();
    const Eigen::MatrixXcd d = build_ybus(net.graph, net.topology("V")).entries -
                               build_ybus(net.graph, net.topology("I")).entries;
    for (Eigen::Index i = 0; i < 5; ++i) {
        for (Eigen::Index j = 0; j < 5; ++j) {
            const bool l24 = (i == 1 || i == 3) && (j == 1 || j == 3);
            CHECK((std::abs(d(i, j)) > 0) == l24);
        }
    }
}

TEST_CASE("connectivity agrees with a transitive-closure oracle on all switch subsets") {
    const auto& g = fivebus().graph;
    for (unsigned mask = 0; mask < 32; ++mask) {
        CAPTURE(mask);
        const auto topo = subset_topology(g, mask);
        const auto expected = closure_unreachable(g, topo);
        const auto rep = check_connectivity(g, topo);
        CHECK(rep.unreachable == expected);
        CHECK(rep.connected == expected.empty());
        if (rep.connected) {
            CHECK_NOTHROW(build_ybus(g, topo));
        } else {
            CHECK_THROWS_AS(build_ybus(g, topo), TopologyError);
        }
    }
}

TEST_CASE("candidate topologies are connected") {
    const auto& net = fivebus();
    for (const auto& t : net.topologies) {
        const auto rep = check_connectivity(net.graph, t);
        CHECK(rep.connected);
        CHECK(rep.unreachable.empty());
    }
}

TEST_CASE("network parser rejects malformed input") {
    const std::string good_lines = "[lines]\nL12,1,2,0.01,0.01,S12\n";
    SUBCASE("empty file") { CHECK_THROWS_AS(parse_network("", "empty.net"), ParseError); }
    SUBCASE("two slack buses") {
        const std::string txt = "[buses]\n1,slack,1.0\n2,slack,1.0\n" + good_lines + "[topologies]\nT,S12\n";
        CHECK_THROWS_AS(parse_network(txt), ValidationError);
    }
    SUBCASE("negative resistance") {
        const std::string txt = "[buses]\n1,slack,1.0\n2,pq,1.0\n[lines]\nL12,1,2,-0.01,0.01,S12\n[topologies]\nT,S12\n";
        CHECK_THROWS_AS(parse_network(txt), ValidationError);
    }
    SUBCASE("zero impedance") {
        const std::string txt = "[buses]\n1,slack,1.0\n2,pq,1.0\n[lines]\nL12,1,2,0,0,S12\n[topologies]\nT,S12\n";
        CHECK_THROWS_AS(parse_network(txt), ValidationError);
    }
    SUBCASE("self loop") {
        const std::string txt = "[buses]\n1,slack,1.0\n2,pq,1.0\n[lines]\nL11,1,1,0.01,0.01,S11\n[topologies]\nT,S11\n";
        CHECK_THROWS_AS(parse_network(txt), ValidationError);
    }
    SUBCASE("unknown endpoint") {
        const std::string txt = "[buses]\n1,slack,1.0\n2,pq,1.0\n[lines]\nL13,1,3,0.01,0.01,S13\n[topologies]\nT,S13\n";
        CHECK_THROWS_AS(parse_network(txt), ValidationError);
    }
    SUBCASE("non-contiguous bus ids") {
        const std::string txt = "[buses]\n1,slack,1.0\n3,pq,1.0\n[lines]\nL13,1,3,0.01,0.01,S13\n[topologies]\nT,S13\n";
        CHECK_THROWS_AS(parse_network(txt), ValidationError);
    }
    SUBCASE("unknown switch in topology") {
        const std::string txt = "[buses]\n1,slack,1.0\n2,pq,1.0\n" + good_lines + "[topologies]\nT,S99\n";
        CHECK_THROWS_AS(parse_network(txt), ValidationError);
    }
    SUBCASE("garbage number reports the line") {
        const std::string txt = "[buses]\n1,slack,abc\n";
        try {
            parse_network(txt, "bad.net");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("bad.net:2") != std::string::npos);
        }
    }
}

TEST_CASE("validation lists every violation at once") {
    const std::string txt =
        "[buses]\n1,slack,1.0\n2,slack,1.0\n[lines]\nL12,1,2,-0.01,0.01,S12\n[topologies]\nT,S12\n";
    try {
        parse_network(txt);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.violations().size() >= 2);
    }
}
