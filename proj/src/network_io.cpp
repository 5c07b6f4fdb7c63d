#include "topodetect/network_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "topodetect/errors.hpp"
#include "topodetect/text.hpp"

namespace topodetect {

const TopologyConfig& NetworkDefinition::topology(std::string_view id) const {
    return topologies[topology_index(id)];
}

std::size_t NetworkDefinition::topology_index(std::string_view id) const {
    for (std::size_t i = 0; i < topologies.size(); ++i) {
        if (topologies[i].id == id) return i;
    }
    throw ConfigError("unknown topology " + std::string(id));
}

namespace {

enum class Section { None, Buses, Lines, Topologies };

class RowParser {
public:
    RowParser(const std::string& source, int line) : source_(source), line_(line) {}

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_, what); }

    void expect_fields(const std::vector<std::string>& f, std::size_t n, const char* layout) const {
        if (f.size() != n) {
            fail("expected " + std::to_string(n) + " fields (" + layout + "), got " +
                 std::to_string(f.size()));
        }
    }

    int integer(const std::string& s, const char* field) const {
        int v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size()) fail(std::string("bad integer for ") + field + ": '" + s + "'");
        return v;
    }

    double real(const std::string& s, const char* field) const {
        auto v = text::parse_double(s);
        if (!v) fail(std::string("bad number for ") + field + ": '" + s + "'");
        return *v;
    }

private:
    const std::string& source_;
    int line_;
};

}  // namespace

NetworkDefinition parse_network(std::string_view body, const std::string& source) {
    NetworkDefinition def;
    Section section = Section::None;
    bool any_content = false;
    int lineno = 0;

    std::istringstream in{std::string(body)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++lineno;
        auto line = text::trim(text::strip_comment(raw));
        if (line.empty()) continue;
        any_content = true;
        RowParser row(source, lineno);

        if (line.front() == '[') {
            auto name = text::lower(line);
            if (name == "[buses]") section = Section::Buses;
            else if (name == "[lines]") section = Section::Lines;
            else if (name == "[topologies]") section = Section::Topologies;
            else row.fail("unknown section " + line);
            continue;
        }

        auto f = text::split(line, ',');
        switch (section) {
        case Section::None:
            row.fail("data row before any [section] header");
        case Section::Buses: {
            row.expect_fields(f, 3, "id,kind,base_voltage");
            Bus b;
            b.id = row.integer(f[0], "bus id");
            auto kind = text::lower(f[1]);
            if (kind == "slack") b.kind = BusKind::Slack;
            else if (kind == "pq") b.kind = BusKind::PQ;
            else row.fail("bus kind must be slack or pq, got '" + f[1] + "'");
            b.base_voltage = row.real(f[2], "base_voltage");
            def.graph.buses.push_back(b);
            break;
        }
        case Section::Lines: {
            row.expect_fields(f, 6, "id,from,to,r_pu,x_pu,switch");
            Line l;
            l.id = f[0];
            l.from_bus = row.integer(f[1], "from");
            l.to_bus = row.integer(f[2], "to");
            l.r = row.real(f[3], "r_pu");
            l.x = row.real(f[4], "x_pu");
            l.switch_id = f[5];
            if (l.id.empty() || l.switch_id.empty()) row.fail("line and switch ids must be non-empty");
            def.graph.lines.push_back(std::move(l));
            break;
        }
        case Section::Topologies: {
            if (f.size() != 2 && f.size() != 1) row.expect_fields(f, 2, "id,closed_switch_list");
            TopologyConfig t;
            t.id = f[0];
            if (t.id.empty()) row.fail("topology id must be non-empty");
            if (f.size() == 2) {
                for (auto& sw : text::split(f[1], ';')) {
                    if (!sw.empty()) t.closed_switches.insert(sw);
                }
            }
            def.topologies.push_back(std::move(t));
            break;
        }
        }
    }
    if (!any_content) throw ParseError(source, std::max(lineno, 1), "empty network definition");

    std::sort(def.graph.buses.begin(), def.graph.buses.end(),
              [](const Bus& a, const Bus& b) { return a.id < b.id; });
    validate_graph(def.graph);

    std::vector<std::string> errs;
    std::set<std::string> ids;
    for (const auto& t : def.topologies) {
        if (!ids.insert(t.id).second) errs.push_back("duplicate topology id " + t.id);
        for (const auto& sw : t.closed_switches) {
            if (def.graph.find_line_by_switch(sw) == nullptr) {
                errs.push_back("topology " + t.id + " references unknown switch " + sw);
            }
        }
    }
    if (!errs.empty()) throw ValidationError(std::move(errs));
    return def;
}

NetworkDefinition load_network(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open network file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_network(ss.str(), path.string());
}

}  // namespace topodetect
