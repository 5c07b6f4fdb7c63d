#include "topodetect/profiles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "topodetect/errors.hpp"
#include "topodetect/text.hpp"

namespace topodetect {

std::string_view to_string(ProfileClass c) {
    switch (c) {
    case ProfileClass::Residential: return "residential";
    case ProfileClass::Industrial: return "industrial";
    case ProfileClass::PV: return "pv";
    }
    return "?";
}

const InjectionSnapshot& InjectionSeries::at(int t) const {
    if (t < 0 || static_cast<std::size_t>(t) >= steps.size()) {
        throw ConfigError("time index " + std::to_string(t) + " outside profile range 0.." +
                          std::to_string(static_cast<int>(steps.size()) - 1));
    }
    return steps[static_cast<std::size_t>(t)];
}

namespace {

double hour(int t) { return static_cast<double>(t) / 4.0; }

double bump(double h, double centre, double width) {
    const double z = (h - centre) / width;
    return std::exp(-0.5 * z * z);
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double residential_raw(int t) {
    const double h = hour(t);
    return 0.35 + 0.45 * bump(h, 7.5, 1.2) + 1.0 * bump(h, 19.5, 1.8) + 0.25 * bump(h, 12.5, 1.5);
}

double industrial_raw(int t) {
    const double h = hour(t);
    return 0.25 + 0.75 * logistic(2.0 * (h - 7.0)) * logistic(-2.0 * (h - 18.0));
}

// Daylight window 06:00-20:00, zero (not just small) outside it.
double pv_raw(int t) {
    const double h = hour(t);
    if (h < 6.0 || h > 20.0) return 0.0;
    return std::max(0.0, bump(h, 13.0, 2.5) - bump(6.0, 13.0, 2.5));
}

double peak_of(double (*raw)(int)) {
    double m = 0.0;
    for (int t = 0; t < kStepsPerDay; ++t) m = std::max(m, raw(t));
    return m;
}

void check_step(int t) {
    if (t < 0 || t >= kStepsPerDay) throw ConfigError("profile step out of range: " + std::to_string(t));
}

struct DefaultAssignment {
    int bus_id;
    ProfileClass profile_class;
    double peak_p;        // p.u.
    double power_factor;  // lagging, loads only
};

// Bus 2 is PV-heavy and bus 4 load-heavy so the L24 loop flow is visible
// to the μPMUs; all line flows stay below 0.3 p.u.
constexpr std::array<DefaultAssignment, 6> kDefaultAssignments{{
    {2, ProfileClass::Residential, 0.04, 0.999},
    {2, ProfileClass::PV, 0.30, 1.0},
    {4, ProfileClass::Residential, 0.15, 0.999},
    {4, ProfileClass::PV, 0.02, 1.0},
    {5, ProfileClass::Industrial, 0.08, 0.995},
    {5, ProfileClass::PV, 0.10, 1.0},
}};

}  // namespace

double residential_shape(int t) {
    check_step(t);
    static const double peak = peak_of(residential_raw);
    return residential_raw(t) / peak;
}

double industrial_shape(int t) {
    check_step(t);
    static const double peak = peak_of(industrial_raw);
    return industrial_raw(t) / peak;
}

double pv_shape(int t) {
    check_step(t);
    static const double peak = peak_of(pv_raw);
    return pv_raw(t) / peak;
}

std::vector<LoadProfile> generate_default_profiles(const NetworkGraph& graph) {
    std::vector<LoadProfile> out;
    for (const auto& a : kDefaultAssignments) {
        const bool present = a.bus_id >= 1 && static_cast<std::size_t>(a.bus_id) <= graph.bus_count();
        if (!present || graph.buses[graph.bus_index(a.bus_id)].kind == BusKind::Slack) continue;

        double (*shape)(int) = nullptr;
        switch (a.profile_class) {
        case ProfileClass::Residential: shape = residential_shape; break;
        case ProfileClass::Industrial: shape = industrial_shape; break;
        case ProfileClass::PV: shape = pv_shape; break;
        }
        const double tan_phi = std::tan(std::acos(a.power_factor));
        LoadProfile p{a.bus_id, a.profile_class, {}};
        p.values.reserve(kStepsPerDay);
        for (int t = 0; t < kStepsPerDay; ++t) {
            const double pw = a.peak_p * shape(t);
            p.values.emplace_back(pw, pw * tan_phi);
        }
        out.push_back(std::move(p));
    }
    return out;
}

InjectionSeries to_injection_series(const NetworkGraph& graph, const std::vector<LoadProfile>& profiles) {
    InjectionSeries series;
    series.steps.assign(kStepsPerDay, InjectionSnapshot::zeros(graph.bus_count()));
    std::set<int> monitored;
    for (const auto& p : profiles) {
        if (p.values.size() != static_cast<std::size_t>(kStepsPerDay)) {
            throw ConfigError("profile for bus " + std::to_string(p.bus_id) + " has " +
                              std::to_string(p.values.size()) + " values, expected 96");
        }
        const auto idx = graph.bus_index(p.bus_id);
        const double sign = p.profile_class == ProfileClass::PV ? 1.0 : -1.0;
        for (int t = 0; t < kStepsPerDay; ++t) {
            series.steps[static_cast<std::size_t>(t)].power[idx] += sign * p.values[static_cast<std::size_t>(t)];
        }
        monitored.insert(p.bus_id);
    }
    series.monitored_buses.assign(monitored.begin(), monitored.end());
    return series;
}

InjectionSeries parse_profile_csv(std::string_view body, const NetworkGraph& graph,
                                  const std::string& source) {
    std::istringstream in{std::string(body)};
    std::string raw;
    int lineno = 0;
    bool header_seen = false;
    std::map<int, std::vector<bool>> seen;

    InjectionSeries series;
    series.steps.assign(kStepsPerDay, InjectionSnapshot::zeros(graph.bus_count()));

    while (std::getline(in, raw)) {
        ++lineno;
        auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto f = text::split(line, ',');
        if (!header_seen) {
            if (f != std::vector<std::string>{"time_index", "bus_id", "p_pu", "q_pu"}) {
                throw ParseError(source, lineno, "expected header time_index,bus_id,p_pu,q_pu");
            }
            header_seen = true;
            continue;
        }
        if (f.size() != 4) throw ParseError(source, lineno, "expected 4 fields");
        auto t = text::parse_double(f[0]);
        auto bus = text::parse_double(f[1]);
        auto p = text::parse_double(f[2]);
        auto q = text::parse_double(f[3]);
        if (!t || !bus || !p || !q || *t != std::floor(*t) || *bus != std::floor(*bus)) {
            throw ParseError(source, lineno, "malformed profile row '" + line + "'");
        }
        const int ti = static_cast<int>(*t);
        const int bi = static_cast<int>(*bus);
        if (ti < 0 || ti >= kStepsPerDay) throw ParseError(source, lineno, "time_index out of range 0..95");
        if (bi < 1 || static_cast<std::size_t>(bi) > graph.bus_count()) {
            throw ParseError(source, lineno, "unknown bus " + std::to_string(bi));
        }
        if (!std::isfinite(*p) || !std::isfinite(*q)) throw ParseError(source, lineno, "non-finite power");
        auto& flags = seen[bi];
        if (flags.empty()) flags.assign(kStepsPerDay, false);
        if (flags[static_cast<std::size_t>(ti)]) {
            throw ParseError(source, lineno, "duplicate row for bus " + std::to_string(bi) + " t=" + std::to_string(ti));
        }
        flags[static_cast<std::size_t>(ti)] = true;
        series.steps[static_cast<std::size_t>(ti)].power[static_cast<std::size_t>(bi - 1)] = {*p, *q};
    }
    if (!header_seen) throw ParseError(source, std::max(lineno, 1), "empty profile file");

    std::vector<std::string> errs;
    for (const auto& [bus, flags] : seen) {
        const auto n = std::count(flags.begin(), flags.end(), true);
        if (n != kStepsPerDay) {
            errs.push_back("bus " + std::to_string(bus) + " has " + std::to_string(n) + " rows, expected 96");
        }
        series.monitored_buses.push_back(bus);
    }
    if (!errs.empty()) throw ValidationError(std::move(errs));
    return series;
}

InjectionSeries load_profile_csv(const std::filesystem::path& path, const NetworkGraph& graph) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open profile file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_profile_csv(ss.str(), graph, path.string());
}

void write_profile_csv(std::ostream& out, const InjectionSeries& series) {
    out << "time_index,bus_id,p_pu,q_pu\n";
    for (int bus : series.monitored_buses) {
        for (std::size_t t = 0; t < series.steps.size(); ++t) {
            const auto s = series.steps[t].power[static_cast<std::size_t>(bus - 1)];
            out << t << ',' << bus << ',' << text::format_double(s.real()) << ','
                << text::format_double(s.imag()) << '\n';
        }
    }
}

InjectionSeries resolve_profile(const std::string& spec, const NetworkGraph& graph) {
    if (spec.empty() || spec == "default") {
        return to_injection_series(graph, generate_default_profiles(graph));
    }
    return load_profile_csv(spec, graph);
}

}  // namespace topodetect
