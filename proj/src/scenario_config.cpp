#include "topodetect/scenario_config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "topodetect/errors.hpp"
#include "topodetect/text.hpp"

namespace topodetect {

void ScenarioConfig::validate() const {
    std::vector<std::string> errs;
    if (repetitions < 1) errs.emplace_back("repetitions must be >= 1");
    if (criteria.empty()) errs.emplace_back("criteria list is empty");
    if (signals.empty()) errs.emplace_back("signals list is empty");
    if (!(pmu.sigma >= 0.0) || !(pmu.accuracy >= 0.0)) errs.emplace_back("pmu sigma/accuracy must be >= 0");
    if (!(scada.sigma >= 0.0) || !(scada.accuracy >= 0.0)) errs.emplace_back("scada sigma/accuracy must be >= 0");
    if (!(solver.tolerance > 0.0)) errs.emplace_back("solver tolerance must be > 0");
    if (!errs.empty()) throw ValidationError(std::move(errs));
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    std::filesystem::path p(value);
    return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

ScenarioConfig parse_scenario_config(std::string_view body, const std::filesystem::path& base_dir,
                                     const std::string& source) {
    ScenarioConfig cfg;
    std::istringstream in{std::string(body)};
    std::string raw;
    int lineno = 0;
    std::set<std::string> keys_seen;

    while (std::getline(in, raw)) {
        ++lineno;
        auto line = text::trim(text::strip_comment(raw));
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(source, lineno, "expected key = value");
        const auto key = text::lower(text::trim(line.substr(0, eq)));
        const auto value = text::trim(line.substr(eq + 1));
        if (!keys_seen.insert(key).second) throw ParseError(source, lineno, "duplicate key " + key);

        auto number = [&]() {
            auto v = text::parse_double(value);
            if (!v) throw ParseError(source, lineno, "bad number for " + key + ": '" + value + "'");
            return *v;
        };
        auto integer = [&]() -> long long {
            long long v = 0;
            auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc{} || p != value.data() + value.size()) {
                throw ParseError(source, lineno, "bad integer for " + key + ": '" + value + "'");
            }
            return v;
        };

        try {
            if (key == "network") cfg.network = resolve(base_dir, value);
            else if (key == "profile") cfg.profile = (value == "default") ? value : resolve(base_dir, value).string();
            else if (key == "pmu_sigma") cfg.pmu.sigma = number();
            else if (key == "pmu_accuracy") cfg.pmu.accuracy = number();
            else if (key == "pmu_angle_unit") {
                auto u = text::lower(value);
                if (u == "radian" || u == "rad") cfg.pmu.angle_unit = AngleUnit::Radian;
                else if (u == "degree" || u == "deg") cfg.pmu.angle_unit = AngleUnit::Degree;
                else throw ParseError(source, lineno, "pmu_angle_unit must be radian or degree");
            }
            else if (key == "scada_sigma") cfg.scada.sigma = number();
            else if (key == "scada_accuracy") cfg.scada.accuracy = number();
            else if (key == "repetitions") cfg.repetitions = static_cast<int>(integer());
            else if (key == "master_seed") cfg.master_seed = static_cast<std::uint64_t>(integer());
            else if (key == "criteria") {
                cfg.criteria.clear();
                for (const auto& c : text::split(value, ',')) cfg.criteria.push_back(parse_criterion(c));
            }
            else if (key == "signals") {
                cfg.signals.clear();
                for (const auto& s : text::split(value, ',')) cfg.signals.push_back(parse_signal(s));
            }
            else if (key == "pmu_buses") {
                cfg.pmu_buses.clear();
                cfg.pmu_at_all_buses = text::lower(value) == "all";
                if (!cfg.pmu_at_all_buses) {
                    for (const auto& b : text::split(value, ',')) {
                        auto v = text::parse_double(b);
                        if (!v || *v != static_cast<int>(*v)) throw ParseError(source, lineno, "bad bus id '" + b + "'");
                        cfg.pmu_buses.push_back(static_cast<int>(*v));
                    }
                }
            }
            else if (key == "solver_tolerance") cfg.solver.tolerance = number();
            else if (key == "solver_max_iterations") cfg.solver.max_iterations = static_cast<int>(integer());
            else throw ParseError(source, lineno, "unknown key " + key);
        } catch (const ConfigError& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
    if (cfg.network.empty()) throw ParseError(source, std::max(lineno, 1), "missing required key 'network'");
    cfg.validate();
    return cfg;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_config(ss.str(), path.parent_path(), path.string());
}

std::string format_scenario_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << "network = " << cfg.network.string() << '\n'
        << "profile = " << cfg.profile << '\n'
        << "pmu_sigma = " << text::format_double(cfg.pmu.sigma) << '\n'
        << "pmu_accuracy = " << text::format_double(cfg.pmu.accuracy) << '\n'
        << "pmu_angle_unit = " << (cfg.pmu.angle_unit == AngleUnit::Radian ? "radian" : "degree") << '\n'
        << "scada_sigma = " << text::format_double(cfg.scada.sigma) << '\n'
        << "scada_accuracy = " << text::format_double(cfg.scada.accuracy) << '\n'
        << "repetitions = " << cfg.repetitions << '\n'
        << "master_seed = " << cfg.master_seed << '\n';
    out << "criteria = ";
    for (std::size_t i = 0; i < cfg.criteria.size(); ++i) out << (i ? "," : "") << to_string(cfg.criteria[i]);
    out << "\nsignals = ";
    for (std::size_t i = 0; i < cfg.signals.size(); ++i) out << (i ? "," : "") << to_string(cfg.signals[i]);
    out << '\n';
    if (cfg.pmu_at_all_buses) {
        out << "pmu_buses = all\n";
    } else if (!cfg.pmu_buses.empty()) {
        out << "pmu_buses = ";
        for (std::size_t i = 0; i < cfg.pmu_buses.size(); ++i) out << (i ? "," : "") << cfg.pmu_buses[i];
        out << '\n';
    }
    return out.str();
}

}  // namespace topodetect
