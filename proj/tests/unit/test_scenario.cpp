#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "paths.hpp"
#include "topodetect/errors.hpp"
#include "topodetect/scenario.hpp"

using namespace topodetect;
namespace fs = std::filesystem;

namespace {

const NetworkDefinition& fivebus() {
    static const NetworkDefinition net = load_network(testpaths::fivebus());
    return net;
}

ScenarioConfig small_config(int reps, std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.network = testpaths::fivebus();
    cfg.repetitions = reps;
    cfg.master_seed = seed;
    return cfg;
}

ScenarioConfig noiseless(ScenarioConfig cfg) {
    cfg.pmu.sigma = cfg.pmu.accuracy = 0.0;
    cfg.scada.sigma = cfg.scada.accuracy = 0.0;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("topodetect_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("daily profile shapes") {
    CHECK(residential_shape(0) < residential_shape(76));
    CHECK(pv_shape(0) == 0.0);
    CHECK(pv_shape(95) == 0.0);
    for (int t = 0; t < kStepsPerDay; ++t) {
        if (t < 24 || t > 80) CHECK(pv_shape(t) == 0.0);
        CHECK(residential_shape(t) > 0.0);
        CHECK(residential_shape(t) <= 1.0);
        CHECK(industrial_shape(t) <= 1.0);
    }
    double energy = 0.0;
    for (int t = 0; t < kStepsPerDay; ++t) energy += residential_shape(t) * 0.25;
    CHECK(energy > 0.0);

    const auto profiles = generate_default_profiles(fivebus().graph);
    for (const auto& p : profiles) {
        CHECK(p.values.size() == 96u);
        CHECK(p.bus_id != 1);
    }
    CHECK_THROWS_AS(residential_shape(96), ConfigError);
}

TEST_CASE("default profiles keep line flows moderate") {
    const auto& net = fivebus();
    const auto series = resolve_profile("default", net.graph);
    CHECK(series.monitored_buses == std::vector<int>{2, 4, 5});
    double worst = 0.0;
    for (const auto& topo : net.topologies) {
        const auto ybus = build_ybus(net.graph, topo);
        for (int t = 0; t < kStepsPerDay; ++t) {
            const auto v = solve_newton_raphson(ybus, series.at(t)).voltages();
            for (const auto& l : net.graph.lines) {
                if (!topo.is_closed(l)) continue;
                const auto vf = v(l.from_bus - 1);
                const auto i = (vf - v(l.to_bus - 1)) * l.admittance();
                worst = std::max(worst, std::abs(vf * std::conj(i)));
            }
        }
    }
    CHECK(worst < 0.3);
}

TEST_CASE("profile CSV round trip and errors") {
    const auto& g = fivebus().graph;
    const auto series = resolve_profile("default", g);
    std::ostringstream out;
    write_profile_csv(out, series);
    const auto back = parse_profile_csv(out.str(), g);
    CHECK(back.monitored_buses == series.monitored_buses);
    for (int t = 0; t < kStepsPerDay; ++t) CHECK(back.at(t).power == series.at(t).power);

    CHECK_THROWS_AS(parse_profile_csv("", g), ParseError);
    CHECK_THROWS_AS(parse_profile_csv("t,b,p,q\n", g), ParseError);
    CHECK_THROWS_AS(parse_profile_csv("time_index,bus_id,p_pu,q_pu\n0,2,0.1,0\n", g), ValidationError);
    CHECK_THROWS_AS(parse_profile_csv("time_index,bus_id,p_pu,q_pu\n0,9,0.1,0\n", g), ParseError);
    CHECK_THROWS_AS(parse_profile_csv("time_index,bus_id,p_pu,q_pu\n0,2,0.1,0\n0,2,0.1,0\n", g), ParseError);
    CHECK_THROWS_AS(series.at(96), ConfigError);
}

TEST_CASE("scenario config parsing") {
    const auto cfg = load_scenario_config(testpaths::paper_cfg());
    CHECK(cfg.network == testpaths::data_dir() / "fivebus.net");
    CHECK(cfg.pmu.sigma == 0.00025);
    CHECK(cfg.pmu.accuracy == 0.00025);
    CHECK(cfg.scada.sigma == 0.025);
    CHECK(cfg.scada.accuracy == 0.0005);
    CHECK(cfg.repetitions == 20);
    CHECK(cfg.criteria.size() == 3);
    CHECK(cfg.signals.size() == 2);

    const auto round = parse_scenario_config(format_scenario_config(cfg), "/");
    CHECK(round.network == cfg.network);
    CHECK(round.master_seed == cfg.master_seed);
    CHECK(round.pmu.sigma == cfg.pmu.sigma);
    CHECK(round.criteria == cfg.criteria);

    const auto all = parse_scenario_config("network = x.net\npmu_buses = all\n", "/d");
    CHECK(all.pmu_at_all_buses);
    CHECK(all.network == fs::path("/d/x.net"));
    const auto some = parse_scenario_config("network = x.net\npmu_buses = 2,4\npmu_angle_unit = degree\n", "/d");
    CHECK(some.pmu_buses == std::vector<int>{2, 4});
    CHECK(some.pmu.angle_unit == AngleUnit::Degree);

    CHECK_THROWS_AS(parse_scenario_config("network = a\nbogus = 1\n", "/"), ParseError);
    CHECK_THROWS_AS(parse_scenario_config("network = a\nnetwork = b\n", "/"), ParseError);
    CHECK_THROWS_AS(parse_scenario_config("pmu_sigma = 0.1\n", "/"), ParseError);
    CHECK_THROWS(parse_scenario_config("network = a\nrepetitions = 0\n", "/"));
    CHECK_THROWS(parse_scenario_config("network = a\npmu_sigma = -1\n", "/"));
}

TEST_CASE("run_trial is deterministic and matches the shared-library path") {
    const auto sc = Scenario::prepare(small_config(2, 11));
    for (std::size_t q = 0; q < sc.topology_count(); ++q) {
        for (int t : {0, 30, 76}) {
            const auto a = run_trial(sc, q, t, 1);
            const auto b = run_trial(sc, q, t, 1);
            const auto lib = build_step_library(sc, t, 1);
            const auto c = evaluate_trial(sc, lib, q, t, 1);
            REQUIRE(a.outcomes.size() == 6);
            for (std::size_t k = 0; k < a.outcomes.size(); ++k) {
                CHECK(a.outcomes[k].verdict == b.outcomes[k].verdict);
                CHECK(a.outcomes[k].verdict == c.outcomes[k].verdict);
                CHECK(a.outcomes[k].per_row_votes == c.outcomes[k].per_row_votes);
            }
        }
    }
}

TEST_CASE("noiseless scenario detects every topology at every step") {
    const auto sc = Scenario::prepare(noiseless(small_config(1, 3)));
    const auto rep = run_experiment(sc);
    for (auto c : kAllCriteria) {
        for (auto s : kAllSignals) {
            const auto cell = rep.overall(c, s);
            CHECK(cell.n() == 480);
            CHECK(cell.correct == 480);
        }
    }
}

TEST_CASE("slack μPMU abstains and keeps the 5x5 matrix shape") {
    auto cfg = noiseless(small_config(1, 3));
    cfg.pmu_at_all_buses = true;
    const auto sc = Scenario::prepare(cfg);
    DifferenceMatrices d;
    const auto trial = run_trial(sc, 0, 60, 0, &d);
    CHECK(d.adm.rows() == 5);
    CHECK(d.adm.cols() == 5);
    CHECK_FALSE(trial.row_votes[0][0].has_value());
    for (const auto& o : trial.outcomes) CHECK(o.verdict == 0u);
}

TEST_CASE("parallel and serial experiments agree") {
    const auto sc = Scenario::prepare(small_config(2, 5));
    const auto serial = run_experiment_serial(sc);
    CHECK(run_experiment(sc, 1) == serial);
    CHECK(run_experiment(sc, 4) == serial);
}

TEST_CASE("report files are complete and reproducible") {
    const auto sc = Scenario::prepare(small_config(1, 9));
    const auto rep = run_experiment(sc);
    const auto d1 = scratch("a");
    const auto d2 = scratch("b");
    write_report(rep, d1);
    write_report(run_experiment(Scenario::prepare(small_config(1, 9))), d2);
    for (const char* f : {"rates.csv", "confusion.csv", "rates_by_band.csv"}) {
        CHECK(slurp(d1 / f) == slurp(d2 / f));
    }

    std::istringstream rates(slurp(d1 / "rates.csv"));
    std::string line;
    std::getline(rates, line);
    CHECK(line == "true_topology,criterion,signal,bus,correct_rate,inconclusive_rate,n");
    int rows = 0;
    while (std::getline(rates, line)) ++rows;
    CHECK(rows == 5 * 3 * 2 * (4 + 1));

    for (std::size_t q = 0; q < 5; ++q) {
        for (auto c : kAllCriteria) {
            for (auto s : kAllSignals) {
                const auto& cell = rep.aggregate(q, c, s);
                CHECK(cell.correct_rate() + cell.incorrect_rate() + cell.inconclusive_rate() ==
                      doctest::Approx(1.0));
                std::uint64_t conf = 0;
                for (std::size_t d = 0; d <= 5; ++d) conf += rep.confusion(c, s, q, d);
                CHECK(conf == cell.n());
                CHECK(rep.confusion(c, s, q, q) == cell.correct);
                CHECK(rep.confusion(c, s, q, 5) == cell.inconclusive);
            }
        }
    }
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("ARMV angle rate does not improve with more μPMU noise") {
    double prev = 1.1;
    for (double sigma : {0.0, 0.00025, 0.0025}) {
        auto cfg = small_config(2, 21);
        cfg.pmu.sigma = sigma;
        const auto rate = run_experiment(Scenario::prepare(cfg)).overall(Criterion::ARMV, Signal::Angle).correct_rate();
        CAPTURE(sigma);
        CHECK(rate <= prev);
        prev = rate;
    }
}

TEST_CASE("invalid scenarios are rejected") {
    auto cfg = small_config(1, 1);
    cfg.pmu_buses = {2, 2};
    CHECK_THROWS_AS(Scenario::prepare(cfg), ConfigError);
    cfg.pmu_buses = {7};
    CHECK_THROWS(Scenario::prepare(cfg));
    auto bad = small_config(1, 1);
    bad.network = "/nonexistent/net.net";
    CHECK_THROWS(Scenario::prepare(bad));
}
