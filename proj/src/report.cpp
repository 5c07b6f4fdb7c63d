#include <fstream>
#include <iomanip>
#include <sstream>

#include "topodetect/scenario.hpp"
#include "topodetect/text.hpp"

namespace topodetect {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw Error("I/O error writing " + path.string());
}

}  // namespace

std::vector<std::filesystem::path> write_report(const DetectionRateReport& report,
                                                const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

    const auto& ids = report.topology_ids();
    const auto& buses = report.pmu_buses();
    std::vector<std::filesystem::path> written;

    {
        const auto path = dir / "rates.csv";
        auto out = open_for_write(path);
        out << "true_topology,criterion,signal,bus,correct_rate,inconclusive_rate,n\n";
        auto row = [&](const std::string& topo, Criterion c, Signal s, const std::string& bus, const RateCell& cell) {
            out << topo << ',' << to_string(c) << ',' << to_string(s) << ',' << bus << ','
                << text::format_double(cell.correct_rate()) << ','
                << text::format_double(cell.inconclusive_rate()) << ',' << cell.n() << '\n';
        };
        for (std::size_t q = 0; q < ids.size(); ++q) {
            for (auto c : report.criteria()) {
                for (auto s : report.signals()) {
                    for (std::size_t b = 0; b < buses.size(); ++b) {
                        row(ids[q], c, s, std::to_string(buses[b]), report.per_bus(q, c, s, b));
                    }
                    row(ids[q], c, s, "all", report.aggregate(q, c, s));
                }
            }
        }
        finish(out, path);
        written.push_back(path);
    }
    {
        const auto path = dir / "confusion.csv";
        auto out = open_for_write(path);
        out << "criterion,signal,true_topology,detected_topology,count\n";
        for (auto c : report.criteria()) {
            for (auto s : report.signals()) {
                for (std::size_t q = 0; q < ids.size(); ++q) {
                    for (std::size_t d = 0; d <= ids.size(); ++d) {
                        out << to_string(c) << ',' << to_string(s) << ',' << ids[q] << ','
                            << (d < ids.size() ? ids[d] : std::string("inconclusive")) << ','
                            << report.confusion(c, s, q, d) << '\n';
                    }
                }
            }
        }
        finish(out, path);
        written.push_back(path);
    }
    {
        const auto path = dir / "rates_by_band.csv";
        auto out = open_for_write(path);
        out << "true_topology,criterion,signal,band,first_step,last_step,correct_rate,inconclusive_rate,n\n";
        const int width = kStepsPerDay / kTimeBands;
        for (std::size_t q = 0; q < ids.size(); ++q) {
            for (auto c : report.criteria()) {
                for (auto s : report.signals()) {
                    for (int b = 0; b < kTimeBands; ++b) {
                        const auto& cell = report.band(q, c, s, b);
                        out << ids[q] << ',' << to_string(c) << ',' << to_string(s) << ',' << b << ','
                            << b * width << ',' << (b + 1) * width - 1 << ','
                            << text::format_double(cell.correct_rate()) << ','
                            << text::format_double(cell.inconclusive_rate()) << ',' << cell.n() << '\n';
                    }
                }
            }
        }
        finish(out, path);
        written.push_back(path);
    }
    return written;
}

std::string format_summary(const DetectionRateReport& report) {
    std::ostringstream out;
    out << std::left << std::setw(10) << "criterion" << std::setw(11) << "signal" << std::right
        << std::setw(9) << "correct" << std::setw(14) << "inconclusive" << std::setw(9) << "trials" << '\n';
    out << std::fixed << std::setprecision(4);
    for (auto c : report.criteria()) {
        for (auto s : report.signals()) {
            const auto cell = report.overall(c, s);
            out << std::left << std::setw(10) << to_string(c) << std::setw(11) << to_string(s) << std::right
                << std::setw(9) << cell.correct_rate() << std::setw(14) << cell.inconclusive_rate()
                << std::setw(9) << cell.n() << '\n';
        }
    }
    return out.str();
}

}  // namespace topodetect
