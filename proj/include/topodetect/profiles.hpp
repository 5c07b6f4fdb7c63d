#pragma once

#include <complex>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "topodetect/network.hpp"
#include "topodetect/power_flow.hpp"

namespace topodetect {

inline constexpr int kStepsPerDay = 96;  // 15-minute resolution

enum class ProfileClass { Residential, Industrial, PV };

std::string_view to_string(ProfileClass c);

/// One daily curve attached to a bus. values[t] = p + jq in p.u. drawn by a
/// load or produced by a PV unit (both positive); the sign is applied when
/// converting to net injections.
struct LoadProfile {
    int bus_id = 0;
    ProfileClass profile_class = ProfileClass::Residential;
    std::vector<std::complex<double>> values;
};

/// Net injections for a whole day plus the buses that carry SCADA metering.
struct InjectionSeries {
    std::vector<InjectionSnapshot> steps;  // kStepsPerDay entries
    std::vector<int> monitored_buses;      // ascending bus ids

    const InjectionSnapshot& at(int t) const;
};

/// Normalised (peak 1) daily shapes evaluated at step t in [0, 96).
double residential_shape(int t);
double industrial_shape(int t);
double pv_shape(int t);

/// Synthetic day for the five-bus feeder: households with PV at buses 2 and 4,
/// an industrial load with PV at bus 5. Buses missing from the graph (or the
/// slack) get nothing.
std::vector<LoadProfile> generate_default_profiles(const NetworkGraph& graph);

InjectionSeries to_injection_series(const NetworkGraph& graph, const std::vector<LoadProfile>& profiles);

/// Profile CSV: header `time_index,bus_id,p_pu,q_pu`, net injection
/// (generation minus load), 96 rows per listed bus.
InjectionSeries parse_profile_csv(std::string_view text, const NetworkGraph& graph,
                                  const std::string& source = "<string>");
InjectionSeries load_profile_csv(const std::filesystem::path& path, const NetworkGraph& graph);
void write_profile_csv(std::ostream& out, const InjectionSeries& series);

/// "default" selects generate_default_profiles, anything else is a CSV path.
InjectionSeries resolve_profile(const std::string& spec, const NetworkGraph& graph);

}  // namespace topodetect
