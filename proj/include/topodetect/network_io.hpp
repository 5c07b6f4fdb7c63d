#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "topodetect/network.hpp"

namespace topodetect {

/// A validated graph plus its candidate topologies, in file order.
struct NetworkDefinition {
    NetworkGraph graph;
    std::vector<TopologyConfig> topologies;

    const TopologyConfig& topology(std::string_view id) const;
    std::size_t topology_index(std::string_view id) const;
};

/// Parses the sectioned network text format:
///
///     [buses]       id,kind,base_voltage        kind is slack|pq
///     [lines]       id,from,to,r_pu,x_pu,switch
///     [topologies]  id,closed_switch_list       switches separated by ';'
///
/// Blank lines and '#' comments are ignored. Syntax problems raise ParseError
/// with the offending line; invariant violations raise one ValidationError
/// listing all of them.
NetworkDefinition parse_network(std::string_view text, const std::string& source = "<string>");

NetworkDefinition load_network(const std::filesystem::path& path);

}  // namespace topodetect
