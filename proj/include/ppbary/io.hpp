#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "ppbary/core.hpp"
#include "ppbary/network.hpp"

namespace ppbary {

/// Pattern CSV with a header row: "x,y[,...]" for coordinates or
/// "edge_id,offset" for network points. With a network, coordinate rows are
/// projected onto it. A file without any line is the empty pattern.
PointPattern read_pattern_csv(std::istream& in, const Network* net = nullptr);
PointPattern read_pattern_file(const std::filesystem::path& path, const Network* net = nullptr);

/// Writes the header matching the point type; values round-trip exactly.
/// Network vertices are written as an endpoint of an incident edge, which
/// needs `net`. `dim` sets the header width for an empty Euclidean pattern.
void write_pattern_csv(std::ostream& out, const PointPattern& pattern,
                       const Network* net = nullptr, std::size_t dim = 2);

Network read_network_files(const std::filesystem::path& edges,
                           const std::filesystem::path& coords = {});

/// Distinct locations with their multiplicities, in first-seen order.
std::vector<std::pair<Location, std::size_t>> multipoints(const PointPattern& pattern);

/// Static overlay of the data patterns (small grey dots) and the barycenter
/// (circles, radius growing with multiplicity). Network points need
/// coordinates; the network itself is drawn when given.
std::string render_svg(const std::vector<PointPattern>& data, const PointPattern& barycenter,
                       const Network* net = nullptr);

}  // namespace ppbary
