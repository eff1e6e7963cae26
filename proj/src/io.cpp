#include "ppbary/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace ppbary {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& text, std::size_t lineno) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    throw DomainError("line " + std::to_string(lineno) + ": bad number '" + text + "'");
  }
  return v;
}

std::string format_number(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

// Writes a vertex as the matching endpoint of its first incident edge.
NetPoint vertex_as_edge_point(const Network& net, std::size_t v) {
  for (std::size_t e = 0; e < net.edge_count(); ++e) {
    const auto& edge = net.edge(e);
    if (edge.u == v) return NetPoint::on_edge(static_cast<std::int64_t>(e), 0.0);
    if (edge.v == v) return NetPoint::on_edge(static_cast<std::int64_t>(e), edge.length);
  }
  throw DomainError("vertex " + net.vertex_name(v) + " has no incident edge");
}

std::array<double, 2> planar(const Location& x, const Network* net) {
  if (const auto* c = std::get_if<Coords>(&x)) {
    if (c->empty()) return {0.0, 0.0};
    return {(*c)[0], c->size() > 1 ? (*c)[1] : 0.0};
  }
  if (net == nullptr) throw DomainError("network points need the network to be drawn");
  return net->coordinates(std::get<NetPoint>(x));
}

}  // namespace

PointPattern read_pattern_csv(std::istream& in, const Network* net) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (!line.empty()) header = split_fields(line);
  }
  PointPattern pattern;
  if (header.empty()) return pattern;

  const bool network_rows = header.size() == 2 && header[0] == "edge_id" && header[1] == "offset";
  for (const auto& name : header) {
    double dummy = 0.0;
    const auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), dummy);
    if (name.empty() || (ec == std::errc{} && ptr == name.data() + name.size())) {
      throw DomainError("pattern file needs a header row such as 'x,y' or 'edge_id,offset'");
    }
  }
  if (net != nullptr && !network_rows && header.size() != 2) {
    throw DomainError("network patterns need 'edge_id,offset' or 'x,y' columns");
  }

  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw DomainError("line " + std::to_string(lineno) + ": expected " +
                        std::to_string(header.size()) + " fields");
    }
    if (network_rows) {
      const double e = parse_number(fields[0], lineno);
      if (e < 0.0 || e != std::floor(e)) {
        throw DomainError("line " + std::to_string(lineno) + ": bad edge id '" + fields[0] + "'");
      }
      NetPoint x = NetPoint::on_edge(static_cast<std::int64_t>(e), parse_number(fields[1], lineno));
      if (net != nullptr) x = net->canonical(x);
      pattern.push_back(x);
      continue;
    }
    Coords c;
    for (const auto& f : fields) c.push_back(parse_number(f, lineno));
    if (net != nullptr) {
      pattern.push_back(project_to_network({c[0], c[1]}, *net));
    } else {
      pattern.push_back(std::move(c));
    }
  }
  return pattern;
}

PointPattern read_pattern_file(const std::filesystem::path& path, const Network* net) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path.string());
  try {
    return read_pattern_csv(in, net);
  } catch (const DomainError& e) {
    throw DomainError(path.string() + ": " + e.what());
  }
}

void write_pattern_csv(std::ostream& out, const PointPattern& pattern, const Network* net,
                       std::size_t dim) {
  const bool network = (!pattern.empty() && std::holds_alternative<NetPoint>(pattern[0])) ||
                       (pattern.empty() && net != nullptr);
  if (network) {
    out << "edge_id,offset\n";
    for (const auto& x : pattern) {
      NetPoint p = std::get<NetPoint>(x);
      if (p.is_vertex()) {
        if (net == nullptr) throw DomainError("writing a vertex point needs the network");
        p = vertex_as_edge_point(*net, static_cast<std::size_t>(p.vertex));
      }
      out << p.edge << ',' << format_number(p.offset) << '\n';
    }
    return;
  }
  if (!pattern.empty()) dim = std::get<Coords>(pattern[0]).size();
  static constexpr const char* names[] = {"x", "y", "z"};
  for (std::size_t d = 0; d < dim; ++d) {
    if (d > 0) out << ',';
    out << (d < 3 ? std::string(names[d]) : "x" + std::to_string(d + 1));
  }
  out << '\n';
  for (const auto& x : pattern) {
    const auto& c = std::get<Coords>(x);
    for (std::size_t d = 0; d < c.size(); ++d) {
      if (d > 0) out << ',';
      out << format_number(c[d]);
    }
    out << '\n';
  }
}

Network read_network_files(const std::filesystem::path& edges,
                           const std::filesystem::path& coords) {
  std::ifstream ein(edges);
  if (!ein) throw DomainError("cannot open " + edges.string());
  Network net = Network::read_edge_list(ein);
  if (!coords.empty()) {
    std::ifstream cin(coords);
    if (!cin) throw DomainError("cannot open " + coords.string());
    net.read_coordinates(cin);
  }
  return net;
}

std::vector<std::pair<Location, std::size_t>> multipoints(const PointPattern& pattern) {
  std::vector<std::pair<Location, std::size_t>> out;
  for (const auto& x : pattern) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == x; });
    if (it == out.end()) {
      out.emplace_back(x, 1);
    } else {
      ++it->second;
    }
  }
  return out;
}

std::string render_svg(const std::vector<PointPattern>& data, const PointPattern& barycenter,
                       const Network* net) {
  constexpr double size = 600.0, margin = 20.0;
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
  double x1 = -x0, y1 = -x0;
  auto extend = [&](const std::array<double, 2>& p) {
    x0 = std::min(x0, p[0]);
    x1 = std::max(x1, p[0]);
    y0 = std::min(y0, p[1]);
    y1 = std::max(y1, p[1]);
  };
  const bool draw_net = net != nullptr && net->has_coordinates();
  if (draw_net) {
    for (std::size_t v = 0; v < net->vertex_count(); ++v) extend(net->coordinates(v));
  }
  for (const auto& xi : data) {
    for (const auto& x : xi) extend(planar(x, net));
  }
  for (const auto& z : barycenter) extend(planar(z, net));
  if (!std::isfinite(x0)) x0 = y0 = 0.0, x1 = y1 = 1.0;
  const double span = std::max({x1 - x0, y1 - y0, 1e-12});
  const double scale = (size - 2.0 * margin) / span;
  auto sx = [&](double x) { return margin + (x - x0) * scale; };
  auto sy = [&](double y) { return size - margin - (y - y0) * scale; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (draw_net) {
    svg << "<g stroke=\"#bbbbbb\" stroke-width=\"1\">\n";
    for (const auto& e : net->edges()) {
      const auto a = net->coordinates(e.u), b = net->coordinates(e.v);
      svg << "<polyline fill=\"none\" points=\"" << sx(a[0]) << ',' << sy(a[1]) << ' ' << sx(b[0])
          << ',' << sy(b[1]) << "\"/>\n";
    }
    svg << "</g>\n";
  }
  svg << "<g fill=\"#555555\">\n";
  for (const auto& xi : data) {
    for (const auto& x : xi) {
      const auto p = planar(x, net);
      svg << "<circle cx=\"" << sx(p[0]) << "\" cy=\"" << sy(p[1]) << "\" r=\"2\"/>\n";
    }
  }
  svg << "</g>\n<g fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\">\n";
  for (const auto& [z, count] : multipoints(barycenter)) {
    const auto p = planar(z, net);
    const double r = 5.0 + 2.0 * std::sqrt(static_cast<double>(count) - 1.0);
    svg << "<circle cx=\"" << sx(p[0]) << "\" cy=\"" << sy(p[1]) << "\" r=\"" << r << "\"/>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace ppbary
