#pragma once

// Two-relay Gaussian channel: node 1 (source), node 2 (relay 1, DF),
// node 3 (relay 2, SNNC-RS), node 4 (destination).
//
//   Y2 = h12 X1 + h32 X3 + Z2
//   Y3 = h13 X1 + h23 X2 + Z3
//   Y4 = h14 X1 + h24 X2 + h34 X3 + Z4,   Zi ~ N(0, 1)

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace snncrs {

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Powers {
  double P1 = 1.0;
  double P2 = 1.0;
  double P3 = 1.0;
};

struct NodePlacement {
  std::array<Point, 4> nodes{};  // nodes[0] is node 1
  double pathloss_exponent = 2.0;
};

struct ChannelGains {
  double h12 = 0, h13 = 0, h14 = 0, h23 = 0, h24 = 0, h32 = 0, h34 = 0;
  double P1 = 0, P2 = 0, P3 = 0;

  void validate() const {
    const double all[] = {h12, h13, h14, h23, h24, h32, h34, P1, P2, P3};
    for (double v : all)
      if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument("channel gains and powers must be finite and >= 0");
  }

  // Relay 2 (node 3) removed from the network.
  ChannelGains without_relay2() const {
    ChannelGains g = *this;
    g.h13 = g.h23 = g.h32 = g.h34 = 0.0;
    return g;
  }

  ChannelGains without_relays() const {
    ChannelGains g = without_relay2();
    g.h12 = g.h24 = 0.0;
    return g;
  }
};

inline double node_distance(const NodePlacement& placement, int i, int j) {
  if (i < 1 || i > 4 || j < 1 || j > 4)
    throw std::out_of_range("node index must be in 1..4");
  const Point& a = placement.nodes[static_cast<std::size_t>(i - 1)];
  const Point& b = placement.nodes[static_cast<std::size_t>(j - 1)];
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline void validate_placement(const NodePlacement& placement) {
  if (!(placement.pathloss_exponent > 0.0) || !std::isfinite(placement.pathloss_exponent))
    throw GeometryError("pathloss exponent must be finite and > 0");
  for (const Point& p : placement.nodes)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw GeometryError("node coordinates must be finite");
  for (int i = 1; i <= 4; ++i)
    for (int j = i + 1; j <= 4; ++j)
      if (!(node_distance(placement, i, j) > 0.0))
        throw GeometryError("nodes " + std::to_string(i) + " and " + std::to_string(j) +
                            " are co-located");
}

// Amplitude gain d^(-gamma/2): received power falls off as d^(-gamma).
inline double pathloss_gain(double distance, double gamma) {
  if (!(distance > 0.0))
    throw GeometryError("distance must be > 0");
  return std::pow(distance, -gamma / 2.0);
}

inline ChannelGains gains_from_geometry(const NodePlacement& placement, const Powers& powers = {}) {
  validate_placement(placement);
  const double g = placement.pathloss_exponent;
  auto h = [&](int i, int j) { return pathloss_gain(node_distance(placement, i, j), g); };

  ChannelGains ch;
  ch.h12 = h(1, 2);
  ch.h13 = h(1, 3);
  ch.h14 = h(1, 4);
  ch.h23 = h(2, 3);
  ch.h24 = h(2, 4);
  ch.h32 = h(3, 2);
  ch.h34 = h(3, 4);
  ch.P1 = powers.P1;
  ch.P2 = powers.P2;
  ch.P3 = powers.P3;
  ch.validate();
  return ch;
}

// Collinear layout: 1 at 0, 2 at d12, 3 at d14 - d34, 4 at d14.
inline NodePlacement line_placement(double d12, double d34, double d14, double gamma) {
  if (!(d12 > 0.0) || !(d34 > 0.0) || !(d14 > 0.0))
    throw GeometryError("line network distances must be > 0");
  if (!(d12 < d14) || !(d34 < d14))
    throw GeometryError("relay distances must be shorter than d14");
  if (!(d12 + d34 < d14))
    throw GeometryError("d12 + d34 must be < d14 (relays would overlap)");
  NodePlacement p;
  p.nodes = {Point{0.0, 0.0}, Point{d12, 0.0}, Point{d14 - d34, 0.0}, Point{d14, 0.0}};
  p.pathloss_exponent = gamma;
  return p;
}

inline ChannelGains line_network(double d12, double d34, double d14, double gamma,
                                 double P1, double P2, double P3) {
  return gains_from_geometry(line_placement(d12, d34, d14, gamma), Powers{P1, P2, P3});
}

}  // namespace snncrs
