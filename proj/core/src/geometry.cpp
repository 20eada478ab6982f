#include "coact/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

namespace coact {

Offset offset(Heading h) noexcept {
  switch (h) {
    case Heading::N: return {0, -1};
    case Heading::NE: return {1, -1};
    case Heading::E: return {1, 0};
    case Heading::SE: return {1, 1};
    case Heading::S: return {0, 1};
    case Heading::SW: return {-1, 1};
    case Heading::W: return {-1, 0};
    case Heading::NW: return {-1, -1};
  }
  return {0, 0};
}

Cell neighbor(Cell c, Heading h) noexcept {
  const auto o = offset(h);
  return {c.x + o.dx, c.y + o.dy};
}

std::string_view to_string(Heading h) noexcept {
  static constexpr std::array<std::string_view, 8> names = {"N", "NE", "E", "SE",
                                                            "S", "SW", "W", "NW"};
  return names[static_cast<std::size_t>(h)];
}

std::optional<Heading> parse_heading(std::string_view s) noexcept {
  for (auto h : kAllHeadings)
    if (to_string(h) == s) return h;
  return std::nullopt;
}

int chebyshev(Cell a, Cell b) noexcept {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

double euclidean(Cell a, Cell b) noexcept {
  return std::hypot(static_cast<double>(a.x - b.x), static_cast<double>(a.y - b.y));
}

std::optional<Heading> heading_toward(Cell from, Cell to) noexcept {
  if (from == to) return std::nullopt;
  // Screen coordinates: flip y so that N is +90 degrees.
  const double angle = std::atan2(static_cast<double>(from.y - to.y),
                                  static_cast<double>(to.x - from.x));
  long sector = std::lround(angle / (std::numbers::pi / 4.0));
  sector = ((sector % 8) + 8) % 8;  // 0 = E, 2 = N, 4 = W, 6 = S
  static constexpr std::array<Heading, 8> by_sector = {
      Heading::E, Heading::NE, Heading::N, Heading::NW,
      Heading::W, Heading::SW, Heading::S, Heading::SE};
  return by_sector[static_cast<std::size_t>(sector)];
}

double angle_off_heading(Heading h, Cell from, Cell to) noexcept {
  if (from == to) return 0.0;
  const auto o = offset(h);
  const double vx = to.x - from.x;
  const double vy = to.y - from.y;
  const double dot = o.dx * vx + o.dy * vy;
  const double norm = std::hypot(static_cast<double>(o.dx), static_cast<double>(o.dy)) *
                      std::hypot(vx, vy);
  const double c = std::clamp(dot / norm, -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

}  // namespace coact
