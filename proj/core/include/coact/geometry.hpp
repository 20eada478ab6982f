#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace coact {

/// Grid cell, x = column, y = row (row 0 at the top).
struct Cell {
  int x{0};
  int y{0};

  auto operator<=>(const Cell&) const = default;
};

/// Eight compass directions; N points to decreasing row index.
enum class Heading : std::uint8_t { N, NE, E, SE, S, SW, W, NW };

inline constexpr std::array<Heading, 8> kAllHeadings = {
    Heading::N, Heading::NE, Heading::E, Heading::SE,
    Heading::S, Heading::SW, Heading::W, Heading::NW};

struct Offset {
  int dx{0};
  int dy{0};
};

Offset offset(Heading h) noexcept;
Cell neighbor(Cell c, Heading h) noexcept;

std::string_view to_string(Heading h) noexcept;
std::optional<Heading> parse_heading(std::string_view s) noexcept;

int chebyshev(Cell a, Cell b) noexcept;
double euclidean(Cell a, Cell b) noexcept;

/// Heading whose 45-degree sector contains the vector from -> to.
/// Returns nullopt when the cells coincide.
std::optional<Heading> heading_toward(Cell from, Cell to) noexcept;

/// Unsigned angle in degrees between heading h and the vector from -> to.
/// Zero for coincident cells.
double angle_off_heading(Heading h, Cell from, Cell to) noexcept;

/// Cells strictly between a and b on the Bresenham line (endpoints excluded).
template <typename Visit>
void bresenham_interior(Cell a, Cell b, Visit&& visit) {
  int x0 = a.x;
  int y0 = a.y;
  const int dx = b.x > a.x ? b.x - a.x : a.x - b.x;
  const int dy = -(b.y > a.y ? b.y - a.y : a.y - b.y);
  const int sx = a.x < b.x ? 1 : -1;
  const int sy = a.y < b.y ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if (x0 == b.x && y0 == b.y) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
    if (x0 == b.x && y0 == b.y) break;
    if (!visit(Cell{x0, y0})) return;
  }
}

}  // namespace coact
