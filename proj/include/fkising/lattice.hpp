#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fkising {

using SiteIndex = std::int32_t;
using EdgeIndex = std::int32_t;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point p, Point q) { return {p.x + q.x, p.y + q.y}; }
inline Point operator-(Point p, Point q) { return {p.x - q.x, p.y - q.y}; }
double distance(Point p, Point q);

// Field normalization Theta_a = a^{15/8}.
double theta(double a);

// Closed axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  double diameter() const;
  bool contains(Point p, double tol = 1e-12) const;
  Rect translated(double dx, double dy) const { return {x0 + dx, y0 + dy, x1 + dx, y1 + dy}; }
};

enum class BoundaryCondition { Free, PlusWired };

std::string to_string(BoundaryCondition bc);
BoundaryCondition parse_boundary_condition(const std::string& s);

// Edge directions, counterclockwise starting east.
enum class Dir : std::uint8_t { East = 0, North = 1, West = 2, South = 3 };

inline Dir ccw_next(Dir d) { return static_cast<Dir>((static_cast<int>(d) + 1) & 3); }
inline Dir opposite(Dir d) { return static_cast<Dir>((static_cast<int>(d) + 2) & 3); }
inline constexpr std::array<Dir, 4> kAllDirs{Dir::East, Dir::North, Dir::West, Dir::South};
inline constexpr std::array<int, 4> kDirDx{1, 0, -1, 0};
inline constexpr std::array<int, 4> kDirDy{0, 1, 0, -1};

struct EdgeInfo {
  SiteIndex first = -1;                 // always a site of the domain
  std::optional<SiteIndex> second;      // empty for external edges
  Point outer;                          // position of the other endpoint (a boundary site when external)
  bool internal = false;
};

struct Neighbor {
  EdgeIndex edge = -1;
  Dir dir = Dir::East;
  std::optional<SiteIndex> site;  // empty when the other endpoint lies in the site boundary
  Point position;
  bool internal = false;
};

// Sites of aZ^2 inside a closed rectangle, with the internal edge set (both
// endpoints inside) and the external edge set (one endpoint on the outer site
// boundary). Sites are indexed row-major from the lower-left corner.
//
// Edge indexing: horizontal edges first, row by row, each row holding nx+1
// edges (the two extreme ones are external); then vertical edges, layer by
// layer from below, each layer holding nx edges (layers 0 and ny are
// external).
class LatticeDomain {
 public:
  LatticeDomain() = default;

  double mesh() const { return mesh_; }
  const Rect& region() const { return region_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  // Integer lattice coordinates of the lower-left site.
  int i0() const { return i0_; }
  int j0() const { return j0_; }

  std::size_t num_sites() const { return static_cast<std::size_t>(nx_) * ny_; }
  std::size_t num_horizontal_edges() const { return static_cast<std::size_t>(ny_) * (nx_ + 1); }
  std::size_t num_edges() const { return num_horizontal_edges() + static_cast<std::size_t>(nx_) * (ny_ + 1); }
  std::size_t num_internal_edges() const;
  std::size_t num_external_edges() const { return 2 * static_cast<std::size_t>(nx_ + ny_); }
  std::size_t num_boundary_sites() const { return num_external_edges(); }

  SiteIndex site_at(int col, int row) const { return row * nx_ + col; }
  int col(SiteIndex s) const { return s % nx_; }
  int row(SiteIndex s) const { return s / nx_; }
  bool contains_site(SiteIndex s) const { return s >= 0 && static_cast<std::size_t>(s) < num_sites(); }

  Point site_position(SiteIndex s) const;
  Point lattice_position(int col, int row) const;

  EdgeIndex edge(SiteIndex s, Dir d) const {
    const int c = col(s);
    const int r = row(s);
    switch (d) {
      case Dir::East: return r * (nx_ + 1) + c + 1;
      case Dir::West: return r * (nx_ + 1) + c;
      case Dir::North: return static_cast<EdgeIndex>(num_horizontal_edges()) + (r + 1) * nx_ + c;
      case Dir::South: return static_cast<EdgeIndex>(num_horizontal_edges()) + r * nx_ + c;
    }
    return -1;
  }

  // Neighbor site across direction d, empty if it lies outside the domain.
  std::optional<SiteIndex> neighbor_site(SiteIndex s, Dir d) const;
  bool is_internal(EdgeIndex e) const;
  EdgeInfo edge_info(EdgeIndex e) const;

  const std::vector<EdgeIndex>& internal_edges() const { return internal_edges_; }
  const std::vector<EdgeIndex>& external_edges() const { return external_edges_; }

  // Points of the site boundary, one per external edge, ordered by edge index.
  std::vector<Point> boundary_sites() const;

  friend LatticeDomain build_domain(double a, const Rect& rect);

 private:
  double mesh_ = 1.0;
  Rect region_;
  int nx_ = 0;
  int ny_ = 0;
  int i0_ = 0;
  int j0_ = 0;
  std::vector<EdgeIndex> internal_edges_;
  std::vector<EdgeIndex> external_edges_;
};

// Closed-rectangle membership; throws Error(EmptyDomain) when no point of aZ^2 lies in rect.
LatticeDomain build_domain(double a, const Rect& rect);

// Square box with side `side` lattice spacings (side+1 sites per row), lower-left at the origin.
LatticeDomain build_box(double a, int side);

// Four entries, East/North/West/South.
std::array<Neighbor, 4> neighbors(const LatticeDomain& domain, SiteIndex site);

struct DomainDescriptor {
  double a = 1.0;
  Rect rect;
  BoundaryCondition bc = BoundaryCondition::Free;
};

std::string serialize(const DomainDescriptor& d);
DomainDescriptor parse_domain_descriptor(const std::string& text);

}  // namespace fkising
