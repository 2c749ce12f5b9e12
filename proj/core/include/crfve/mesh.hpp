#ifndef CRFVE_MESH_HPP_
#define CRFVE_MESH_HPP_

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

namespace crfve {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }

// Which diagonal splits each square block into two triangles.
enum class Diagonal {
  kSouthWestToNorthEast,  // bottom-left -> top-right (default)
  kSouthEastToNorthWest,
};

struct MeshEdge {
  std::array<int, 2> vertices{};
  // Adjacent triangles; triangles[1] == -1 for boundary edges.
  std::array<int, 2> triangles{-1, -1};
  bool boundary = false;
};

// Structured triangulation of the unit square. Edges are ordered
// lexicographically by midpoint (y first, then x); this order is also the
// Crouzeix-Raviart dof order.
struct TriMesh {
  int blocks_per_side = 0;
  Diagonal diagonal = Diagonal::kSouthWestToNorthEast;
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  // Local edge i of a triangle is the edge opposite local vertex i.
  std::vector<std::array<int, 3>> triangle_edges;
  std::vector<MeshEdge> edges;
  double h = 0.0;  // longest edge length

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }

  Point midpoint(int edge) const;
  Point centroid(int triangle) const;
  double signed_area(int triangle) const;
  std::array<Point, 3> corners(int triangle) const;
};

// n x n blocks over (0,1)^2, each block split into two triangles.
TriMesh build_structured_mesh(int blocks_per_side,
                              Diagonal diagonal = Diagonal::kSouthWestToNorthEast);

// Crouzeix-Raviart degrees of freedom. One dof per edge, with the same index
// as the edge; dofs on the outer boundary carry homogeneous Dirichlet data.
struct DofMap {
  int total = 0;
  std::vector<int> free_dofs;      // edge indices, ascending
  std::vector<int> boundary_dofs;  // edge indices, ascending
  std::vector<int> free_index;     // edge -> position in free_dofs, or -1

  int free_count() const { return static_cast<int>(free_dofs.size()); }
  bool is_free(int edge) const { return free_index[edge] >= 0; }
};

DofMap enumerate_cr_dofs(const TriMesh& mesh);

struct ControlSegment {
  Point start;
  Point end;
  double length = 0.0;
  Point normal;  // unit, outward with respect to the control volume
  int triangle = -1;

  Point midpoint() const { return 0.5 * (start + end); }
};

// Control volume b_e: the union of the triangles spanned by the ends of e and
// the centroids of its adjacent elements.
struct ControlVolume {
  Point midpoint;
  double area = 0.0;
  std::vector<ControlSegment> segments;
};

struct DualMesh {
  std::vector<ControlVolume> volumes;  // indexed by edge
};

DualMesh build_control_volumes(const TriMesh& mesh);

struct Interface {
  int first = -1;   // lower subdomain index
  int second = -1;  // higher subdomain index
  std::vector<int> dofs;  // edges on the open interface segment, ascending
};

// Nonoverlapping decomposition into m x m square subdomains. Subdomains are
// numbered row-major from the bottom-left corner; interfaces are ordered
// lexicographically by (first, second).
struct Partition {
  int subdomains_per_side = 0;
  double H = 0.0;
  std::vector<int> triangle_subdomain;
  std::vector<std::vector<int>> interior_dofs;  // per subdomain, edge indices
  std::vector<std::vector<int>> boundary_dofs;  // per subdomain, incl. outer boundary
  std::vector<Interface> interfaces;
  std::vector<int> edge_interface;  // edge -> interface index or -1

  int subdomain_count() const { return static_cast<int>(interior_dofs.size()); }
  int interface_count() const { return static_cast<int>(interfaces.size()); }
  int subdomain_of(Point p) const;
};

Partition build_partition(const TriMesh& mesh, int subdomains_per_side);

// Plain-text dump: `v x y`, `t i j k`, `e i j boundary_flag`, one per line.
void write_mesh(std::ostream& out, const TriMesh& mesh);

}  // namespace crfve

#endif  // CRFVE_MESH_HPP_
