#include "crfve/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>

#include "crfve/errors.hpp"

namespace crfve {

Point TriMesh::midpoint(int edge) const {
  const auto& e = edges[edge];
  return 0.5 * (vertices[e.vertices[0]] + vertices[e.vertices[1]]);
}

Point TriMesh::centroid(int triangle) const {
  const auto& t = triangles[triangle];
  return (1.0 / 3.0) * (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]);
}

double TriMesh::signed_area(int triangle) const {
  const auto [a, b, c] = corners(triangle);
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

std::array<Point, 3> TriMesh::corners(int triangle) const {
  const auto& t = triangles[triangle];
  return {vertices[t[0]], vertices[t[1]], vertices[t[2]]};
}

TriMesh build_structured_mesh(int n, Diagonal diagonal) {
  if (n < 2) {
    throw InvalidParameter("build_structured_mesh: need at least 2 blocks per side, got " +
                           std::to_string(n));
  }
  TriMesh mesh;
  mesh.blocks_per_side = n;
  mesh.diagonal = diagonal;
  mesh.h = std::sqrt(2.0) / n;

  const int stride = n + 1;
  mesh.vertices.reserve(static_cast<std::size_t>(stride) * stride);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      mesh.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    }
  }

  mesh.triangles.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int sw = j * stride + i;
      const int se = sw + 1;
      const int nw = sw + stride;
      const int ne = nw + 1;
      if (diagonal == Diagonal::kSouthWestToNorthEast) {
        mesh.triangles.push_back({sw, se, ne});
        mesh.triangles.push_back({sw, ne, nw});
      } else {
        mesh.triangles.push_back({sw, se, nw});
        mesh.triangles.push_back({se, ne, nw});
      }
    }
  }

  // Midpoints sit on the half-grid, so 2n * coordinate is an exact integer key.
  auto key_of = [&](int a, int b) {
    const int ky = a / stride + b / stride;
    const int kx = a % stride + b % stride;
    return static_cast<long long>(ky) * (2 * n + 1) + kx;
  };

  std::map<long long, int> edge_of_key;
  std::vector<MeshEdge> unsorted;
  std::vector<std::array<int, 3>> local_edges(mesh.triangles.size());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      const int a = tri[(i + 1) % 3];
      const int b = tri[(i + 2) % 3];
      const long long key = key_of(a, b);
      auto [it, inserted] = edge_of_key.try_emplace(key, static_cast<int>(unsorted.size()));
      if (inserted) {
        MeshEdge e;
        e.vertices = {std::min(a, b), std::max(a, b)};
        e.triangles = {t, -1};
        unsorted.push_back(e);
      } else {
        unsorted[it->second].triangles[1] = t;
      }
      local_edges[t][i] = it->second;
    }
  }

  // std::map iteration is ascending in (y, x) midpoint order.
  std::vector<int> renumber(unsorted.size());
  mesh.edges.reserve(unsorted.size());
  for (const auto& [key, old] : edge_of_key) {
    renumber[old] = static_cast<int>(mesh.edges.size());
    MeshEdge e = unsorted[old];
    e.boundary = e.triangles[1] < 0;
    mesh.edges.push_back(e);
  }
  mesh.triangle_edges.resize(mesh.triangles.size());
  for (std::size_t t = 0; t < local_edges.size(); ++t) {
    for (int i = 0; i < 3; ++i) mesh.triangle_edges[t][i] = renumber[local_edges[t][i]];
  }
  return mesh;
}

DofMap enumerate_cr_dofs(const TriMesh& mesh) {
  DofMap dofs;
  dofs.total = mesh.edge_count();
  dofs.free_index.assign(mesh.edges.size(), -1);
  for (int e = 0; e < mesh.edge_count(); ++e) {
    if (mesh.edges[e].boundary) {
      dofs.boundary_dofs.push_back(e);
    } else {
      dofs.free_index[e] = static_cast<int>(dofs.free_dofs.size());
      dofs.free_dofs.push_back(e);
    }
  }
  return dofs;
}

namespace {

ControlSegment make_segment(Point from, Point to, Point opposite, int triangle) {
  ControlSegment s;
  s.start = from;
  s.end = to;
  const Point d = to - from;
  s.length = std::hypot(d.x, d.y);
  Point n{d.y / s.length, -d.x / s.length};
  // `opposite` lies inside the sub-triangle on the far side of the segment.
  if (dot(n, opposite - from) > 0.0) n = -1.0 * n;
  s.normal = n;
  s.triangle = triangle;
  return s;
}

}  // namespace

DualMesh build_control_volumes(const TriMesh& mesh) {
  DualMesh dual;
  dual.volumes.resize(mesh.edges.size());
  for (int e = 0; e < mesh.edge_count(); ++e) {
    const auto& edge = mesh.edges[e];
    auto& cv = dual.volumes[e];
    cv.midpoint = mesh.midpoint(e);
    const Point a = mesh.vertices[edge.vertices[0]];
    const Point b = mesh.vertices[edge.vertices[1]];
    for (int t : edge.triangles) {
      if (t < 0) continue;
      const Point c = mesh.centroid(t);
      cv.area += std::abs(mesh.signed_area(t)) / 3.0;
      cv.segments.push_back(make_segment(a, c, b, t));
      cv.segments.push_back(make_segment(c, b, a, t));
    }
  }
  return dual;
}

int Partition::subdomain_of(Point p) const {
  const int m = subdomains_per_side;
  const int sx = std::clamp(static_cast<int>(std::floor(p.x * m)), 0, m - 1);
  const int sy = std::clamp(static_cast<int>(std::floor(p.y * m)), 0, m - 1);
  return sy * m + sx;
}

Partition build_partition(const TriMesh& mesh, int m) {
  const int n = mesh.blocks_per_side;
  if (m < 1 || n % m != 0) {
    throw InvalidParameter("build_partition: " + std::to_string(m) +
                           " subdomains per side do not divide " + std::to_string(n) +
                           " blocks per side");
  }
  const int block = n / m;
  const int stride = n + 1;

  Partition part;
  part.subdomains_per_side = m;
  part.H = 1.0 / m;
  part.triangle_subdomain.resize(mesh.triangles.size());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    part.triangle_subdomain[t] = part.subdomain_of(mesh.centroid(t));
  }
  part.interior_dofs.resize(static_cast<std::size_t>(m) * m);
  part.boundary_dofs.resize(static_cast<std::size_t>(m) * m);

  std::vector<std::pair<int, int>> pairs;
  for (int sy = 0; sy < m; ++sy) {
    for (int sx = 0; sx < m; ++sx) {
      const int k = sy * m + sx;
      if (sx + 1 < m) pairs.emplace_back(k, k + 1);
      if (sy + 1 < m) pairs.emplace_back(k, k + m);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  std::map<std::pair<int, int>, int> interface_of;
  for (const auto& [k, l] : pairs) {
    interface_of[{k, l}] = static_cast<int>(part.interfaces.size());
    part.interfaces.push_back({k, l, {}});
  }

  part.edge_interface.assign(mesh.edges.size(), -1);
  for (int e = 0; e < mesh.edge_count(); ++e) {
    const auto& edge = mesh.edges[e];
    const int ix0 = edge.vertices[0] % stride, iy0 = edge.vertices[0] / stride;
    const int ix1 = edge.vertices[1] % stride, iy1 = edge.vertices[1] / stride;
    bool on_skeleton = edge.boundary;
    if (!edge.boundary) {
      const bool vertical = ix0 == ix1 && ix0 % block == 0;
      const bool horizontal = iy0 == iy1 && iy0 % block == 0;
      if (vertical || horizontal) {
        const int k = part.triangle_subdomain[edge.triangles[0]];
        const int l = part.triangle_subdomain[edge.triangles[1]];
        const int id = interface_of.at({std::min(k, l), std::max(k, l)});
        part.edge_interface[e] = id;
        part.interfaces[id].dofs.push_back(e);
        on_skeleton = true;
      }
    }
    if (on_skeleton) {
      for (int t : edge.triangles) {
        if (t >= 0) part.boundary_dofs[part.triangle_subdomain[t]].push_back(e);
      }
    } else {
      part.interior_dofs[part.triangle_subdomain[edge.triangles[0]]].push_back(e);
    }
  }
  return part;
}

void write_mesh(std::ostream& out, const TriMesh& mesh) {
  const auto precision = out.precision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x << ' ' << v.y << '\n';
  for (const auto& t : mesh.triangles) out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : mesh.edges) {
    out << "e " << e.vertices[0] << ' ' << e.vertices[1] << ' ' << (e.boundary ? 1 : 0) << '\n';
  }
  out.precision(precision);
}

}  // namespace crfve
