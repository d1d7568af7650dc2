#ifndef ADFEM_MESH_HPP
#define ADFEM_MESH_HPP

#include <array>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace adfem {

/// Structured two-phase quadrilateral mesh. Phase 0 is the matrix, phase 1
/// the inclusion. Node (i, j) of the grid has index i + j*(nx+1); elements
/// are counter-clockwise bilinear quads.
struct Mesh {
  std::vector<std::array<double, 2>> nodes;
  std::vector<std::array<int, 4>> elements;
  std::vector<int> material_of;  // one phase label per element

  // Structured-grid metadata, filled by the generators.
  int nx = 0;
  int ny = 0;
  double lx = 0.0;
  double ly = 0.0;
  std::array<double, 2> inclusion_center{0.0, 0.0};
  double inclusion_radius = 0.0;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }
  int n_dof() const { return 2 * n_nodes(); }
  int node_index(int i, int j) const { return i + j * (nx + 1); }
};

struct DirichletConstraint {
  int node = 0;
  int component = 0;  // 0 = x, 1 = y
  double value = 0.0;
};

struct DirichletSpec {
  std::vector<DirichletConstraint> constraints;
};

/// Structured nx-by-ny grid of bilinear quads on [0,lx]x[0,ly]. An element is
/// phase 1 iff its centroid lies strictly inside the inclusion circle;
/// radius 0 yields a single-phase mesh.
inline Mesh generate_two_phase_mesh(int nx, int ny, double lx, double ly,
                                    std::array<double, 2> inclusion_center,
                                    double inclusion_radius) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("mesh: cell counts must be >= 1");
  if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("mesh: domain lengths must be > 0");
  if (inclusion_radius < 0.0) throw std::invalid_argument("mesh: inclusion radius must be >= 0");

  Mesh m;
  m.nx = nx;
  m.ny = ny;
  m.lx = lx;
  m.ly = ly;
  m.inclusion_center = inclusion_center;
  m.inclusion_radius = inclusion_radius;

  const double hx = lx / nx;
  const double hy = ly / ny;

  m.nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) m.nodes.push_back({i * hx, j * hy});

  m.elements.reserve(static_cast<std::size_t>(nx) * ny);
  m.material_of.reserve(static_cast<std::size_t>(nx) * ny);
  const double r2 = inclusion_radius * inclusion_radius;
  for (int ey = 0; ey < ny; ++ey) {
    for (int ex = 0; ex < nx; ++ex) {
      const int n0 = m.node_index(ex, ey);
      const int n1 = m.node_index(ex + 1, ey);
      const int n2 = m.node_index(ex + 1, ey + 1);
      const int n3 = m.node_index(ex, ey + 1);
      m.elements.push_back({n0, n1, n2, n3});
      const double cx = (ex + 0.5) * hx - inclusion_center[0];
      const double cy = (ey + 0.5) * hy - inclusion_center[1];
      m.material_of.push_back(cx * cx + cy * cy < r2 ? 1 : 0);
    }
  }
  return m;
}

/// Uniaxial-extension loading: left edge fixed in x, bottom-left corner fixed
/// in y, right edge prescribed u_x = applied_strain * lx.
inline DirichletSpec benchmark_bcs(const Mesh& mesh, double applied_strain) {
  if (mesh.nx < 1 || mesh.ny < 1)
    throw std::invalid_argument("benchmark_bcs: mesh lacks structured-grid metadata");
  DirichletSpec spec;
  spec.constraints.reserve(2 * (mesh.ny + 1) + 1);
  for (int j = 0; j <= mesh.ny; ++j)
    spec.constraints.push_back({mesh.node_index(0, j), 0, 0.0});
  spec.constraints.push_back({mesh.node_index(0, 0), 1, 0.0});
  const double u_right = applied_strain * mesh.lx;
  for (int j = 0; j <= mesh.ny; ++j)
    spec.constraints.push_back({mesh.node_index(mesh.nx, j), 0, u_right});
  return spec;
}

/// Throws if a constraint references a node outside the mesh or repeats a
/// (node, component) pair.
inline void validate_dirichlet(const DirichletSpec& spec, const Mesh& mesh) {
  std::vector<char> seen(static_cast<std::size_t>(mesh.n_dof()), 0);
  for (const auto& c : spec.constraints) {
    if (c.node < 0 || c.node >= mesh.n_nodes())
      throw std::out_of_range("dirichlet: constrained node outside mesh");
    if (c.component != 0 && c.component != 1)
      throw std::invalid_argument("dirichlet: component must be 0 (x) or 1 (y)");
    const std::size_t dof = static_cast<std::size_t>(2 * c.node + c.component);
    if (seen[dof]) throw std::invalid_argument("dirichlet: duplicate (node, component) pair");
    seen[dof] = 1;
  }
}

struct RefineBase {
  int nx = 1;
  int ny = 1;
  double lx = 1.0;
  double ly = 1.0;
  std::array<double, 2> inclusion_center{0.5, 0.5};
  double inclusion_radius = 0.0;
};

/// Meshes with (nx*2^k, ny*2^k) cells for k = 0..levels-1 on identical
/// geometry, so the inclusion is resolved progressively.
inline std::vector<Mesh> refine_series(const RefineBase& base, int levels) {
  if (levels < 1) throw std::invalid_argument("refine_series: levels must be >= 1");
  std::vector<Mesh> out;
  out.reserve(static_cast<std::size_t>(levels));
  int nx = base.nx;
  int ny = base.ny;
  for (int k = 0; k < levels; ++k) {
    out.push_back(generate_two_phase_mesh(nx, ny, base.lx, base.ly, base.inclusion_center,
                                          base.inclusion_radius));
    nx *= 2;
    ny *= 2;
  }
  return out;
}

/// Plain-text mesh listing for debugging; not a stability contract.
inline void write_mesh_text(std::ostream& os, const Mesh& m) {
  char line[128];
  for (int i = 0; i < m.n_nodes(); ++i) {
    std::snprintf(line, sizeof line, "node %d %.17g %.17g\n", i, m.nodes[i][0], m.nodes[i][1]);
    os << line;
  }
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto& c = m.elements[e];
    std::snprintf(line, sizeof line, "elem %d %d %d %d %d %d\n", e, c[0], c[1], c[2], c[3],
                  m.material_of[e]);
    os << line;
  }
}

}  // namespace adfem

#endif  // ADFEM_MESH_HPP
