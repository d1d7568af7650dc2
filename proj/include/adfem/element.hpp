#ifndef ADFEM_ELEMENT_HPP
#define ADFEM_ELEMENT_HPP

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>

#include "adfem/dual.hpp"
#include "adfem/material.hpp"

namespace adfem {

/// Bilinear quad shape functions and reference-coordinate gradients,
/// corner order (-1,-1), (1,-1), (1,1), (-1,1).
struct Quad4Shape {
  std::array<double, 4> n;
  std::array<std::array<double, 2>, 4> dn;  // dn[i] = (dN_i/dxi, dN_i/deta)
};

inline Quad4Shape shape_quad4(double xi, double eta) {
  constexpr double sx[4] = {-1.0, 1.0, 1.0, -1.0};
  constexpr double sy[4] = {-1.0, -1.0, 1.0, 1.0};
  Quad4Shape s;
  for (int i = 0; i < 4; ++i) {
    s.n[i] = 0.25 * (1.0 + sx[i] * xi) * (1.0 + sy[i] * eta);
    s.dn[i][0] = 0.25 * sx[i] * (1.0 + sy[i] * eta);
    s.dn[i][1] = 0.25 * sy[i] * (1.0 + sx[i] * xi);
  }
  return s;
}

struct GaussPoint {
  double xi;
  double eta;
  double w;
};

/// Tensor-product Gauss rules with 2 or 3 points per axis.
inline std::span<const GaussPoint> gauss_rule(int points_per_axis) {
  static constexpr double g2 = 0.57735026918962576451;  // 1/sqrt(3)
  static constexpr GaussPoint rule2[] = {
      {-g2, -g2, 1.0}, {g2, -g2, 1.0}, {g2, g2, 1.0}, {-g2, g2, 1.0}};
  static constexpr double g3 = 0.77459666924148337704;  // sqrt(3/5)
  static constexpr double w0 = 5.0 / 9.0;
  static constexpr double w1 = 8.0 / 9.0;
  static constexpr GaussPoint rule3[] = {
      {-g3, -g3, w0 * w0}, {0.0, -g3, w1 * w0}, {g3, -g3, w0 * w0},
      {-g3, 0.0, w0 * w1}, {0.0, 0.0, w1 * w1}, {g3, 0.0, w0 * w1},
      {-g3, g3, w0 * w0},  {0.0, g3, w1 * w0},  {g3, g3, w0 * w0}};
  if (points_per_axis == 2) return {rule2, 4};
  if (points_per_axis == 3) return {rule3, 9};
  throw std::invalid_argument("gauss_rule: only 2x2 and 3x3 rules are provided");
}

using ElementCoords = std::array<std::array<double, 2>, 4>;

struct ElementState {
  ElementCoords coords;       // undeformed nodal coordinates
  std::array<double, 8> u{};  // nodal displacements, (x,y) interleaved
  Material material;
};

/// Internal-force kernel of the bilinear quad, written entirely in the dual
/// primitive set so one source serves residual, Jacobian and JVP evaluation.
/// The geometry map stays in doubles; only displacement-dependent terms carry
/// tangents.
template <class T>
void element_internal_force(const ElementCoords& coords, const Material& mat, int gauss_points,
                            std::span<const T> u, std::span<T> out) {
  if (u.size() != 8 || out.size() != 8)
    throw std::invalid_argument("element_internal_force: expected 8 displacement dofs");
  for (int k = 0; k < 8; ++k) out[k] = T(0.0);

  for (const GaussPoint& gp : gauss_rule(gauss_points)) {
    const Quad4Shape s = shape_quad4(gp.xi, gp.eta);

    double J[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (int i = 0; i < 4; ++i)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) J[a][b] += s.dn[i][a] * coords[i][b];
    const double detJ = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (!(detJ > 0.0))
      throw std::invalid_argument("element_internal_force: non-positive element Jacobian");
    const double inv = 1.0 / detJ;
    const double Jinv[2][2] = {{J[1][1] * inv, -J[0][1] * inv}, {-J[1][0] * inv, J[0][0] * inv}};

    // dN_i/dx_b on the physical element
    double g[4][2];
    for (int i = 0; i < 4; ++i)
      for (int b = 0; b < 2; ++b) g[i][b] = s.dn[i][0] * Jinv[b][0] + s.dn[i][1] * Jinv[b][1];

    const double wdet = gp.w * detJ;

    if (mat.model == MaterialModel::LinearElasticPlaneStrain) {
      T exx(0.0), eyy(0.0), gxy(0.0);
      for (int i = 0; i < 4; ++i) {
        exx += u[2 * i] * g[i][0];
        eyy += u[2 * i + 1] * g[i][1];
        gxy += u[2 * i] * g[i][1] + u[2 * i + 1] * g[i][0];
      }
      const std::array<T, 3> sig = stress_linear<T>({exx, eyy, gxy}, mat);
      for (int i = 0; i < 4; ++i) {
        out[2 * i] += wdet * (g[i][0] * sig[0] + g[i][1] * sig[2]);
        out[2 * i + 1] += wdet * (g[i][1] * sig[1] + g[i][0] * sig[2]);
      }
    } else {
      Mat2<T> F;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          T h(0.0);
          for (int i = 0; i < 4; ++i) h += u[2 * i + a] * g[i][b];
          F[a][b] = a == b ? h + 1.0 : h;
        }
      const SvkStress<T> sv = stress_svk(F, mat);
      // First Piola-Kirchhoff stress P = F S drives the nodal forces.
      Mat2<T> P;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) P[a][b] = F[a][0] * sv.S[0][b] + F[a][1] * sv.S[1][b];
      for (int i = 0; i < 4; ++i)
        for (int a = 0; a < 2; ++a)
          out[2 * i + a] += wdet * (P[a][0] * g[i][0] + P[a][1] * g[i][1]);
    }
  }
}

inline std::array<double, 8> element_residual(const ElementState& state, int gauss_points = 2) {
  std::array<double, 8> r;
  element_internal_force<double>(state.coords, state.material, gauss_points, state.u, r);
  return r;
}

}  // namespace adfem

#endif  // ADFEM_ELEMENT_HPP
