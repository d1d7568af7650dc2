#ifndef ADFEM_MATERIAL_HPP
#define ADFEM_MATERIAL_HPP

#include <array>
#include <stdexcept>
#include <utility>

#include "adfem/dual.hpp"
#include "adfem/errors.hpp"

namespace adfem {

enum class MaterialModel { LinearElasticPlaneStrain, StVenantKirchhoff };

struct Material {
  MaterialModel model = MaterialModel::LinearElasticPlaneStrain;
  double E = 1.0;   // Young's modulus
  double nu = 0.3;  // Poisson ratio

  double lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
  double mu() const { return E / (2.0 * (1.0 + nu)); }

  void validate() const {
    if (!(E > 0.0)) throw std::invalid_argument("material: E must be > 0");
    if (!(nu > -1.0 && nu < 0.5)) throw std::invalid_argument("material: nu must be in (-1, 0.5)");
  }
};

template <class T>
using Mat2 = std::array<std::array<T, 2>, 2>;

/// Plane-strain Hooke law on Voigt strain [exx, eyy, gxy].
template <class T>
std::array<T, 3> stress_linear(const std::array<T, 3>& strain, const Material& m) {
  const double c = m.E / ((1.0 + m.nu) * (1.0 - 2.0 * m.nu));
  const double c11 = c * (1.0 - m.nu);
  const double c12 = c * m.nu;
  const double c33 = c * (1.0 - 2.0 * m.nu) / 2.0;
  return {c11 * strain[0] + c12 * strain[1], c12 * strain[0] + c11 * strain[1], c33 * strain[2]};
}

template <class T>
struct SvkStress {
  Mat2<T> S;        // second Piola-Kirchhoff stress
  Mat2<T> E_green;  // Green-Lagrange strain
};

/// St. Venant-Kirchhoff law: E = (F^T F - I)/2, S = lambda tr(E) I + 2 mu E.
template <class T>
SvkStress<T> stress_svk(const Mat2<T>& F, const Material& m) {
  const T det = F[0][0] * F[1][1] - F[0][1] * F[1][0];
  if (!(value_of(det) > 0.0))
    throw InvertedElementError("stress_svk: deformation gradient determinant <= 0");

  SvkStress<T> out;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      T c = F[0][a] * F[0][b] + F[1][a] * F[1][b];
      out.E_green[a][b] = 0.5 * (a == b ? c - 1.0 : c);
    }
  }
  const double lam = m.lambda();
  const double mu = m.mu();
  const T tr = out.E_green[0][0] + out.E_green[1][1];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      out.S[a][b] = 2.0 * mu * out.E_green[a][b] + (a == b ? lam * tr : T(0.0));
  return out;
}

}  // namespace adfem

#endif  // ADFEM_MATERIAL_HPP
