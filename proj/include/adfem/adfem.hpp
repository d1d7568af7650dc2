#ifndef ADFEM_ADFEM_HPP
#define ADFEM_ADFEM_HPP

// Umbrella header: differentiable quadrilateral FEM with batched sparse
// assembly, an explicit assembly->solver handoff, Krylov and banded direct
// solvers, and a Newton driver.

#include "adfem/assembly.hpp"
#include "adfem/autodiff.hpp"
#include "adfem/backend.hpp"
#include "adfem/dual.hpp"
#include "adfem/element.hpp"
#include "adfem/errors.hpp"
#include "adfem/krylov.hpp"
#include "adfem/linalg.hpp"
#include "adfem/material.hpp"
#include "adfem/mesh.hpp"
#include "adfem/newton.hpp"
#include "adfem/sparse.hpp"

#endif  // ADFEM_ADFEM_HPP
