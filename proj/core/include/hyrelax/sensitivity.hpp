#pragma once

#include "hyrelax/integrator.hpp"
#include "hyrelax/relaxation.hpp"
#include "hyrelax/trajectory.hpp"

#include <vector>

namespace hyrelax {

/// Jacobian of the relaxed field of mode j over the mode state (x, z).
/// Analytic where the mode fields provide one, otherwise central differences.
Mat field_jacobian(const RelaxedSystem& rs, ModeIndex j, const Vec& xz, const Vec& u);

/// Central finite-difference Jacobian of the same field, step 1e-6 (1 + |x_i|).
Mat field_jacobian_fd(const RelaxedSystem& rs, ModeIndex j, const Vec& xz, const Vec& u);

struct VariationalResult {
  std::vector<Vec> dx;     // Dx at each nominal sample (mode-state length)
  Trajectory linearized;   // nominal + Dx
};

/// Linearized one-step recursion Dx_{k+1} = (d step / dx)(x_k) Dx_k along a
/// fixed-step nominal recorded at every step. dx0 has state length; the
/// auxiliary part starts at zero. Throws UnsupportedChart when the nominal
/// contains a reset.
VariationalResult variational_flow(const RelaxedSystem& rs, const IntegratorScheme& scheme, const Trajectory& nominal,
                                   const Vec& dx0, const InputSignal& u);

}  // namespace hyrelax
