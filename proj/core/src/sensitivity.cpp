#include "hyrelax/sensitivity.hpp"

#include <cmath>

namespace hyrelax {

Mat field_jacobian(const RelaxedSystem& rs, ModeIndex j, const Vec& xz, const Vec& u) {
  return rs.state_jacobian(j, xz, u, false);
}

Mat field_jacobian_fd(const RelaxedSystem& rs, ModeIndex j, const Vec& xz, const Vec& u) {
  return finite_difference_jacobian([&](const Vec& v) { return rs.state_field(j, v, u, false); }, xz);
}

VariationalResult variational_flow(const RelaxedSystem& rs, const IntegratorScheme& scheme, const Trajectory& nominal,
                                   const Vec& dx0, const InputSignal& u) {
  if (nominal.empty()) throw DomainError("empty nominal trajectory");
  if (!nominal.events.empty())
    throw UnsupportedChart("nominal trajectory contains a reset; sensitivity is limited to a single chart");
  const auto n = static_cast<Eigen::Index>(rs.system().state_dim);
  if (dx0.size() != n) throw DomainError("perturbation has wrong dimension");
  const ModeIndex j = nominal.samples.front().mode;
  const auto q = static_cast<Eigen::Index>(rs.geometry().aux_dim(j));

  VariationalResult out;
  Vec d = Vec::Zero(n + q);
  d.head(n) = dx0;
  out.dx.reserve(nominal.samples.size());
  out.linearized.samples.reserve(nominal.samples.size());
  for (std::size_t k = 0; k < nominal.samples.size(); ++k) {
    const Sample& s = nominal.samples[k];
    if (s.mode != j) throw UnsupportedChart("nominal trajectory changes mode");
    out.dx.push_back(d);
    Sample lin = s;
    lin.x = s.x + d.head(n);
    if (q > 0) lin.z = s.z + d.tail(q);
    out.linearized.samples.push_back(std::move(lin));
    if (k + 1 == nominal.samples.size()) break;
    const double dt = nominal.samples[k + 1].t - s.t;
    if (std::abs(dt - scheme.h) > 1e-9 * scheme.h)
      throw DomainError("nominal must be recorded at every step of size h");
    Vec xz(n + q);
    xz << s.x, s.z;
    const Vec uk = u.at(s.t);
    const StateField F = [&](const Vec& v) { return rs.state_field(j, v, uk, false); };
    const StateJacobian DF = [&](const Vec& v) { return rs.state_jacobian(j, v, uk, false); };
    d = integrator_step_jacobian(scheme.kind, F, DF, xz, scheme.h) * d;
  }
  out.linearized.termination = nominal.termination;
  out.linearized.termination_time = nominal.termination_time;
  return out;
}

}  // namespace hyrelax
