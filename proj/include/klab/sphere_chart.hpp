#pragma once

// Polar chart of the round sphere of radius R and its cotangent lift to the
// R^3 embedding. Templated on the scalar so that AutoDiff types give exact
// tangent maps.

#include <array>
#include <cmath>

namespace klab::sphere {

/// Position X on the sphere and the covector as an ambient tangent vector U
/// (U = metric-raised covector, |U| = p).
template <class S>
struct Embedded {
  std::array<S, 3> X;
  std::array<S, 3> U;
};

template <class S>
Embedded<S> embed(const S& theta, const S& phi, const S& xi_theta, const S& xi_phi, double R) {
  using std::cos;
  using std::sin;
  const S st = sin(theta), ct = cos(theta), sp = sin(phi), cp = cos(phi);
  Embedded<S> e;
  e.X = {R * st * cp, R * st * sp, R * ct};
  const std::array<S, 3> e_theta = {R * ct * cp, R * ct * sp, -R * st};
  const std::array<S, 3> e_phi = {-R * st * sp, R * st * cp, S(0.0)};
  const S v_theta = xi_theta / (R * R);
  const S v_phi = xi_phi / (R * R * st * st);
  for (int i = 0; i < 3; ++i) e.U[i] = v_theta * e_theta[i] + v_phi * e_phi[i];
  return e;
}

/// Inverse of embed; division-free in the covector part, so it is regular up to
/// (but not at) the poles.
template <class S>
std::array<S, 4> chart(const Embedded<S>& e, double R) {
  using std::atan2;
  using std::cos;
  using std::sin;
  using std::sqrt;
  const S rho = sqrt(e.X[0] * e.X[0] + e.X[1] * e.X[1]);
  const S theta = atan2(rho, e.X[2]);
  const S phi = atan2(e.X[1], e.X[0]);
  const S st = sin(theta), ct = cos(theta), sp = sin(phi), cp = cos(phi);
  const std::array<S, 3> e_theta = {R * ct * cp, R * ct * sp, -R * st};
  const std::array<S, 3> e_phi = {-R * st * sp, R * st * cp, S(0.0)};
  S xt = S(0.0), xp = S(0.0);
  for (int i = 0; i < 3; ++i) {
    xt += e.U[i] * e_theta[i];
    xp += e.U[i] * e_phi[i];
  }
  return {theta, phi, xt, xp};
}

/// Great-circle flow of the homogeneous Hamiltonian p: unit speed, covector
/// length preserved.
template <class S>
Embedded<S> great_circle(const Embedded<S>& e, double t, double R) {
  using std::sqrt;
  const S p = sqrt(e.U[0] * e.U[0] + e.U[1] * e.U[1] + e.U[2] * e.U[2]);
  const double c = std::cos(t / R), s = std::sin(t / R);
  Embedded<S> out;
  for (int i = 0; i < 3; ++i) {
    const S w = e.U[i] / p;
    out.X[i] = c * e.X[i] + (R * s) * w;
    out.U[i] = p * ((-s / R) * e.X[i] + c * w);
  }
  return out;
}

/// Cyclic relabelling of the R^3 axes that sends axis k to the z axis (k = 2 is
/// the identity). Cyclic permutations are rotations, so the lifted chart change
/// is canonical.
template <class S>
std::array<S, 3> rotate_axis_to_z(const std::array<S, 3>& v, int k) {
  if (k == 0) return {v[1], v[2], v[0]};
  if (k == 1) return {v[2], v[0], v[1]};
  return v;
}

template <class S>
std::array<S, 3> rotate_z_to_axis(const std::array<S, 3>& v, int k) {
  if (k == 0) return {v[2], v[0], v[1]};
  if (k == 1) return {v[1], v[2], v[0]};
  return v;
}

}  // namespace klab::sphere
