#include "krf/geometry.hpp"

#include <cmath>

namespace krf {

namespace {

void check_grid(const RadialKahlerState& state, const ScalarField& field) {
  if (field.size() != state.size()) {
    throw Error(ErrorKind::GridMismatch, "field length does not match the state grid");
  }
}

}  // namespace

ScalarField raw_ricci_potential(const RadialKahlerState& state) {
  const auto& lr = state.radial_eigenvalue();
  const auto& lt = state.tangential_eigenvalue();
  const Real tangential = static_cast<Real>(state.dimension() - 1);
  ScalarField f(state.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = -tangential * std::log(lt[i]) - std::log(lr[i]);
  }
  return f;
}

ScalarField ricci_potential(const RadialKahlerState& state) {
  ScalarField f = raw_ricci_potential(state);
  const Real offset = f.front();
  for (auto& v : f) v -= offset;
  return f;
}

ScalarField laplacian(const RadialKahlerState& state, const ScalarField& field, int cap_level) {
  check_grid(state, field);
  const auto d1 = state.ops().d1(field);
  const auto d2 = state.ops().d2(field);
  const auto& dp = state.dpotential();
  const auto& ddp = state.ddpotential();
  const Real tangential = static_cast<Real>(state.dimension() - 1);
  ScalarField out(field.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = tangential * d1[i] / dp[i] + d2[i] / ddp[i];
  }
  state.regularize(out, cap_level);
  return out;
}

ScalarField scalar_curvature(const RadialKahlerState& state) {
  return laplacian(state, ricci_potential(state));
}

ScalarField grad_norm_sq(const RadialKahlerState& state, const ScalarField& field) {
  check_grid(state, field);
  const auto d1 = state.ops().d1(field);
  const auto& ddp = state.ddpotential();
  ScalarField out(field.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = d1[i] * d1[i] / ddp[i];
  state.regularize(out);
  return out;
}

RicciEigenvalues ricci_eigenvalues(const RadialKahlerState& state) {
  const auto f = ricci_potential(state);
  const auto d1 = state.ops().d1(f);
  const auto d2 = state.ops().d2(f);
  const auto& dp = state.dpotential();
  const auto& ddp = state.ddpotential();
  RicciEigenvalues out{ScalarField(f.size()), ScalarField(f.size())};
  for (std::size_t i = 0; i < f.size(); ++i) {
    out.radial[i] = d2[i] / ddp[i];
    out.tangential[i] = d1[i] / dp[i];
  }
  state.regularize(out.radial);
  state.regularize(out.tangential);
  return out;
}

ScalarField ricci_norm_sq(const RadialKahlerState& state) {
  const auto ric = ricci_eigenvalues(state);
  const Real tangential = static_cast<Real>(state.dimension() - 1);
  ScalarField out(state.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = ric.radial[i] * ric.radial[i] + tangential * ric.tangential[i] * ric.tangential[i];
  }
  return out;
}

ScalarField hessian20_norm_sq(const RadialKahlerState& state, const ScalarField& field) {
  check_grid(state, field);
  const auto d1 = state.ops().d1(field);
  const auto d2 = state.ops().d2(field);
  const auto& ddp = state.ddpotential();
  const auto dddp = state.ops().d1(ddp);
  ScalarField ratio(field.size());
  for (std::size_t i = 0; i < ratio.size(); ++i) {
    ratio[i] = (d2[i] - dddp[i] / ddp[i] * d1[i]) / ddp[i];
  }
  state.regularize(ratio);
  for (auto& v : ratio) v *= v;
  return ratio;
}

ScalarField radial_distance(const RadialKahlerState& state) {
  const auto& ddp = state.ddpotential();
  ScalarField speed(ddp.size());
  for (std::size_t i = 0; i < speed.size(); ++i) speed[i] = std::sqrt(ddp[i] / 2.0L);
  ScalarField s = cumulative_integral(speed, state.grid().spacing);
  // Below the first node the flat model gives sqrt(P''/2) ~ c e^{rho/2}.
  const Real head = 2.0L * speed.front();
  for (auto& v : s) v += head;
  return s;
}

ScalarField ball_volume(const RadialKahlerState& state) {
  const int n = state.dimension();
  Real factor = angular_volume_factor(n) / static_cast<Real>(n);
  ScalarField out(state.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = factor * std::pow(state.dpotential()[i], static_cast<Real>(n));
  }
  return out;
}

}  // namespace krf
