#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "krf/stencil.hpp"
#include "krf/types.hpp"

namespace krf {

/// Far-field behaviour of the potential as rho -> +infinity.
enum class FarField {
  Exponential,  // P ~ c + A e^{rate rho}: conical or flat ends
  Cylindrical,  // P'' -> rate: cigar-like ends of bounded circumference
};

/// Declared asymptotics of a radial potential. The near-origin end is always
/// the flat model P ~ a e^rho (smoothness at z = 0).
struct Asymptotics {
  FarField far_field = FarField::Exponential;
  Real far_rate = 1.0L;
  /// Declares that the Ricci potential tends to a constant at infinity.
  bool ricci_potential_bounded = false;
};

struct UniformGrid {
  Real start = 0.0L;
  Real spacing = 1.0L;
  std::size_t size = 0;

  Real operator[](std::size_t i) const { return start + spacing * static_cast<Real>(i); }
  Real back() const { return (*this)[size - 1]; }
  std::vector<Real> nodes() const;
  bool operator==(const UniformGrid&) const = default;
};

UniformGrid make_grid(Real start, Real stop, std::size_t size);

/// A U(n)-invariant Kahler metric on C^n, sampled through its radial Kahler
/// potential P(rho), rho = log|z|^2. The metric has radial eigenvalue
/// P'' e^{-rho} and tangential eigenvalue P' e^{-rho} (multiplicity n-1).
/// Immutable after construction.
class RadialKahlerState {
 public:
  int dimension() const { return n_; }
  const UniformGrid& grid() const { return grid_; }
  std::size_t size() const { return grid_.size; }
  Real rho(std::size_t i) const { return grid_[i]; }
  Real time() const { return time_; }
  const Asymptotics& asymptotics() const { return asymptotics_; }
  const DiffOps& ops() const { return *ops_; }
  std::shared_ptr<const DiffOps> shared_ops() const { return ops_; }

  const std::vector<Real>& potential() const { return potential_; }
  const std::vector<Real>& dpotential() const { return dp_; }
  const std::vector<Real>& ddpotential() const { return ddp_; }
  const std::vector<Real>& radial_eigenvalue() const { return lambda_r_; }
  const std::vector<Real>& tangential_eigenvalue() const { return lambda_t_; }
  const std::vector<Real>& log_det() const { return log_det_; }
  /// Riemannian volume per unit rho, integrated over the angular directions.
  const std::vector<Real>& volume_weight() const { return volume_weight_; }

  /// Nodes below this index lie in the pole cap: fields involving two or more
  /// derivatives of log det g are replaced there by their regular expansion
  /// in |z|^2, fitted just outside the cap. Level 1 covers curvature-type
  /// fields (four derivatives of P), level 2 their Laplacians (six), whose
  /// rounding noise reaches further out.
  std::size_t cap_index(int level = 1) const { return cap_index_[level == 2 ? 1 : 0]; }
  void regularize(std::vector<Real>& field, int level = 1) const;
  /// Estimated rounding error of level-1 or level-2 fields at node i.
  Real rounding_noise(int level, std::size_t i) const;

  /// Relative mismatch of the two metric eigenvalues at the first node; the
  /// flat model at the origin forces it to vanish.
  Real origin_closure_defect() const;

  RadialKahlerState with_potential(std::vector<Real> potential, Real time) const;

  /// The metric factor * g (potential factor * P) with the pole caps of g kept.
  RadialKahlerState rescaled(Real factor, Real time) const;

 private:
  friend RadialKahlerState build_state(int, const UniformGrid&, std::vector<Real>,
                                       const Asymptotics&, Real,
                                       std::shared_ptr<const DiffOps>);
  RadialKahlerState() = default;

  int n_ = 1;
  UniformGrid grid_;
  Real time_ = 0.0L;
  Asymptotics asymptotics_;
  std::shared_ptr<const DiffOps> ops_;
  std::vector<Real> potential_, dp_, ddp_, lambda_r_, lambda_t_, log_det_, volume_weight_;
  std::size_t cap_index_[2] = {0, 0};
  std::size_t cap_window_ = 0;
};

inline constexpr std::size_t kMinGridSize = 16;

RadialKahlerState build_state(int n, const UniformGrid& grid, std::vector<Real> potential,
                              const Asymptotics& asymptotics, Real time = 0.0L,
                              std::shared_ptr<const DiffOps> ops = nullptr);

/// Validating overload for explicit node lists: uniform spacing is checked.
RadialKahlerState build_state(int n, std::span<const Real> nodes, std::vector<Real> potential,
                              const Asymptotics& asymptotics, Real time = 0.0L);

/// (2 pi)^n / (n-1)!: angular factor of the radial volume element.
Real angular_volume_factor(int n);

}  // namespace krf
