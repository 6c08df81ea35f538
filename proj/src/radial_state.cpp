#include "krf/radial_state.hpp"

#include <Eigen/Dense>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <sstream>

namespace krf {

namespace {

constexpr Real kCapNoiseTarget[2] = {1e-7L, 1e-8L};
constexpr Real kCapWindowWidth = 1.5L;  // in rho
constexpr int kCapDegree = 4;

// Estimated rounding noise at a node of a field carrying `level` Laplacians of
// the Ricci potential (R for level 1, Delta R for level 2).
Real curvature_noise(int level, Real potential, Real ddp, Real h) {
  const Real ratio = std::max(1.0L, std::fabs(potential) / ddp);
  Real noise = LDBL_EPSILON * 36.0L * ratio / (h * h * h * h * ddp);
  for (int l = 1; l < level; ++l) noise *= 6.0L / (h * h * ddp);
  return noise;
}

}  // namespace

std::vector<Real> UniformGrid::nodes() const {
  std::vector<Real> out(size);
  for (std::size_t i = 0; i < size; ++i) out[i] = (*this)[i];
  return out;
}

UniformGrid make_grid(Real start, Real stop, std::size_t size) {
  if (size < 2) throw Error(ErrorKind::GridTooCoarse, "grid needs at least two nodes");
  return UniformGrid{start, (stop - start) / static_cast<Real>(size - 1), size};
}

Real angular_volume_factor(int n) {
  Real factor = std::pow(2.0L * std::numbers::pi_v<Real>, static_cast<Real>(n));
  for (int k = 2; k < n; ++k) factor /= static_cast<Real>(k);
  return factor;
}

RadialKahlerState build_state(int n, const UniformGrid& grid, std::vector<Real> potential,
                              const Asymptotics& asymptotics, Real time,
                              std::shared_ptr<const DiffOps> ops) {
  if (n < 1) throw Error(ErrorKind::DimensionTooSmall, "complex dimension must be positive");
  if (grid.size < kMinGridSize) {
    std::ostringstream os;
    os << "grid has " << grid.size << " nodes, need at least " << kMinGridSize;
    throw Error(ErrorKind::GridTooCoarse, os.str());
  }
  if (potential.size() != grid.size) {
    throw Error(ErrorKind::GridMismatch, "potential samples do not match the grid");
  }
  for (Real p : potential) {
    if (!std::isfinite(p)) throw Error(ErrorKind::MetricDegenerate, "non-finite potential sample");
  }
  if (!ops || ops->size() != grid.size || ops->spacing() != grid.spacing) {
    ops = std::make_shared<DiffOps>(grid.size, grid.spacing);
  }

  RadialKahlerState s;
  s.n_ = n;
  s.grid_ = grid;
  s.time_ = time;
  s.asymptotics_ = asymptotics;
  s.ops_ = std::move(ops);
  s.potential_ = std::move(potential);
  s.dp_ = s.ops_->d1(s.potential_);
  s.ddp_ = s.ops_->d2(s.potential_);

  const std::size_t m = grid.size;
  s.lambda_r_.resize(m);
  s.lambda_t_.resize(m);
  s.log_det_.resize(m);
  s.volume_weight_.resize(m);
  const Real angular = angular_volume_factor(n);
  for (std::size_t i = 0; i < m; ++i) {
    const Real dp = s.dp_[i];
    const Real ddp = s.ddp_[i];
    if (!(dp > 0.0L) || !(ddp > 0.0L)) {
      std::ostringstream os;
      os << "P'=" << static_cast<double>(dp) << ", P''=" << static_cast<double>(ddp)
         << " at rho=" << static_cast<double>(grid[i]);
      throw Error(ErrorKind::MetricDegenerate, os.str());
    }
    const Real e = std::exp(-grid[i]);
    s.lambda_r_[i] = ddp * e;
    s.lambda_t_[i] = dp * e;
    s.log_det_[i] = static_cast<Real>(n - 1) * std::log(dp) + std::log(ddp) -
                    static_cast<Real>(n) * grid[i];
    s.volume_weight_[i] = angular * std::pow(dp, static_cast<Real>(n - 1)) * ddp;
  }

  // Quantities with two derivatives of log det g at the first 2 * kHalfWidth
  // nodes depend on one-sided second derivatives of P; they always belong to the cap.
  const auto window = std::max<std::size_t>(
      12, static_cast<std::size_t>(std::ceil(kCapWindowWidth / grid.spacing)));
  s.cap_window_ = window;
  // Fields at the first 2 * kHalfWidth nodes depend on one-sided second
  // derivatives of P, their Laplacians on one more stencil width; these always
  // belong to the cap. Beyond that the cap extends while the estimated rounding
  // noise exceeds its target, but never into the outer half of the grid.
  const std::size_t limit = m / 2 > window ? m / 2 - window : 0;
  std::size_t previous = 0;
  for (int level = 1; level <= 2; ++level) {
    std::size_t cap = std::max<std::size_t>((level + 1) * DiffOps::kHalfWidth, previous);
    while (cap < limit && curvature_noise(level, s.potential_[cap], s.ddp_[cap], grid.spacing) >
                              kCapNoiseTarget[level - 1]) {
      ++cap;
    }
    s.cap_index_[level - 1] = cap <= limit ? cap : 0;
    previous = cap;
  }
  return s;
}

RadialKahlerState build_state(int n, std::span<const Real> nodes, std::vector<Real> potential,
                              const Asymptotics& asymptotics, Real time) {
  if (nodes.size() < kMinGridSize) {
    throw Error(ErrorKind::GridTooCoarse, "grid needs at least 16 nodes");
  }
  const Real h = (nodes.back() - nodes.front()) / static_cast<Real>(nodes.size() - 1);
  if (!(h > 0.0L)) throw Error(ErrorKind::GridNotUniform, "grid must be strictly increasing");
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (std::fabs((nodes[i] - nodes[i - 1]) - h) > 1e-9L * std::max(1.0L, h)) {
      throw Error(ErrorKind::GridNotUniform, "grid spacing is not uniform");
    }
  }
  return build_state(n, UniformGrid{nodes.front(), h, nodes.size()}, std::move(potential),
                     asymptotics, time);
}

void RadialKahlerState::regularize(std::vector<Real>& field, int level) const {
  const std::size_t cap = cap_index(level);
  if (cap == 0) return;
  using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
  const auto rows = static_cast<Eigen::Index>(cap_window_);
  Mat a(rows, kCapDegree + 1);
  Vec b(rows);
  const Real rho_c = grid_[cap];
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t i = cap + static_cast<std::size_t>(r);
    const Real xi = std::exp(grid_[i] - rho_c);
    Real p = 1.0L;
    for (int k = 0; k <= kCapDegree; ++k) {
      a(r, k) = p;
      p *= xi;
    }
    b(r) = field[i];
  }
  const Vec c = a.colPivHouseholderQr().solve(b);
  for (std::size_t i = 0; i < cap; ++i) {
    const Real xi = std::exp(grid_[i] - rho_c);
    Real acc = 0.0L;
    for (int k = kCapDegree; k >= 0; --k) acc = acc * xi + c(k);
    field[i] = acc;
  }
}

Real RadialKahlerState::origin_closure_defect() const {
  return std::fabs(lambda_r_[0] - lambda_t_[0]) / lambda_t_[0];
}

Real RadialKahlerState::rounding_noise(int level, std::size_t i) const {
  return curvature_noise(level == 2 ? 2 : 1, potential_[i], ddp_[i], grid_.spacing);
}

RadialKahlerState RadialKahlerState::rescaled(Real factor, Real time) const {
  if (!(factor > 0.0L) || !std::isfinite(factor)) {
    throw Error(ErrorKind::ConfigInvalid, "rescaling factor must be positive and finite");
  }
  RadialKahlerState s = *this;
  s.time_ = time;
  if (s.asymptotics_.far_field == FarField::Cylindrical) s.asymptotics_.far_rate *= factor;
  for (auto* v : {&s.potential_, &s.dp_, &s.ddp_, &s.lambda_r_, &s.lambda_t_}) {
    for (Real& x : *v) x *= factor;
  }
  const Real log_factor = static_cast<Real>(n_) * std::log(factor);
  const Real volume_factor = std::pow(factor, static_cast<Real>(n_));
  for (Real& x : s.log_det_) x += log_factor;
  for (Real& x : s.volume_weight_) x *= volume_factor;
  return s;
}

RadialKahlerState RadialKahlerState::with_potential(std::vector<Real> potential, Real time) const {
  return build_state(n_, grid_, std::move(potential), asymptotics_, time, ops_);
}

}  // namespace krf
