#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "krf/radial_state.hpp"

namespace krf {

using Complex = std::complex<Real>;
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

/// Curvature tensor R_{i jbar k lbar} at one point in a unitary frame.
/// Storage index ((i n + j) n + k) n + l.
struct CurvaturePointData {
  int n = 1;
  std::vector<Complex> tensor;
  ComplexMatrix ricci;            // R_{i jbar} = sum_k R_{i jbar k kbar}
  Real scalar = 0.0L;
  ComplexMatrix traceless_ricci;  // R_{i jbar} - (R/n) delta
  std::vector<Real> holomorphic_sectional;
  Real bisectional_min = 0.0L;
  Real bisectional_max = 0.0L;

  Complex operator()(int i, int j, int k, int l) const {
    return tensor[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
  /// Largest absolute entry, the pointwise |Rm| used throughout.
  Real max_abs() const;
};

/// Fills Ricci, scalar, traceless Ricci and the frame-pair curvature extremes
/// from a raw tensor. Bisectional extremes run over all pairs (e_i, e_j),
/// including i = j.
CurvaturePointData make_point_data(int n, std::vector<Complex> tensor);

/// c (delta_ij delta_kl + delta_il delta_kj): constant holomorphic sectional curvature 2c.
std::vector<Complex> space_form_tensor(int n, Real c);

/// Independent components of the curvature of a U(n)-invariant metric in the
/// frame (radial e_1, tangential e_alpha):
///   a = R_{1 1bar 1 1bar}, b = R_{1 1bar a abar} = R_{1 abar a 1bar},
///   c = R_{a abar a abar}, d = R_{a abar b bbar} = R_{a bbar b abar}.
struct CurvatureComponents {
  ScalarField a, b, c, d;
};
CurvatureComponents curvature_components(const RadialKahlerState& state);

/// max |entry| of the curvature tensor at every node.
ScalarField curvature_norm(const RadialKahlerState& state);

/// Full tensor at an interior node (the one-sided stencil nodes are excluded).
CurvaturePointData curvature_tensor_at(const RadialKahlerState& state, std::size_t node);
/// Same, from precomputed components (no boundary check).
CurvaturePointData curvature_tensor_at(const CurvatureComponents& components, int n,
                                       std::size_t node);

struct PhongSturmResult {
  RealMatrix matrix;  // in an orthonormal basis of traceless hermitian forms
  Real sum_two_lowest = 0.0L;
};

/// The operator S_{i jbar k lbar} = R - (1/n)(S_{i jbar} delta_{k l} + delta_{i j} S_{k lbar})
/// + (R/n^2) delta_{i j} delta_{k l} acting as phi_{i jbar} -> S_{i jbar k lbar} phi_{l kbar}
/// on traceless hermitian forms.
PhongSturmResult phong_sturm_operator(const CurvaturePointData& point, int n);

/// Orthonormal basis (under tr(A B)) of traceless hermitian n x n matrices.
std::vector<ComplexMatrix> traceless_hermitian_basis(int n);

}  // namespace krf
