#include "krf/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "krf/geometry.hpp"

namespace krf {

namespace {

std::size_t index4(int n, int i, int j, int k, int l) {
  return static_cast<std::size_t>(((i * n + j) * n + k) * n + l);
}

constexpr Real kHermitianTolerance = 1e-8L;

}  // namespace

Real CurvaturePointData::max_abs() const {
  Real out = 0.0L;
  for (const auto& v : tensor) out = std::max(out, std::abs(v));
  return out;
}

CurvaturePointData make_point_data(int n, std::vector<Complex> tensor) {
  CurvaturePointData p;
  p.n = n;
  p.tensor = std::move(tensor);
  p.ricci = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) p.ricci(i, j) += p(i, j, k, k);
  p.scalar = 0.0L;
  for (int i = 0; i < n; ++i) p.scalar += p.ricci(i, i).real();
  p.traceless_ricci = p.ricci;
  for (int i = 0; i < n; ++i) p.traceless_ricci(i, i) -= p.scalar / static_cast<Real>(n);

  p.holomorphic_sectional.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p.holomorphic_sectional[static_cast<std::size_t>(i)] = p(i, i, i, i).real();
  p.bisectional_min = p(0, 0, 0, 0).real();
  p.bisectional_max = p.bisectional_min;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Real v = p(i, i, j, j).real();
      p.bisectional_min = std::min(p.bisectional_min, v);
      p.bisectional_max = std::max(p.bisectional_max, v);
    }
  }
  return p;
}

std::vector<Complex> space_form_tensor(int n, Real c) {
  std::vector<Complex> t(static_cast<std::size_t>(n * n * n * n), Complex(0.0L));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Real v = 0.0L;
          if (i == j && k == l) v += c;
          if (i == l && k == j) v += c;
          t[index4(n, i, j, k, l)] = Complex(v);
        }
  return t;
}

CurvatureComponents curvature_components(const RadialKahlerState& state) {
  const std::size_t m = state.size();
  const int n = state.dimension();
  const auto ric = ricci_eigenvalues(state);
  CurvatureComponents out{ScalarField(m, 0.0L), ScalarField(m, 0.0L), ScalarField(m, 0.0L),
                          ScalarField(m, 0.0L)};
  if (n == 1) {
    out.a = ric.radial;
    return out;
  }
  const auto& dp = state.dpotential();
  const auto& ddp = state.ddpotential();
  for (std::size_t i = 0; i < m; ++i) out.d[i] = (dp[i] - ddp[i]) / (dp[i] * dp[i]);
  state.regularize(out.d);
  const Real tangential = static_cast<Real>(n - 1);
  for (std::size_t i = 0; i < m; ++i) {
    out.c[i] = 2.0L * out.d[i];
    out.b[i] = ric.tangential[i] - static_cast<Real>(n) * out.d[i];
    out.a[i] = ric.radial[i] - tangential * out.b[i];
  }
  return out;
}

ScalarField curvature_norm(const RadialKahlerState& state) {
  const auto comp = curvature_components(state);
  ScalarField out(state.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::max({std::fabs(comp.a[i]), std::fabs(comp.b[i]), std::fabs(comp.c[i]),
                       std::fabs(comp.d[i])});
  }
  return out;
}

CurvaturePointData curvature_tensor_at(const RadialKahlerState& state, std::size_t node) {
  const std::size_t m = state.size();
  if (node < DiffOps::kHalfWidth || node + DiffOps::kHalfWidth >= m) {
    throw Error(ErrorKind::BoundaryNode, "curvature tensor requested at a boundary node");
  }
  return curvature_tensor_at(curvature_components(state), state.dimension(), node);
}

CurvaturePointData curvature_tensor_at(const CurvatureComponents& comp, int n, std::size_t node) {
  const Real a = comp.a[node], b = comp.b[node], c = comp.c[node], d = comp.d[node];
  std::vector<Complex> t(static_cast<std::size_t>(n * n * n * n), Complex(0.0L));
  t[index4(n, 0, 0, 0, 0)] = a;
  for (int al = 1; al < n; ++al) {
    t[index4(n, 0, 0, al, al)] = b;
    t[index4(n, al, al, 0, 0)] = b;
    t[index4(n, 0, al, al, 0)] = b;
    t[index4(n, al, 0, 0, al)] = b;
    t[index4(n, al, al, al, al)] = c;
    for (int be = 1; be < n; ++be) {
      if (be == al) continue;
      t[index4(n, al, al, be, be)] = d;
      t[index4(n, al, be, be, al)] = d;
    }
  }
  return make_point_data(n, std::move(t));
}

std::vector<ComplexMatrix> traceless_hermitian_basis(int n) {
  std::vector<ComplexMatrix> basis;
  const Real root_half = std::sqrt(0.5L);
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      ComplexMatrix sym = ComplexMatrix::Zero(n, n);
      sym(j, k) = sym(k, j) = root_half;
      basis.push_back(sym);
      ComplexMatrix anti = ComplexMatrix::Zero(n, n);
      anti(j, k) = Complex(0.0L, -root_half);
      anti(k, j) = Complex(0.0L, root_half);
      basis.push_back(anti);
    }
  }
  for (int l = 1; l < n; ++l) {
    ComplexMatrix diag = ComplexMatrix::Zero(n, n);
    const Real norm = 1.0L / std::sqrt(static_cast<Real>(l * (l + 1)));
    for (int i = 0; i < l; ++i) diag(i, i) = norm;
    diag(l, l) = -static_cast<Real>(l) * norm;
    basis.push_back(diag);
  }
  return basis;
}

PhongSturmResult phong_sturm_operator(const CurvaturePointData& point, int n) {
  if (n < 2) {
    throw Error(ErrorKind::DimensionTooSmall, "traceless (1,1)-forms need n >= 2");
  }
  const Real inv_n = 1.0L / static_cast<Real>(n);
  auto entry = [&](int i, int j, int k, int l) {
    Complex v = point(i, j, k, l);
    if (k == l) v -= inv_n * point.traceless_ricci(i, j);
    if (i == j) v -= inv_n * point.traceless_ricci(k, l);
    if (i == j && k == l) v += inv_n * inv_n * point.scalar;
    return v;
  };
  const auto basis = traceless_hermitian_basis(n);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  RealMatrix m(dim, dim);
  Real imaginary = 0.0L;
  for (Eigen::Index b = 0; b < dim; ++b) {
    const auto& phi = basis[static_cast<std::size_t>(b)];
    ComplexMatrix image = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) image(i, j) += entry(i, j, k, l) * phi(l, k);
    for (Eigen::Index a = 0; a < dim; ++a) {
      const Complex v = (basis[static_cast<std::size_t>(a)] * image).trace();
      m(a, b) = v.real();
      imaginary = std::max(imaginary, std::fabs(v.imag()));
    }
  }
  const Real asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kHermitianTolerance || imaginary > kHermitianTolerance) {
    throw Error(ErrorKind::NonHermitian, "contracted operator is not hermitian");
  }
  PhongSturmResult out;
  out.matrix = 0.5L * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(out.matrix, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  out.sum_two_lowest = ev(0) + ev(1);
  return out;
}

}  // namespace krf
