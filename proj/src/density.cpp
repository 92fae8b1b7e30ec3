#include "qlimit/density.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qlimit/error.hpp"

namespace qlimit {

namespace {

void require_normalized(const WaveFunction& u, const char* what) {
  const double n = norm(u);
  if (!(std::abs(n - 1.0) < 1e-10)) {
    std::ostringstream os;
    os.precision(17);
    os << what << " must be normalized (norm = " << n << ")";
    throw Error(ErrorCode::not_normalized, os.str());
  }
}

void require_grid(const GridSpec& grid, const WaveFunction& u) {
  if (!(u.grid() == grid)) throw Error(ErrorCode::grid_mismatch, "operator and state live on different grids");
  if (u.domain() != Domain::position)
    throw Error(ErrorCode::domain_mismatch, "operator vectors must be position-domain wavefunctions");
}

}  // namespace

PureDensity::PureDensity(WaveFunction u) : u_(std::move(u)) {
  if (u_.domain() != Domain::position)
    throw Error(ErrorCode::domain_mismatch, "pure states are built from position-domain wavefunctions");
  require_normalized(u_, "pure-state vector");
}

cplx kernel_at(const PureDensity& rho, const KernelPoint& p) {
  if (p.domain != Domain::position)
    throw Error(ErrorCode::domain_mismatch, "kernel_at expects a position-domain point");
  const auto& u = rho.state();
  const std::size_t i = locate(u.grid(), Domain::position, p.x);
  const std::size_t j = locate(u.grid(), Domain::position, p.y);
  return u[i] * std::conj(u[j]);
}

cplx fourier_kernel_at(const PureDensity& rho, const KernelPoint& p) {
  if (p.domain != Domain::frequency)
    throw Error(ErrorCode::domain_mismatch, "fourier_kernel_at expects a frequency-domain point");
  const auto& grid = rho.state().grid();
  const std::size_t i = locate(grid, Domain::frequency, p.x);
  const std::size_t j = locate(grid, Domain::frequency, p.y);
  const WaveFunction fu = fourier(rho.state());
  return fu[i] * std::conj(fu[j]);
}

BoundedOperator::BoundedOperator(const GridSpec& grid, Variant op) : grid_(grid), op_(std::move(op)) {
  if (auto* m = std::get_if<Multiplication>(&op_)) {
    if (m->values.size() != grid.size())
      throw Error(ErrorCode::grid_mismatch, "multiplication values do not match the grid size");
    for (const auto& z : m->values) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw Error(ErrorCode::invalid_argument, "multiplication values must be finite");
      norm_bound_ = std::max(norm_bound_, std::abs(z));
    }
  } else if (auto* r = std::get_if<RankOne>(&op_)) {
    require_grid(grid, r->v);
    require_grid(grid, r->w);
    norm_bound_ = norm(r->v) * norm(r->w);
  } else {
    auto& f = std::get<FiniteMatrix>(op_);
    const auto k = static_cast<Eigen::Index>(f.basis.size());
    if (k == 0) throw Error(ErrorCode::invalid_argument, "finite-matrix operator needs a nonempty basis");
    if (f.matrix.rows() != k || f.matrix.cols() != k)
      throw Error(ErrorCode::invalid_argument, "finite-matrix coefficients must be a square matrix of basis size");
    for (const auto& b : f.basis) require_grid(grid, b);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) {
        const cplx g = inner(f.basis[static_cast<std::size_t>(i)], f.basis[static_cast<std::size_t>(j)]);
        const cplx expected = i == j ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
        if (std::abs(g - expected) > 1e-10) {
          std::ostringstream os;
          os << "finite-matrix basis is not orthonormal: <b_" << i << ", b_" << j << "> = " << g;
          throw Error(ErrorCode::invalid_argument, os.str());
        }
      }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(f.matrix);
    norm_bound_ = svd.singularValues()(0);
  }
}

BoundedOperator BoundedOperator::identity(const GridSpec& grid) {
  return BoundedOperator(grid, Multiplication{std::vector<cplx>(grid.size(), cplx{1.0, 0.0})});
}

BoundedOperator BoundedOperator::projector(const WaveFunction& v) {
  return BoundedOperator(v.grid(), RankOne{v, v});
}

WaveFunction apply_operator(const BoundedOperator& a, const WaveFunction& u) {
  require_grid(a.grid(), u);
  return std::visit(
      [&](const auto& op) -> WaveFunction {
        using T = std::decay_t<decltype(op)>;
        std::vector<cplx> out(u.size(), cplx{0.0, 0.0});
        if constexpr (std::is_same_v<T, Multiplication>) {
          for (std::size_t i = 0; i < out.size(); ++i) out[i] = op.values[i] * u[i];
        } else if constexpr (std::is_same_v<T, RankOne>) {
          const cplx c = inner(op.w, u);
          for (std::size_t i = 0; i < out.size(); ++i) out[i] = op.v[i] * c;
        } else {
          const auto k = op.basis.size();
          std::vector<cplx> coeff(k);
          for (std::size_t j = 0; j < k; ++j) coeff[j] = inner(op.basis[j], u);
          for (std::size_t i = 0; i < k; ++i) {
            cplx c{0.0, 0.0};
            for (std::size_t j = 0; j < k; ++j)
              c += op.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * coeff[j];
            for (std::size_t n = 0; n < out.size(); ++n) out[n] += op.basis[i][n] * c;
          }
        }
        return WaveFunction(u.grid(), std::move(out), Domain::position);
      },
      a.variant());
}

cplx expectation(const WaveFunction& u, const BoundedOperator& a) {
  require_grid(a.grid(), u);
  if (const auto* m = std::get_if<Multiplication>(&a.variant())) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < u.size(); ++i) acc += std::norm(u[i]) * m->values[i];
    return acc * u.cell_volume();
  }
  return inner(u, apply_operator(a, u));
}

cplx trace_functional(const PureDensity& rho, const BoundedOperator& a) {
  return expectation(rho.state(), a);
}

double trace_distance_pure(const WaveFunction& u, const WaveFunction& v) {
  require_normalized(u, "first argument");
  require_normalized(v, "second argument");
  // sqrt(1 - |<u,v>|^2) is the norm of v's component orthogonal to u. Taking
  // that norm directly avoids the cancellation in 1 - |<u,v>|^2 for v ~ u.
  const WaveFunction uh = normalize(u), vh = normalize(v);
  const cplx c = inner(uh, vh);
  std::vector<cplx> r(vh.samples().begin(), vh.samples().end());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= c * uh[i];
  const double orth = norm(WaveFunction(u.grid(), std::move(r), u.domain()));
  return 2.0 * std::min(1.0, orth);
}

}  // namespace qlimit
