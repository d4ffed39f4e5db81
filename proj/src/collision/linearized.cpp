#include <cmath>
#include <sstream>

#include "segrekin/collision.hpp"
#include "segrekin/error.hpp"

namespace segrekin {

namespace {

void fill_null_space(LinearCollisionOperator& op) {
  const VelocityGrid& vg = op.vgrid;
  const std::size_t N = vg.size();
  const int d = vg.dim_v;
  const int m = op.kind == OperatorKind::L ? d + 2 : 1;
  op.null_basis.resize(N, m);
  Eigen::MatrixXd chi(N, m);
  for (std::size_t k = 0; k < N; ++k) {
    auto v = vg.velocity(k);
    chi(k, 0) = 1.0;
    if (m > 1) {
      double s = 0.0;
      for (int a = 0; a < d; ++a) {
        double c = v[a] - op.params.u[a];
        chi(k, 1 + a) = c;
        s += c * c;
      }
      chi(k, m - 1) = s;
    }
    for (int a = 0; a < m; ++a) op.null_basis(k, a) = op.M[k] * chi(k, a);
  }
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t k = 0; k < N; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) gram(i, j) += vg.weight * op.M[k] * chi(k, i) * chi(k, j);
  op.gram_inverse = gram.inverse();
}

}  // namespace

std::vector<double> LinearCollisionOperator::apply(std::span<const double> h) const {
  Eigen::Map<const Eigen::VectorXd> x(h.data(), static_cast<Eigen::Index>(h.size()));
  Eigen::VectorXd y = matrix * x;
  return {y.data(), y.data() + y.size()};
}

std::vector<double> LinearCollisionOperator::project_null(std::span<const double> h) const {
  const std::size_t N = h.size();
  const Eigen::Index m = null_basis.cols();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
  for (std::size_t k = 0; k < N; ++k)
    if (M[k] > 0.0)
      for (Eigen::Index a = 0; a < m; ++a) c(a) += vgrid.weight * null_basis(k, a) * h[k] / M[k];
  Eigen::VectorXd y = null_basis * (gram_inverse * c);
  return {y.data(), y.data() + y.size()};
}

double LinearCollisionOperator::inner(std::span<const double> a, std::span<const double> b) const {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k] / M[k];
  return s * vgrid.weight;
}

LinearCollisionOperator build_linearized(OperatorKind kind, const MaxwellianParams& p, const CollisionLattice& lat) {
  const VelocityGrid& vg = lat.vgrid();
  const std::size_t N = vg.size();
  if (N > kMaxLinearizedNodes) {
    std::ostringstream os;
    os << "linearized operator needs a dense " << N << "x" << N << " matrix; node count is capped at "
       << kMaxLinearizedNodes;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  LinearCollisionOperator op;
  op.kind = kind;
  op.vgrid = vg;
  op.params = p;
  op.M = maxwellian(p, vg);
  op.matrix = Eigen::MatrixXd::Zero(N, N);
  op.nu_diag.assign(N, 0.0);
  const auto& M = op.M;
  Eigen::MatrixXd& A = op.matrix;
  std::vector<std::array<int, 3>> dv;
  lat.for_each_class([&](const std::vector<std::pair<int, int>>& mem, int r2) {
    const std::size_t n = mem.size();
    dv.resize(n);
    for (std::size_t q = 0; q < n; ++q) {
      auto a = lat.multi(mem[q].first), b = lat.multi(mem[q].second);
      dv[q] = {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
    }
    for (std::size_t m = 0; m < n; ++m) {
      const int i = mem[m].first, j = mem[m].second;
      double tot = 0.0;
      for (std::size_t q = 0; q < n; ++q) {
        double r = lat.rate(r2, n, dv[m], dv[q]);
        tot += r;
        A(i, mem[q].first) += r * M[mem[q].second];
        if (kind == OperatorKind::L) A(i, mem[q].second) += r * M[mem[q].first];
      }
      op.nu_diag[i] += tot * M[j];
      if (kind == OperatorKind::L) A(i, j) -= tot * M[i];
    }
  });
  for (std::size_t i = 0; i < N; ++i) A(i, i) -= op.nu_diag[i];
  fill_null_space(op);
  return op;
}

LinearCollisionOperator build_bgk_linearized(OperatorKind kind, const MaxwellianParams& p, const VelocityGrid& vg,
                                             double nu_collision) {
  if (!(nu_collision > 0.0)) throw Error(ErrorCode::InvalidArgument, "collision rate must be positive");
  const std::size_t N = vg.size();
  if (N > kMaxLinearizedNodes)
    throw Error(ErrorCode::InvalidArgument, "linearized operator node count exceeds the dense-matrix cap");
  LinearCollisionOperator op;
  op.kind = kind;
  op.vgrid = vg;
  op.params = p;
  op.M = maxwellian(p, vg);
  fill_null_space(op);
  // P = B G^{-1} B^T diag(w / M)
  Eigen::MatrixXd right = op.null_basis.transpose();
  for (std::size_t k = 0; k < N; ++k) right.col(k) *= vg.weight / op.M[k];
  Eigen::MatrixXd P = op.null_basis * op.gram_inverse * right;
  op.matrix = nu_collision * (P - Eigen::MatrixXd::Identity(N, N));
  op.nu_diag.assign(N, nu_collision);
  return op;
}

OrthogonalSolve solve_orthogonal(const LinearCollisionOperator& op, std::span<const double> source, double tolerance,
                                 int max_iterations) {
  const std::size_t N = op.vgrid.size();
  if (source.size() != N) throw Error(ErrorCode::GridMismatch, "source does not match the operator's velocity grid");
  if (max_iterations <= 0) max_iterations = static_cast<int>(10 * N);
  Eigen::VectorXd s(N);
  for (std::size_t k = 0; k < N; ++k) s(k) = std::sqrt(op.vgrid.weight / op.M[k]);
  // Symmetric form A~ = S A S^{-1}; its null space is S times the null basis.
  Eigen::MatrixXd At = s.asDiagonal() * op.matrix * s.cwiseInverse().asDiagonal();
  Eigen::MatrixXd SB = s.asDiagonal() * op.null_basis;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(SB);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(N, SB.cols());

  OrthogonalSolve out;
  out.x.assign(N, 0.0);
  Eigen::VectorXd b(N);
  for (std::size_t k = 0; k < N; ++k) b(k) = s(k) * source[k];
  double bnorm0 = b.norm();
  Eigen::VectorXd pc = Q.transpose() * b;
  out.projection_residual = bnorm0 > 0.0 ? pc.norm() / bnorm0 : 0.0;
  b -= Q * pc;
  double bnorm = b.norm();
  if (bnorm == 0.0) return out;

  auto project = [&](Eigen::VectorXd& v) { v -= Q * (Q.transpose() * v); };
  // CG on -A~ y = -b (positive definite on the complement).
  Eigen::VectorXd y = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd r = -b;
  Eigen::VectorXd pdir = r;
  double rr = r.squaredNorm();
  int it = 0;
  for (; it < max_iterations && std::sqrt(rr) > tolerance * bnorm; ++it) {
    Eigen::VectorXd Ap = -(At * pdir);
    project(Ap);
    double alpha = rr / pdir.dot(Ap);
    y += alpha * pdir;
    r -= alpha * Ap;
    double rr_new = r.squaredNorm();
    pdir = r + (rr_new / rr) * pdir;
    project(pdir);
    rr = rr_new;
  }
  project(y);
  Eigen::VectorXd res = At * y - b;
  project(res);
  out.residual = res.norm() / bnorm;
  out.iterations = it;
  if (out.residual > std::max(1e3 * tolerance, 1e-9)) {
    std::ostringstream os;
    os << "orthogonal solve did not converge after " << it << " iterations, residual " << out.residual;
    throw Error(ErrorCode::NotConverged, os.str());
  }
  for (std::size_t k = 0; k < N; ++k) out.x[k] = y(k) / s(k);
  return out;
}

}  // namespace segrekin
