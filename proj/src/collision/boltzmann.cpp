#include <algorithm>
#include <cmath>

#include "segrekin/collision.hpp"
#include "segrekin/error.hpp"
#include "segrekin/parallel.hpp"
#include "spectral.hpp"

#include <fftw3.h>

namespace segrekin {

namespace {

constexpr std::size_t kCenterChunks = 16;

using PairList = std::vector<std::pair<std::span<const double>, std::span<const double>>>;

struct Box {
  int lo[3];
  int hi[3];
  int S[3];
  long half;
};

inline bool make_box(const std::array<int, 3>& shape, std::size_t s, Box& b) {
  int w1 = 2 * shape[1] - 1, w2 = 2 * shape[2] - 1;
  b.S[2] = static_cast<int>(s % w2);
  b.S[1] = static_cast<int>((s / w2) % w1);
  b.S[0] = static_cast<int>(s / (static_cast<std::size_t>(w1) * w2));
  long P = 1;
  for (int a = 0; a < 3; ++a) {
    b.lo[a] = std::max(0, b.S[a] - shape[a] + 1);
    b.hi[a] = std::min(shape[a] - 1, b.S[a]);
    P *= b.hi[a] - b.lo[a] + 1;
  }
  b.half = P / 2;
  return b.half > 0;
}

// Calls fn(ia, ib, r2) for the unordered pairs {a, b}, a + b = S, a before b.
template <class Fn>
inline void visit_half(const std::array<int, 3>& shape, const Box& b, Fn&& fn) {
  const int n1 = shape[1], n2 = shape[2];
  long remaining = b.half;
  for (int x = b.lo[0]; x <= b.hi[0]; ++x) {
    const int cx = 2 * x - b.S[0];
    const int bx = b.S[0] - x;
    for (int y = b.lo[1]; y <= b.hi[1]; ++y) {
      const int cy = 2 * y - b.S[1];
      const int by = b.S[1] - y;
      const int r2xy = cx * cx + cy * cy;
      const long row = b.hi[2] - b.lo[2] + 1;
      const long take = std::min(row, remaining);
      const int ia0 = (x * n1 + y) * n2;
      const int ib0 = (bx * n1 + by) * n2 + b.S[2];
      for (int z = b.lo[2]; z < b.lo[2] + take; ++z) {
        const int cz = 2 * z - b.S[2];
        fn(ia0 + z, ib0 - z, r2xy + cz * cz);
      }
      remaining -= take;
      if (remaining == 0) return;
    }
  }
}

// Gain terms only: for the unordered product {f_k, g_k} every node of a class
// receives coef * (class average of f g).
template <int K>
void gain_kernel(const std::array<int, 3>& shape, const std::vector<double>& coef, std::size_t N,
                 const double* const* f, const double* const* g, std::vector<double>* out) {
  const std::size_t nS = static_cast<std::size_t>(2 * shape[0] - 1) * (2 * shape[1] - 1) * (2 * shape[2] - 1);
  const std::size_t R = coef.size();
  ChunkPlan plan = plan_chunks(nS, (nS + kCenterChunks - 1) / kCenterChunks);
  std::vector<std::vector<double>> gain(plan.count);
  parallel_chunks(plan, [&](std::size_t c, std::size_t begin, std::size_t end) {
    std::vector<double> G(R * K, 0.0);
    std::vector<int> cnt(R, 0);
    std::vector<int> touched;
    touched.reserve(R);
    std::vector<double>& gn = gain[c];
    gn.assign(N * K, 0.0);
    Box box;
    for (std::size_t s = begin; s < end; ++s) {
      if (!make_box(shape, s, box)) continue;
      visit_half(shape, box, [&](int ia, int ib, int r2) {
        if (cnt[r2]++ == 0) touched.push_back(r2);
        double* Gr = &G[static_cast<std::size_t>(r2) * K];
        for (int k = 0; k < K; ++k) Gr[k] += f[k][ia] * g[k][ib] + f[k][ib] * g[k][ia];
      });
      for (int r2 : touched) {
        const double inv = coef[r2] / (2.0 * cnt[r2]);
        for (int k = 0; k < K; ++k) G[static_cast<std::size_t>(r2) * K + k] *= inv;
      }
      visit_half(shape, box, [&](int ia, int ib, int r2) {
        const double* Gr = &G[static_cast<std::size_t>(r2) * K];
        double* ga = &gn[static_cast<std::size_t>(ia) * K];
        double* gb = &gn[static_cast<std::size_t>(ib) * K];
        for (int k = 0; k < K; ++k) {
          ga[k] += Gr[k];
          gb[k] += Gr[k];
        }
      });
      for (int r2 : touched) {
        cnt[r2] = 0;
        for (int k = 0; k < K; ++k) G[static_cast<std::size_t>(r2) * K + k] = 0.0;
      }
      touched.clear();
    }
  });
  for (int k = 0; k < K; ++k) {
    out[k].assign(N, 0.0);
    for (std::size_t c = 0; c < plan.count; ++c)
      for (std::size_t i = 0; i < N; ++i) out[k][i] += gain[c][i * K + k];
  }
}

double sphere_area(int d) { return d == 2 ? 2.0 * M_PI : 4.0 * M_PI; }

}  // namespace

// Loss frequency sum_j coef(|i - j|^2) g_j as a zero-padded FFT convolution.
struct CollisionLattice::LossConvolution {
  std::array<int, 3> shape{};
  std::array<int, 3> padded{};
  std::size_t real_size = 0;
  std::size_t complex_size = 0;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<std::complex<double>> kernel_hat;

  LossConvolution(const std::array<int, 3>& sh, const std::vector<double>& coef) : shape(sh) {
    for (int a = 0; a < 3; ++a) padded[a] = sh[a] == 1 ? 1 : 2 * sh[a];
    real_size = static_cast<std::size_t>(padded[0]) * padded[1] * padded[2];
    complex_size = static_cast<std::size_t>(padded[0]) * padded[1] * (padded[2] / 2 + 1);
    std::vector<double> r(real_size, 0.0);
    std::vector<std::complex<double>> c(complex_size);
    {
      std::lock_guard lk(detail::planner_mutex());
      unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
      forward = fftw_plan_dft_r2c_3d(padded[0], padded[1], padded[2], r.data(),
                                     reinterpret_cast<fftw_complex*>(c.data()), flags);
      backward = fftw_plan_dft_c2r_3d(padded[0], padded[1], padded[2], reinterpret_cast<fftw_complex*>(c.data()),
                                      r.data(), flags);
    }
    for (int x = -(sh[0] - 1); x <= sh[0] - 1; ++x)
      for (int y = -(sh[1] - 1); y <= sh[1] - 1; ++y)
        for (int z = -(sh[2] - 1); z <= sh[2] - 1; ++z) {
          int r2 = x * x + y * y + z * z;
          if (r2 == 0) continue;
          std::size_t ix = (x + padded[0]) % padded[0], iy = (y + padded[1]) % padded[1],
                      iz = (z + padded[2]) % padded[2];
          r[(ix * padded[1] + iy) * padded[2] + iz] = coef[r2];
        }
    kernel_hat.resize(complex_size);
    fftw_execute_dft_r2c(forward, r.data(), reinterpret_cast<fftw_complex*>(kernel_hat.data()));
  }

  ~LossConvolution() {
    std::lock_guard lk(detail::planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }

  std::vector<double> apply(std::span<const double> g) const {
    std::vector<double> r(real_size, 0.0);
    for (int x = 0; x < shape[0]; ++x)
      for (int y = 0; y < shape[1]; ++y)
        for (int z = 0; z < shape[2]; ++z)
          r[(static_cast<std::size_t>(x) * padded[1] + y) * padded[2] + z] =
              g[(static_cast<std::size_t>(x) * shape[1] + y) * shape[2] + z];
    std::vector<std::complex<double>> c(complex_size);
    fftw_execute_dft_r2c(forward, r.data(), reinterpret_cast<fftw_complex*>(c.data()));
    for (std::size_t i = 0; i < complex_size; ++i) c[i] *= kernel_hat[i];
    fftw_execute_dft_c2r(backward, reinterpret_cast<fftw_complex*>(c.data()), r.data());
    std::vector<double> out(g.size());
    const double s = 1.0 / static_cast<double>(real_size);
    for (int x = 0; x < shape[0]; ++x)
      for (int y = 0; y < shape[1]; ++y)
        for (int z = 0; z < shape[2]; ++z)
          out[(static_cast<std::size_t>(x) * shape[1] + y) * shape[2] + z] =
              r[(static_cast<std::size_t>(x) * padded[1] + y) * padded[2] + z] * s;
    return out;
  }
};

CollisionLattice::CollisionLattice(const VelocityGrid& vg, const CrossSection& cs) : vg_(vg), cs_(cs) {
  if (vg.dim_v < 2)
    throw Error(ErrorCode::InvalidArgument, "exact collision quadrature needs velocity dim 2 or 3");
  if (vg.nodes_per_axis < 8) throw Error(ErrorCode::InvalidArgument, "exact collision quadrature needs >= 8 nodes/axis");
  if (cs.sigma < 0.0 || cs.sigma > 1.0) throw Error(ErrorCode::InvalidArgument, "cross-section exponent must lie in [0,1]");
  int n = vg.nodes_per_axis;
  shape_ = vg.dim_v == 2 ? std::array<int, 3>{1, n, n} : std::array<int, 3>{n, n, n};
  int rmax = 0;
  for (int a = 0; a < 3; ++a) rmax += (shape_[a] - 1) * (shape_[a] - 1);
  coef_.resize(rmax + 1);
  double area = sphere_area(vg.dim_v);
  for (int r2 = 0; r2 <= rmax; ++r2) {
    double speed = std::sqrt(static_cast<double>(r2)) * vg.dv;
    coef_[r2] = (cs.sigma == 0.0 ? 1.0 : std::pow(speed, cs.sigma)) * area * vg.weight;
  }
  loss_ = std::make_shared<const LossConvolution>(shape_, coef_);
  if (!cs.isotropic()) {
    // A quick sanity sweep keeps obviously broken angular factors out.
    for (double c = -1.0; c <= 1.0; c += 0.125) {
      double h = cs.angular(c);
      if (!(h >= 0.0) || !std::isfinite(h))
        throw Error(ErrorCode::InvalidArgument, "angular factor must be finite and nonnegative");
    }
  }
}

std::array<int, 3> CollisionLattice::multi(int k) const {
  return {k / (shape_[1] * shape_[2]), (k / shape_[2]) % shape_[1], k % shape_[2]};
}

double CollisionLattice::rate(int r2, std::size_t n_ordered, const std::array<int, 3>& d,
                              const std::array<int, 3>& dp) const {
  double base = coef_[r2] / static_cast<double>(n_ordered);
  if (cs_.isotropic()) return base;
  double c = static_cast<double>(d[0] * dp[0] + d[1] * dp[1] + d[2] * dp[2]) / r2;
  return base * cs_.angular(std::clamp(c, -1.0, 1.0));
}

void CollisionLattice::for_each_class(
    const std::function<void(const std::vector<std::pair<int, int>>&, int)>& visit) const {
  const std::size_t nS = static_cast<std::size_t>(2 * shape_[0] - 1) * (2 * shape_[1] - 1) * (2 * shape_[2] - 1);
  std::vector<std::vector<std::pair<int, int>>> buckets(coef_.size());
  std::vector<int> touched;
  Box box;
  for (std::size_t s = 0; s < nS; ++s) {
    if (!make_box(shape_, s, box)) continue;
    visit_half(shape_, box, [&](int ia, int ib, int r2) {
      if (buckets[r2].empty()) touched.push_back(r2);
      buckets[r2].emplace_back(ia, ib);
      buckets[r2].emplace_back(ib, ia);
    });
    std::sort(touched.begin(), touched.end());
    for (int r2 : touched) {
      visit(buckets[r2], r2);
      buckets[r2].clear();
    }
    touched.clear();
  }
}

void CollisionLattice::apply_anisotropic(const PairList& pairs, std::vector<std::vector<double>>& out) const {
  const std::size_t N = vg_.size();
  const std::size_t K = pairs.size();
  for (auto& o : out) o.assign(N, 0.0);
  std::vector<std::array<int, 3>> dvec;
  std::vector<double> prod;
  for_each_class([&](const std::vector<std::pair<int, int>>& mem, int r2) {
    const std::size_t n = mem.size();
    dvec.resize(n);
    for (std::size_t m = 0; m < n; ++m) {
      auto a = multi(mem[m].first), b = multi(mem[m].second);
      dvec[m] = {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
    }
    prod.resize(n);
    for (std::size_t k = 0; k < K; ++k) {
      const auto& f = pairs[k].first;
      const auto& g = pairs[k].second;
      for (std::size_t m = 0; m < n; ++m) prod[m] = f[mem[m].first] * g[mem[m].second];
      for (std::size_t m = 0; m < n; ++m) {
        double gainv = 0.0, tot = 0.0;
        for (std::size_t q = 0; q < n; ++q) {
          double r = rate(r2, n, dvec[m], dvec[q]);
          gainv += r * prod[q];
          tot += r;
        }
        out[k][mem[m].first] += gainv - tot * prod[m];
      }
    }
  });
}

void CollisionLattice::apply_isotropic(const PairList& pairs, std::vector<std::vector<double>>& out) const {
  const std::size_t N = vg_.size();
  // J(f,g) and J(g,f) share their gain term; dedupe unordered products and loss partners.
  std::vector<std::pair<const double*, const double*>> products;
  std::vector<const double*> partners;
  std::vector<std::size_t> prod_of(pairs.size()), partner_of(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double* f = pairs[k].first.data();
    const double* g = pairs[k].second.data();
    auto key = f < g ? std::make_pair(f, g) : std::make_pair(g, f);
    auto it = std::find(products.begin(), products.end(), key);
    prod_of[k] = static_cast<std::size_t>(it - products.begin());
    if (it == products.end()) products.push_back(key);
    auto jt = std::find(partners.begin(), partners.end(), g);
    partner_of[k] = static_cast<std::size_t>(jt - partners.begin());
    if (jt == partners.end()) partners.push_back(g);
  }
  std::vector<std::vector<double>> gains(products.size());
  std::size_t k0 = 0;
  while (k0 < products.size()) {
    std::size_t K = std::min<std::size_t>(4, products.size() - k0);
    const double* f[4];
    const double* g[4];
    for (std::size_t k = 0; k < K; ++k) {
      f[k] = products[k0 + k].first;
      g[k] = products[k0 + k].second;
    }
    std::vector<double>* o = &gains[k0];
    switch (K) {
      case 1: gain_kernel<1>(shape_, coef_, N, f, g, o); break;
      case 2: gain_kernel<2>(shape_, coef_, N, f, g, o); break;
      case 3: gain_kernel<3>(shape_, coef_, N, f, g, o); break;
      default: gain_kernel<4>(shape_, coef_, N, f, g, o); break;
    }
    k0 += K;
  }
  std::vector<std::vector<double>> freq(partners.size());
  for (std::size_t p = 0; p < partners.size(); ++p) freq[p] = loss_->apply({partners[p], N});
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    out[k].resize(N);
    const auto& gain = gains[prod_of[k]];
    const auto& nu = freq[partner_of[k]];
    const double* f = pairs[k].first.data();
    for (std::size_t i = 0; i < N; ++i) out[k][i] = gain[i] - f[i] * nu[i];
  }
}

void CollisionLattice::apply(const PairList& pairs, std::vector<std::vector<double>>& out) const {
  for (const auto& [f, g] : pairs)
    if (f.size() != vg_.size() || g.size() != vg_.size())
      throw Error(ErrorCode::GridMismatch, "collision slices do not match the velocity grid");
  out.resize(pairs.size());
  if (cs_.isotropic())
    apply_isotropic(pairs, out);
  else
    apply_anisotropic(pairs, out);
}

std::vector<double> CollisionLattice::J(std::span<const double> f, std::span<const double> g) const {
  std::vector<std::vector<double>> out;
  apply({{f, g}}, out);
  return std::move(out[0]);
}

std::vector<double> boltzmann_J(std::span<const double> f, std::span<const double> g, const CollisionLattice& lat) {
  return lat.J(f, g);
}

void conservative_correction(std::vector<double>& q, std::span<const double> weight, const VelocityGrid& vg) {
  const int d = vg.dim_v;
  const int m = d + 2;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  std::vector<double> chi(m);
  double wmax = 0.0;
  for (double w : weight) wmax = std::max(wmax, std::abs(w));
  if (wmax == 0.0) return;
  for (std::size_t k = 0; k < q.size(); ++k) {
    auto v = vg.velocity(k);
    chi[0] = 1.0;
    double v2 = 0.0;
    for (int a = 0; a < d; ++a) {
      chi[1 + a] = v[a];
      v2 += v[a] * v[a];
    }
    chi[m - 1] = v2;
    double w = std::abs(weight[k]) + 1e-300;
    for (int i = 0; i < m; ++i) {
      rhs(i) -= chi[i] * q[k];
      for (int j = 0; j < m; ++j) A(i, j) += w * chi[i] * chi[j];
    }
  }
  Eigen::VectorXd lam = A.ldlt().solve(rhs);
  for (std::size_t k = 0; k < q.size(); ++k) {
    auto v = vg.velocity(k);
    double v2 = 0.0, s = lam(0);
    for (int a = 0; a < d; ++a) {
      s += lam(1 + a) * v[a];
      v2 += v[a] * v[a];
    }
    s += lam(m - 1) * v2;
    q[k] += (std::abs(weight[k]) + 1e-300) * s;
  }
}

std::vector<double> symmetrized_J(std::span<const double> f, std::span<const double> g, const CollisionLattice& lat) {
  std::vector<std::vector<double>> out;
  lat.apply({{f, g}, {g, f}}, out);
  std::vector<double> q(f.size()), w(f.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = out[0][i] + out[1][i];
    w[i] = 0.5 * (f[i] + g[i]);
  }
  conservative_correction(q, w, lat.vgrid());
  return q;
}

}  // namespace segrekin
