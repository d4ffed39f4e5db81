#include <algorithm>
#include <cmath>
#include <vector>

#include "segrekin/kinetic.hpp"

namespace segrekin {

namespace {

// Cell weights of the flux through edge k: flux_k = sum_c beta[c - lo] f_{k+c}.
// The local primitive is interpolated on edges [e_lo, e_hi] and evaluated at -s.
void flux_weights(double s, int r, double* beta, int& lo, int& count) {
  int e_lo = s >= 0.0 ? -1 - r : -r;
  int e_hi = s >= 0.0 ? r : 1 + r;
  int ne = e_hi - e_lo + 1;
  double L[16];
  const double xi = -s;
  for (int a = 0; a < ne; ++a) {
    double ea = e_lo + a, w = 1.0;
    for (int b = 0; b < ne; ++b) {
      if (b == a) continue;
      double eb = e_lo + b;
      w *= (xi - eb) / (ea - eb);
    }
    L[a] = w;
  }
  lo = e_lo;
  count = ne - 1;
  for (int c = e_lo; c < e_hi; ++c) {
    double b = 0.0;
    if (c >= 0) {
      for (int e = c + 1; e <= e_hi; ++e) b -= L[e - e_lo];
    } else {
      for (int e = e_lo; e <= c; ++e) b += L[e - e_lo];
    }
    beta[c - e_lo] = b;
  }
}

}  // namespace

void advect_line(const double* in, double* out, std::size_t n, double s, bool periodic, TransportScheme scheme,
                 int radius, bool limiter) {
  if (s == 0.0) {
    std::copy(in, in + n, out);
    return;
  }
  thread_local std::vector<double> low, high, flux, ratio;
  low.assign(n + 1, 0.0);
  high.assign(n + 1, 0.0);
  flux.assign(n + 1, 0.0);
  const long N = static_cast<long>(n);
  auto get = [&](long i) -> double {
    if (periodic) {
      long r = i % N;
      return in[r < 0 ? r + N : r];
    }
    return (i < 0 || i >= N) ? 0.0 : in[i];
  };
  double beta[16];
  int lo = 0, cnt = 0;
  bool high_order = scheme == TransportScheme::SemiLagrangian;
  if (high_order) flux_weights(s, radius, beta, lo, cnt);
  long k_begin = periodic ? 0 : 1;
  long k_end = periodic ? N : N - 1;  // inclusive for closed: edges 1..N-1
  for (long k = k_begin; k <= k_end; ++k) {
    if (periodic && k == N) break;
    low[k] = s >= 0.0 ? s * get(k - 1) : s * get(k);
    if (high_order) {
      double h = 0.0;
      for (int c = 0; c < cnt; ++c) h += beta[c] * get(k + lo + c);
      high[k] = h;
    }
  }
  if (periodic) {
    low[N] = low[0];
    high[N] = high[0];
  }
  if (!high_order) {
    for (long c = 0; c < N; ++c) out[c] = in[c] + low[c] - low[c + 1];
    return;
  }
  if (!limiter) {
    for (long c = 0; c < N; ++c) out[c] = in[c] + high[c] - high[c + 1];
    return;
  }
  ratio.assign(n, 1.0);
  bool any = false;
  for (long c = 0; c < N; ++c) {
    double flow = in[c] + low[c] - low[c + 1];
    double a_right = high[c + 1] - low[c + 1];
    double a_left = high[c] - low[c];
    double outgoing = std::max(0.0, a_right) + std::max(0.0, -a_left);
    if (flow - outgoing < 0.0) {
      ratio[c] = std::clamp(flow / outgoing, 0.0, 1.0);
      any = true;
    }
  }
  if (!any) {
    for (long c = 0; c < N; ++c) out[c] = in[c] + high[c] - high[c + 1];
    return;
  }
  for (long k = 0; k <= N; ++k) {
    double a = high[k] - low[k];
    long donor = a >= 0.0 ? k - 1 : k;
    double r = 1.0;
    if (periodic) {
      long d = ((donor % N) + N) % N;
      r = ratio[d];
    } else if (donor >= 0 && donor < N) {
      r = ratio[donor];
    }
    flux[k] = low[k] + r * a;
  }
  if (periodic) flux[N] = flux[0];
  for (long c = 0; c < N; ++c) out[c] = in[c] + flux[c] - flux[c + 1];
}

}  // namespace segrekin
