#include "slowvary/verify/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace slowvary::verify {

namespace {

inline cplx ipow(cplx v, int p) {
  cplx r = 1;
  for (int k = 0; k < p; ++k) r *= v;
  return r;
}

inline cplx term_at(const GridTerm& t, const Leaves& leaves, std::size_t j) {
  cplx v = t.coef;
  for (const auto& [leaf, power] : t.factors) v *= ipow(leaves[leaf][j], power);
  return v;
}

}  // namespace

namespace serial {

void lincomb(std::span<cplx> out, std::span<const cplx> y, cplx a, std::span<const cplx> k) {
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = y[j] + a * k[j];
}

void rk4_combine(std::span<cplx> y, std::span<const cplx> k1, std::span<const cplx> k2, std::span<const cplx> k3,
                 std::span<const cplx> k4, double dt) {
  const double h = dt / 6.0;
  for (std::size_t j = 0; j < y.size(); ++j) y[j] += h * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
}

void multiply(std::span<cplx> x, std::span<const cplx> m) {
  for (std::size_t j = 0; j < x.size(); ++j) x[j] *= m[j];
}

void accumulate(const GridPoly& p, const Leaves& leaves, std::span<cplx> out) {
  for (std::size_t j = 0; j < out.size(); ++j) {
    cplx s = 0;
    for (const auto& t : p.terms) s += term_at(t, leaves, j);
    out[j] += s;
  }
}

double l2_distance(std::span<const cplx> a, std::span<const cplx> b, double dx) {
  double s = 0;
  for (std::size_t j = 0; j < a.size(); ++j) s += std::norm(a[j] - b[j]);
  return std::sqrt(s * dx);
}

double max_abs(std::span<const cplx> x) {
  double m = 0;
  for (const auto& v : x) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace serial

namespace parallel {

void lincomb(std::span<cplx> out, std::span<const cplx> y, cplx a, std::span<const cplx> k) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) out[j] = y[j] + a * k[j];
}

void rk4_combine(std::span<cplx> y, std::span<const cplx> k1, std::span<const cplx> k2, std::span<const cplx> k3,
                 std::span<const cplx> k4, double dt) {
  const double h = dt / 6.0;
  const auto n = static_cast<std::ptrdiff_t>(y.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) y[j] += h * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
}

void multiply(std::span<cplx> x, std::span<const cplx> m) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) x[j] *= m[j];
}

void accumulate(const GridPoly& p, const Leaves& leaves, std::span<cplx> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    cplx s = 0;
    for (const auto& t : p.terms) s += term_at(t, leaves, static_cast<std::size_t>(j));
    out[j] += s;
  }
}

double l2_distance(std::span<const cplx> a, std::span<const cplx> b, double dx) {
  const auto n = static_cast<std::ptrdiff_t>(a.size());
  double s = 0;
#pragma omp parallel for schedule(static) reduction(+ : s)
  for (std::ptrdiff_t j = 0; j < n; ++j) s += std::norm(a[j] - b[j]);
  return std::sqrt(s * dx);
}

double max_abs(std::span<const cplx> x) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  double m = 0;
#pragma omp parallel for schedule(static) reduction(max : m)
  for (std::ptrdiff_t j = 0; j < n; ++j) m = std::max(m, std::abs(x[j]));
  return m;
}

}  // namespace parallel

const Kernels& kernels(Backend b) {
  static const Kernels s{serial::lincomb,    serial::rk4_combine, serial::multiply,
                         serial::accumulate, serial::l2_distance, serial::max_abs};
  static const Kernels p{parallel::lincomb,    parallel::rk4_combine, parallel::multiply,
                         parallel::accumulate, parallel::l2_distance, parallel::max_abs};
  return b == Backend::OpenMP ? p : s;
}

}  // namespace slowvary::verify
