#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

namespace slowvary::verify {

using cplx = std::complex<double>;

/// Polynomial in grid-valued leaves, evaluated pointwise:
/// sum over terms of coef * prod leaves[leaf]^power.
struct GridTerm {
  cplx coef;
  std::vector<std::pair<int, int>> factors;  // (leaf index, power)
};
struct GridPoly {
  std::vector<GridTerm> terms;
  bool empty() const { return terms.empty(); }
};

using Leaves = std::vector<std::span<const cplx>>;

// Serial reference kernels.
namespace serial {
void lincomb(std::span<cplx> out, std::span<const cplx> y, cplx a, std::span<const cplx> k);  // out = y + a k
void rk4_combine(std::span<cplx> y, std::span<const cplx> k1, std::span<const cplx> k2, std::span<const cplx> k3,
                 std::span<const cplx> k4, double dt);
void multiply(std::span<cplx> x, std::span<const cplx> m);
void accumulate(const GridPoly& p, const Leaves& leaves, std::span<cplx> out);  // out += p(leaves)
double l2_distance(std::span<const cplx> a, std::span<const cplx> b, double dx);
double max_abs(std::span<const cplx> x);
}  // namespace serial

// OpenMP versions; elementwise results match the serial ones exactly.
namespace parallel {
void lincomb(std::span<cplx> out, std::span<const cplx> y, cplx a, std::span<const cplx> k);
void rk4_combine(std::span<cplx> y, std::span<const cplx> k1, std::span<const cplx> k2, std::span<const cplx> k3,
                 std::span<const cplx> k4, double dt);
void multiply(std::span<cplx> x, std::span<const cplx> m);
void accumulate(const GridPoly& p, const Leaves& leaves, std::span<cplx> out);
double l2_distance(std::span<const cplx> a, std::span<const cplx> b, double dx);
double max_abs(std::span<const cplx> x);
}  // namespace parallel

enum class Backend { Serial, OpenMP };

struct Kernels {
  void (*lincomb)(std::span<cplx>, std::span<const cplx>, cplx, std::span<const cplx>);
  void (*rk4_combine)(std::span<cplx>, std::span<const cplx>, std::span<const cplx>, std::span<const cplx>,
                      std::span<const cplx>, double);
  void (*multiply)(std::span<cplx>, std::span<const cplx>);
  void (*accumulate)(const GridPoly&, const Leaves&, std::span<cplx>);
  double (*l2_distance)(std::span<const cplx>, std::span<const cplx>, double);
  double (*max_abs)(std::span<const cplx>);
};

const Kernels& kernels(Backend b);

}  // namespace slowvary::verify
