#pragma once

#include <cstddef>
#include <string_view>

#include "degenac/model.hpp"

// Data-parallel inner loops of the solver, in a portable scalar variant and an
// AVX2+FMA variant. The active table is picked once at first use from CPUID;
// DEGENAC_ISA=scalar in the environment forces the scalar variant.
namespace degenac::kernels {

/// Exponents of one model in the form the kernels consume.
struct NodalModel {
  double m;
  double n;
  bool single;
  /// m and n as integers when they are integral and <= 64, else -1 (pow path).
  int m_int;
  int n_int;

  static NodalModel from(const ModelParams& p);
};

/// d = D(u), dp = D'(u), fp = F'(u) and, when f is non-null, f = F(u).
using NodalFn = void (*)(const NodalModel& model, const double* u, std::size_t count, double* d,
                         double* dp, double* fp, double* f);

/// Right-hand side at every node with mirrored ghosts:
///   out_i = c (G_r dr - G_l dl) - (c/4) dp_i (dr^2 + dl^2) - fp_i,
/// dr = u_{i+1} - u_i, dl = u_i - u_{i-1}, G = face average of d, c = eps^2/h^2.
/// count >= 3.
using StencilFn = void (*)(const double* u, const double* d, const double* dp, const double* fp,
                           std::size_t count, double c, double* out);

/// sum over cells of h [eps/2 * (d_i + d_{i+1})/2 * q^2 + (f_i + f_{i+1}) / (2 eps)].
using EnergyFn = double (*)(const double* u, const double* d, const double* f, std::size_t count,
                            double h, double eps);

/// out = base + scale * k; returns max |out|.
using AxpyFn = double (*)(const double* base, const double* k, double scale, std::size_t count,
                          double* out);

/// out = u + dt/6 (k1 + 2 k2 + 2 k3 + k4); returns max |out|.
using Rk4FinishFn = double (*)(const double* u, const double* k1, const double* k2, const double* k3,
                               const double* k4, double dt, std::size_t count, double* out);

struct Table {
  std::string_view name;
  NodalFn nodal;
  StencilFn stencil;
  EnergyFn energy;
  AxpyFn axpy;
  Rk4FinishFn rk4_finish;
};

const Table& scalar();

/// nullptr when the CPU lacks AVX2 or FMA.
const Table* avx2();

/// The table used by the solver.
const Table& active();

}  // namespace degenac::kernels
