#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string_view>

#include "degenac/kernels.hpp"

namespace degenac::kernels {

namespace {

int as_small_integer(double x) {
  if (x >= 0.0 && x <= 64.0 && x == std::floor(x)) return static_cast<int>(x);
  return -1;
}

double ipow(double a, int k) {
  double result = 1.0;
  while (k > 0) {
    if (k & 1) result *= a;
    a *= a;
    k >>= 1;
  }
  return result;
}

// a^(k-1) for a >= 0, with 0 at a = 0 so that the sign factor decides.
double power_minus_one(double a, double k, int k_int) {
  if (k_int >= 1) return ipow(a, k_int - 1);
  if (a == 0.0) return 0.0;
  return std::pow(a, k - 1.0);
}

double power(double a, double k, int k_int) { return k_int >= 0 ? ipow(a, k_int) : std::pow(a, k); }

// max(|x|, peak) that stays +inf once a non-finite value has been seen.
double sticky_max(double peak, double x) {
  return std::isfinite(x) ? std::max(peak, std::fabs(x)) : std::numeric_limits<double>::infinity();
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void nodal(const NodalModel& model, const double* u, std::size_t count, double* d, double* dp,
           double* fp, double* f) {
  const double half_over_n = 0.5 / model.n;
  for (std::size_t i = 0; i < count; ++i) {
    const double x = u[i];
    const double s = (1.0 - x) * (1.0 + x);
    const double a = std::fabs(s);
    const double sg = sign_of(s);
    fp[i] = -x * power_minus_one(a, model.n, model.n_int) * sg;
    if (f != nullptr) f[i] = power(a, model.n, model.n_int) * half_over_n;
    if (model.single) {
      const double t = 1.0 - x;
      const double at = std::fabs(t);
      d[i] = power(at, model.m, model.m_int);
      dp[i] = model.m == 0.0 ? 0.0 : -model.m * power_minus_one(at, model.m, model.m_int) * sign_of(t);
    } else {
      d[i] = power(a, model.m, model.m_int);
      dp[i] = model.m == 0.0 ? 0.0 : model.m * power_minus_one(a, model.m, model.m_int) * sg * (-2.0 * x);
    }
  }
}

void stencil(const double* u, const double* d, const double* dp, const double* fp, std::size_t count,
             double c, double* out) {
  const double c4 = 0.25 * c;
  const std::size_t last = count - 1;
  {
    const double dr = u[1] - u[0];
    const double gr = 0.5 * (d[0] + d[1]);
    out[0] = 2.0 * c * gr * dr - 2.0 * c4 * dp[0] * dr * dr - fp[0];
  }
  for (std::size_t i = 1; i < last; ++i) {
    const double dl = u[i] - u[i - 1];
    const double dr = u[i + 1] - u[i];
    const double gl = 0.5 * (d[i - 1] + d[i]);
    const double gr = 0.5 * (d[i] + d[i + 1]);
    out[i] = c * (gr * dr - gl * dl) - c4 * dp[i] * (dr * dr + dl * dl) - fp[i];
  }
  {
    const double dl = u[last] - u[last - 1];
    const double gl = 0.5 * (d[last - 1] + d[last]);
    out[last] = -2.0 * c * gl * dl - 2.0 * c4 * dp[last] * dl * dl - fp[last];
  }
}

double energy(const double* u, const double* d, const double* f, std::size_t count, double h,
              double eps) {
  const double grad_scale = 0.25 * eps / h;  // h * eps/2 * 1/2 * (1/h)^2
  const double pot_scale = 0.5 * h / eps;
  double grad = 0.0;
  double pot = 0.0;
  for (std::size_t i = 0; i + 1 < count; ++i) {
    const double q = u[i + 1] - u[i];
    grad += (d[i] + d[i + 1]) * q * q;
    pot += f[i] + f[i + 1];
  }
  return grad_scale * grad + pot_scale * pot;
}

double axpy(const double* base, const double* k, double scale, std::size_t count, double* out) {
  double peak = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = base[i] + scale * k[i];
    peak = sticky_max(peak, out[i]);
  }
  return peak;
}

double rk4_finish(const double* u, const double* k1, const double* k2, const double* k3,
                  const double* k4, double dt, std::size_t count, double* out) {
  const double w = dt / 6.0;
  double peak = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = u[i] + w * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    peak = sticky_max(peak, out[i]);
  }
  return peak;
}

const Table kScalar{"scalar", nodal, stencil, energy, axpy, rk4_finish};

}  // namespace

NodalModel NodalModel::from(const ModelParams& p) {
  return {p.m(), p.n(), p.degeneracy() == Degeneracy::Single, as_small_integer(p.m()),
          as_small_integer(p.n())};
}

const Table& scalar() { return kScalar; }

const Table& active() {
  static const Table& chosen = [] () -> const Table& {
    const char* forced = std::getenv("DEGENAC_ISA");
    if (forced != nullptr && std::string_view(forced) == "scalar") return kScalar;
    const Table* wide = avx2();
    return wide != nullptr ? *wide : kScalar;
  }();
  return chosen;
}

}  // namespace degenac::kernels
