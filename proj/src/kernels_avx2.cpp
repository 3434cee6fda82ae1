#include "degenac/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

#define DEGENAC_AVX2 __attribute__((target("avx2,fma")))

namespace degenac::kernels {

namespace {

DEGENAC_AVX2 inline __m256d abs_pd(__m256d x) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

DEGENAC_AVX2 inline __m256d sign_pd(__m256d x) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d pos = _mm256_and_pd(_mm256_cmp_pd(x, zero, _CMP_GT_OQ), one);
  const __m256d neg = _mm256_and_pd(_mm256_cmp_pd(x, zero, _CMP_LT_OQ), one);
  return _mm256_sub_pd(pos, neg);
}

DEGENAC_AVX2 inline __m256d ipow_pd(__m256d a, int k) {
  __m256d result = _mm256_set1_pd(1.0);
  while (k > 0) {
    if (k & 1) result = _mm256_mul_pd(result, a);
    a = _mm256_mul_pd(a, a);
    k >>= 1;
  }
  return result;
}

constexpr double kHuge = std::numeric_limits<double>::infinity();

// max(|x|, peak) that stays +inf once a non-finite value has been seen.
inline double sticky_max(double peak, double x) {
  return std::isfinite(x) ? std::max(peak, std::fabs(x)) : kHuge;
}

DEGENAC_AVX2 inline double hmax_pd(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return std::max(_mm_cvtsd_f64(m), _mm_cvtsd_f64(_mm_unpackhi_pd(m, m)));
}

DEGENAC_AVX2 inline double hsum_pd(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

DEGENAC_AVX2 void nodal(const NodalModel& model, const double* u, std::size_t count, double* d,
                        double* dp, double* fp, double* f) {
  // Non-integral exponents need pow; the scalar loop is as good as it gets.
  if (model.m_int < 0 || model.n_int < 0) {
    scalar().nodal(model, u, count, d, dp, fp, f);
    return;
  }
  const int mi = model.m_int;
  const int ni = model.n_int;
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d m = _mm256_set1_pd(model.m);
  const __m256d minus_two_m = _mm256_set1_pd(-2.0 * model.m);
  const __m256d half_over_n = _mm256_set1_pd(0.5 / model.n);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d x = _mm256_loadu_pd(u + i);
    const __m256d s = _mm256_mul_pd(_mm256_sub_pd(one, x), _mm256_add_pd(one, x));
    const __m256d a = abs_pd(s);
    const __m256d sg = sign_pd(s);
    // fp = -x a^{n-1} sg
    const __m256d an1 = ipow_pd(a, ni - 1);
    const __m256d fpv = _mm256_mul_pd(_mm256_sub_pd(_mm256_setzero_pd(), x), _mm256_mul_pd(an1, sg));
    _mm256_storeu_pd(fp + i, fpv);
    if (f != nullptr) _mm256_storeu_pd(f + i, _mm256_mul_pd(_mm256_mul_pd(an1, a), half_over_n));
    if (model.single) {
      const __m256d t = _mm256_sub_pd(one, x);
      const __m256d at = abs_pd(t);
      if (mi == 0) {
        _mm256_storeu_pd(d + i, one);
        _mm256_storeu_pd(dp + i, _mm256_setzero_pd());
      } else {
        const __m256d am1 = ipow_pd(at, mi - 1);
        _mm256_storeu_pd(d + i, _mm256_mul_pd(am1, at));
        const __m256d dpv = _mm256_mul_pd(_mm256_sub_pd(_mm256_setzero_pd(), m),
                                          _mm256_mul_pd(am1, sign_pd(t)));
        _mm256_storeu_pd(dp + i, dpv);
      }
    } else {
      if (mi == 0) {
        _mm256_storeu_pd(d + i, one);
        _mm256_storeu_pd(dp + i, _mm256_setzero_pd());
      } else {
        const __m256d am1 = ipow_pd(a, mi - 1);
        _mm256_storeu_pd(d + i, _mm256_mul_pd(am1, a));
        // m a^{m-1} sg (-2x)
        const __m256d dpv = _mm256_mul_pd(_mm256_mul_pd(am1, sg), _mm256_mul_pd(minus_two_m, x));
        _mm256_storeu_pd(dp + i, dpv);
      }
    }
  }
  if (i < count) scalar().nodal(model, u + i, count - i, d + i, dp + i, fp + i, f != nullptr ? f + i : nullptr);
}

DEGENAC_AVX2 void stencil(const double* u, const double* d, const double* dp, const double* fp,
                          std::size_t count, double c, double* out) {
  const std::size_t last = count - 1;
  const double c4 = 0.25 * c;
  {
    const double dr = u[1] - u[0];
    const double gr = 0.5 * (d[0] + d[1]);
    out[0] = 2.0 * c * gr * dr - 2.0 * c4 * dp[0] * dr * dr - fp[0];
  }
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vc4 = _mm256_set1_pd(c4);
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 1;
  for (; i + 4 <= last; i += 4) {
    const __m256d ul = _mm256_loadu_pd(u + i - 1);
    const __m256d uc = _mm256_loadu_pd(u + i);
    const __m256d ur = _mm256_loadu_pd(u + i + 1);
    const __m256d dl_ = _mm256_loadu_pd(d + i - 1);
    const __m256d dc = _mm256_loadu_pd(d + i);
    const __m256d dr_ = _mm256_loadu_pd(d + i + 1);
    const __m256d jl = _mm256_sub_pd(uc, ul);
    const __m256d jr = _mm256_sub_pd(ur, uc);
    const __m256d gl = _mm256_mul_pd(half, _mm256_add_pd(dl_, dc));
    const __m256d gr = _mm256_mul_pd(half, _mm256_add_pd(dc, dr_));
    const __m256d flux = _mm256_fmsub_pd(gr, jr, _mm256_mul_pd(gl, jl));
    const __m256d sq = _mm256_fmadd_pd(jr, jr, _mm256_mul_pd(jl, jl));
    const __m256d dpv = _mm256_loadu_pd(dp + i);
    const __m256d fpv = _mm256_loadu_pd(fp + i);
    __m256d r = _mm256_mul_pd(vc, flux);
    r = _mm256_fnmadd_pd(_mm256_mul_pd(vc4, dpv), sq, r);
    r = _mm256_sub_pd(r, fpv);
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < last; ++i) {
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

DEGENAC_AVX2 double energy(const double* u, const double* d, const double* f, std::size_t count,
                           double h, double eps) {
  const std::size_t cells = count - 1;
  __m256d grad = _mm256_setzero_pd();
  __m256d pot = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= cells; i += 4) {
    const __m256d q = _mm256_sub_pd(_mm256_loadu_pd(u + i + 1), _mm256_loadu_pd(u + i));
    const __m256d g = _mm256_add_pd(_mm256_loadu_pd(d + i), _mm256_loadu_pd(d + i + 1));
    grad = _mm256_fmadd_pd(_mm256_mul_pd(g, q), q, grad);
    pot = _mm256_add_pd(pot, _mm256_add_pd(_mm256_loadu_pd(f + i), _mm256_loadu_pd(f + i + 1)));
  }
  double g_sum = hsum_pd(grad);
  double p_sum = hsum_pd(pot);
  for (; i < cells; ++i) {
    const double q = u[i + 1] - u[i];
    g_sum += (d[i] + d[i + 1]) * q * q;
    p_sum += f[i] + f[i + 1];
  }
  return 0.25 * eps / h * g_sum + 0.5 * h / eps * p_sum;
}

DEGENAC_AVX2 double axpy(const double* base, const double* k, double scale, std::size_t count,
                         double* out) {
  const __m256d s = _mm256_set1_pd(scale);
  const __m256d finite_max = _mm256_set1_pd(std::numeric_limits<double>::max());
  __m256d peak = _mm256_setzero_pd();
  __m256d bad = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d r = _mm256_fmadd_pd(s, _mm256_loadu_pd(k + i), _mm256_loadu_pd(base + i));
    _mm256_storeu_pd(out + i, r);
    peak = _mm256_max_pd(peak, abs_pd(r));
    bad = _mm256_or_pd(bad, _mm256_cmp_pd(abs_pd(r), finite_max, _CMP_NLE_UQ));
  }
  double result = _mm256_movemask_pd(bad) != 0 ? kHuge : hmax_pd(peak);
  for (; i < count; ++i) {
    out[i] = base[i] + scale * k[i];
    result = sticky_max(result, out[i]);
  }
  return result;
}

DEGENAC_AVX2 double rk4_finish(const double* u, const double* k1, const double* k2, const double* k3,
                               const double* k4, double dt, std::size_t count, double* out) {
  const double w = dt / 6.0;
  const __m256d vw = _mm256_set1_pd(w);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d finite_max = _mm256_set1_pd(std::numeric_limits<double>::max());
  __m256d peak = _mm256_setzero_pd();
  __m256d bad = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d mid = _mm256_add_pd(_mm256_loadu_pd(k2 + i), _mm256_loadu_pd(k3 + i));
    const __m256d ends = _mm256_add_pd(_mm256_loadu_pd(k1 + i), _mm256_loadu_pd(k4 + i));
    const __m256d sum = _mm256_fmadd_pd(two, mid, ends);
    const __m256d r = _mm256_fmadd_pd(vw, sum, _mm256_loadu_pd(u + i));
    _mm256_storeu_pd(out + i, r);
    peak = _mm256_max_pd(peak, abs_pd(r));
    bad = _mm256_or_pd(bad, _mm256_cmp_pd(abs_pd(r), finite_max, _CMP_NLE_UQ));
  }
  double result = _mm256_movemask_pd(bad) != 0 ? kHuge : hmax_pd(peak);
  for (; i < count; ++i) {
    out[i] = u[i] + w * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    result = sticky_max(result, out[i]);
  }
  return result;
}

const Table kAvx2{"avx2", nodal, stencil, energy, axpy, rk4_finish};

}  // namespace

const Table* avx2() {
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &kAvx2 : nullptr;
}

}  // namespace degenac::kernels

#else

namespace degenac::kernels {

const Table* avx2() { return nullptr; }

}  // namespace degenac::kernels

#endif
