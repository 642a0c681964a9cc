#include <cstddef>

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>

#include "levelagg/simd.hpp"

namespace levelagg::simd {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

// exp for x in [-708, 0], Cephes-style Pade after range reduction; inputs
// below -708 flush to zero.
inline __m256d exp_pd(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
  const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
  const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
  const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
  const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
  const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
  const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);

  const __m256d live = _mm256_cmp_pd(x, _mm256_set1_pd(-708.0), _CMP_GT_OQ);
  x = _mm256_max_pd(x, _mm256_set1_pd(-708.0));

  const __m256d n =
      _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, c1, x);
  r = _mm256_fnmadd_pd(n, c2, r);

  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d p = _mm256_fmadd_pd(_mm256_fmadd_pd(p0, rr, p1), rr, p2);
  p = _mm256_mul_pd(r, p);
  const __m256d q =
      _mm256_fmadd_pd(_mm256_fmadd_pd(_mm256_fmadd_pd(q0, rr, q1), rr, q2), rr, q3);
  __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

  // scale by 2^n through the exponent field; n >= -1021 keeps it normal
  const __m128i n32 = _mm256_cvtpd_epi32(n);
  const __m256i n64 = _mm256_cvtepi32_epi64(n32);
  e = _mm256_castsi256_pd(_mm256_add_epi64(_mm256_castpd_si256(e), _mm256_slli_epi64(n64, 52)));
  return _mm256_and_pd(e, live);
}

double gauss_weight_sum_avx2(const double* const* coords, std::size_t n, std::size_t dim,
                             const double* x, double scale) {
  const __m256d neg_scale = _mm256_set1_pd(-scale);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d sq = _mm256_setzero_pd();
    for (std::size_t c = 0; c < dim; ++c) {
      const __m256d d = _mm256_sub_pd(_mm256_set1_pd(x[c]), _mm256_loadu_pd(coords[c] + i));
      sq = _mm256_fmadd_pd(d, d, sq);
    }
    acc = _mm256_add_pd(acc, exp_pd(_mm256_mul_pd(sq, neg_scale)));
  }
  double sum = hsum(acc);
  for (; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const double d = x[c] - coords[c][i];
      sq += d * d;
    }
    sum += std::exp(-scale * sq);
  }
  return sum;
}

double epan_prod_sum_avx2(const double* const* coords, std::size_t n, std::size_t dim,
                          const double* x, double inv_h) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d threeq = _mm256_set1_pd(0.75);
  const __m256d ih = _mm256_set1_pd(inv_h);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d prod = one;
    for (std::size_t c = 0; c < dim; ++c) {
      const __m256d u =
          _mm256_mul_pd(_mm256_sub_pd(_mm256_set1_pd(x[c]), _mm256_loadu_pd(coords[c] + i)), ih);
      const __m256d t = _mm256_sub_pd(one, _mm256_mul_pd(u, u));
      const __m256d factor =
          _mm256_and_pd(_mm256_mul_pd(threeq, t), _mm256_cmp_pd(t, _mm256_setzero_pd(), _CMP_GT_OQ));
      prod = _mm256_mul_pd(prod, factor);
    }
    acc = _mm256_add_pd(acc, prod);
  }
  double sum = hsum(acc);
  for (; i < n; ++i) {
    double prod = 1.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const double u = (x[c] - coords[c][i]) * inv_h;
      const double t = 1.0 - u * u;
      prod = t > 0.0 ? prod * (0.75 * t) : 0.0;
    }
    sum += prod;
  }
  return sum;
}

double box_prod_sum_avx2(const double* const* coords, std::size_t n, std::size_t dim,
                         const double* x, double inv_h) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d ih = _mm256_set1_pd(inv_h);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
    for (std::size_t c = 0; c < dim; ++c) {
      const __m256d u =
          _mm256_mul_pd(_mm256_sub_pd(_mm256_set1_pd(x[c]), _mm256_loadu_pd(coords[c] + i)), ih);
      mask = _mm256_and_pd(mask, _mm256_cmp_pd(abs_pd(u), one, _CMP_LT_OQ));
    }
    acc = _mm256_add_pd(acc, _mm256_and_pd(one, mask));
  }
  double sum = hsum(acc);
  for (; i < n; ++i) {
    bool in = true;
    for (std::size_t c = 0; c < dim; ++c) {
      const double u = (x[c] - coords[c][i]) * inv_h;
      if (!(std::fabs(u) < 1.0)) {
        in = false;
        break;
      }
    }
    if (in) sum += 1.0;
  }
  return sum;
}

void max_abs_dev_avx2(const double* const* rows, std::size_t m, std::size_t n,
                      const double* centers, double* out) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d mx = _mm256_setzero_pd();
    for (std::size_t r = 0; r < m; ++r) {
      const __m256d d =
          abs_pd(_mm256_sub_pd(_mm256_loadu_pd(rows[r] + j), _mm256_set1_pd(centers[r])));
      mx = _mm256_max_pd(mx, d);
    }
    _mm256_storeu_pd(out + j, mx);
  }
  for (; j < n; ++j) {
    double mx = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const double d = std::fabs(rows[r][j] - centers[r]);
      if (d > mx) mx = d;
    }
    out[j] = mx;
  }
}

std::size_t count_below_avx2(const double* v, std::size_t n, double bound) {
  const __m256d b = _mm256_set1_pd(bound);
  std::size_t count = 0;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(v + j), b, _CMP_LT_OQ));
    count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
  }
  for (; j < n; ++j)
    if (v[j] < bound) ++count;
  return count;
}

double smooth_prod_sum_avx2(const double* const* rows, std::size_t m, std::size_t n,
                            const double* centers, double eps, bool epan_weight,
                            double min_hits) {
  const double inv_eps = 1.0 / eps;
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d vinv = _mm256_set1_pd(inv_eps);
  const __m256d vneed = _mm256_set1_pd(min_hits);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d prod = one;
    __m256d hits = _mm256_setzero_pd();
    for (std::size_t r = 0; r < m; ++r) {
      const __m256d diff =
          _mm256_sub_pd(_mm256_loadu_pd(rows[r] + j), _mm256_set1_pd(centers[r]));
      const __m256d near = _mm256_cmp_pd(abs_pd(diff), veps, _CMP_LT_OQ);
      hits = _mm256_add_pd(hits, _mm256_and_pd(one, near));
      if (epan_weight) {
        const __m256d u = _mm256_mul_pd(diff, vinv);
        const __m256d t = _mm256_sub_pd(one, _mm256_mul_pd(u, u));
        prod = _mm256_mul_pd(
            prod, _mm256_and_pd(t, _mm256_cmp_pd(t, _mm256_setzero_pd(), _CMP_GT_OQ)));
      } else {
        prod = _mm256_mul_pd(prod, _mm256_and_pd(one, near));
      }
    }
    if (min_hits > 0.0)
      prod = _mm256_and_pd(prod, _mm256_cmp_pd(hits, vneed, _CMP_GE_OQ));
    acc = _mm256_add_pd(acc, prod);
  }
  double sum = hsum(acc);
  for (; j < n; ++j) {
    double prod = 1.0;
    double hcount = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const double diff = rows[r][j] - centers[r];
      if (std::fabs(diff) < eps) hcount += 1.0;
      if (epan_weight) {
        const double u = diff * inv_eps;
        const double t = 1.0 - u * u;
        prod = t > 0.0 ? prod * t : 0.0;
      } else {
        if (!(std::fabs(diff) < eps)) prod = 0.0;
      }
    }
    if (min_hits > 0.0 && !(hcount >= min_hits)) continue;
    sum += prod;
  }
  return sum;
}

double gauss_pair_sum_avx2(const double* const* coords, std::size_t n, std::size_t dim,
                           double scale) {
  const __m256d neg_scale = _mm256_set1_pd(-scale);
  __m256d acc = _mm256_setzero_pd();
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t j = i + 1;
    for (; j + 4 <= n; j += 4) {
      __m256d sq = _mm256_setzero_pd();
      for (std::size_t c = 0; c < dim; ++c) {
        const __m256d d =
            _mm256_sub_pd(_mm256_set1_pd(coords[c][i]), _mm256_loadu_pd(coords[c] + j));
        sq = _mm256_fmadd_pd(d, d, sq);
      }
      acc = _mm256_add_pd(acc, exp_pd(_mm256_mul_pd(sq, neg_scale)));
    }
    for (; j < n; ++j) {
      double sq = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double d = coords[c][i] - coords[c][j];
        sq += d * d;
      }
      sum += std::exp(-scale * sq);
    }
  }
  return sum + hsum(acc);
}

void compact_pair_sums_avx2(const double* const* coords, std::size_t n, std::size_t dim,
                            double inv_h, bool epan, double* conv_sum, double* loo_sum) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d threeq = _mm256_set1_pd(0.75);
  const __m256d coef = _mm256_set1_pd(3.0 / 160.0);
  const __m256d six = _mm256_set1_pd(6.0);
  const __m256d four = _mm256_set1_pd(4.0);
  const __m256d ih = _mm256_set1_pd(inv_h);
  __m256d conv_acc = _mm256_setzero_pd();
  __m256d loo_acc = _mm256_setzero_pd();
  double conv_tail = 0.0, loo_tail = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t j = i + 1;
    for (; j + 4 <= n; j += 4) {
      __m256d pc = one, pk = one;
      for (std::size_t c = 0; c < dim; ++c) {
        const __m256d t = _mm256_mul_pd(
            _mm256_sub_pd(_mm256_set1_pd(coords[c][i]), _mm256_loadu_pd(coords[c] + j)), ih);
        const __m256d a = abs_pd(t);
        const __m256d in2 = _mm256_cmp_pd(a, two, _CMP_LT_OQ);
        if (epan) {
          const __m256d s = _mm256_sub_pd(two, a);
          const __m256d s3 = _mm256_mul_pd(_mm256_mul_pd(s, s), s);
          const __m256d poly =
              _mm256_add_pd(_mm256_fmadd_pd(t, t, _mm256_mul_pd(six, a)), four);
          pc = _mm256_mul_pd(pc,
                             _mm256_and_pd(_mm256_mul_pd(coef, _mm256_mul_pd(s3, poly)), in2));
          const __m256d w = _mm256_sub_pd(one, _mm256_mul_pd(t, t));
          pk = _mm256_mul_pd(pk, _mm256_and_pd(_mm256_mul_pd(threeq, w),
                                               _mm256_cmp_pd(w, _mm256_setzero_pd(), _CMP_GT_OQ)));
        } else {
          pc = _mm256_mul_pd(pc, _mm256_and_pd(_mm256_sub_pd(two, a), in2));
          pk = _mm256_mul_pd(pk, _mm256_and_pd(one, _mm256_cmp_pd(a, one, _CMP_LT_OQ)));
        }
      }
      conv_acc = _mm256_add_pd(conv_acc, pc);
      loo_acc = _mm256_add_pd(loo_acc, pk);
    }
    for (; j < n; ++j) {
      double pc = 1.0, pk = 1.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double t = (coords[c][i] - coords[c][j]) * inv_h;
        const double a = std::fabs(t);
        if (epan) {
          if (a < 2.0) {
            const double s = 2.0 - a;
            pc *= (3.0 / 160.0) * s * s * s * (t * t + 6.0 * a + 4.0);
          } else {
            pc = 0.0;
          }
          const double w = 1.0 - t * t;
          pk = w > 0.0 ? pk * (0.75 * w) : 0.0;
        } else {
          pc *= a < 2.0 ? 2.0 - a : 0.0;
          if (!(a < 1.0)) pk = 0.0;
        }
      }
      conv_tail += pc;
      loo_tail += pk;
    }
  }
  *conv_sum = conv_tail + hsum(conv_acc);
  *loo_sum = loo_tail + hsum(loo_acc);
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops table = {
      "avx2",
      gauss_weight_sum_avx2,
      epan_prod_sum_avx2,
      box_prod_sum_avx2,
      max_abs_dev_avx2,
      count_below_avx2,
      smooth_prod_sum_avx2,
      gauss_pair_sum_avx2,
      compact_pair_sums_avx2,
  };
  return table;
}

}  // namespace levelagg::simd

#else
#error "this translation unit requires -mavx2 -mfma"
#endif
