// AVX2 strip-sum backend. Four translates per iteration; the exponential
// family uses a vectorized exp (Cephes-style rational approximation, ~1 ulp),
// so results match the scalar backend up to accumulation order and the last
// couple of ulps per term.
#include "covercs/latsum.hpp"

#ifdef COVERCS_HAVE_AVX2

#include <immintrin.h>

#include <cmath>

namespace covercs::latsum {

namespace {

// exp(x) for x in [-708, 0]; inputs below -708 return 0.
inline __m256d exp_pd_masked(__m256d x) {
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

    const __m256d lo = _mm256_set1_pd(-708.0);
    const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
    x = _mm256_max_pd(x, lo);

    // n = floor(x * log2e + 0.5)
    const __m256d n = _mm256_floor_pd(
        _mm256_add_pd(_mm256_mul_pd(x, log2e), _mm256_set1_pd(0.5)));
    x = _mm256_sub_pd(x, _mm256_mul_pd(n, c1));
    x = _mm256_sub_pd(x, _mm256_mul_pd(n, c2));

    const __m256d xx = _mm256_mul_pd(x, x);
    __m256d px = _mm256_add_pd(_mm256_mul_pd(p0, xx), p1);
    px = _mm256_add_pd(_mm256_mul_pd(px, xx), p2);
    px = _mm256_mul_pd(px, x);
    __m256d qx = _mm256_add_pd(_mm256_mul_pd(q0, xx), q1);
    qx = _mm256_add_pd(_mm256_mul_pd(qx, xx), q2);
    qx = _mm256_add_pd(_mm256_mul_pd(qx, xx), q3);
    __m256d r = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
    r = _mm256_add_pd(_mm256_set1_pd(1.0), _mm256_add_pd(r, r));

    // scale by 2^n
    const __m128i n32 = _mm256_cvtpd_epi32(n);
    const __m256i n64 = _mm256_cvtepi32_epi64(n32);
    const __m256i bias = _mm256_add_epi64(n64, _mm256_set1_epi64x(1023));
    const __m256d scale = _mm256_castsi256_pd(_mm256_slli_epi64(bias, 52));
    r = _mm256_mul_pd(r, scale);

    return _mm256_andnot_pd(underflow, r);
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double profile_eval(const StripKernel& k, double r) {
    double p = 0.0;
    for (int i = k.n_coeffs - 1; i >= 0; --i) p = p * r + k.coeffs[i];
    return p;
}

}  // namespace

double strip_sum_avx2(const StripKernel& k, double base_sq, double off, double step,
                      std::int64_t count) {
    const __m256d vbase = _mm256_set1_pd(base_sq);
    const __m256d vstep4 = _mm256_set1_pd(4.0 * step);
    __m256d vt = _mm256_add_pd(_mm256_set1_pd(off),
                               _mm256_mul_pd(_mm256_set1_pd(step),
                                             _mm256_setr_pd(0.0, 1.0, 2.0, 3.0)));
    __m256d acc = _mm256_setzero_pd();
    std::int64_t j = 0;

    switch (k.family) {
        case Family::Exponential: {
            const __m256d vlam = _mm256_set1_pd(-k.lambda);
            for (; j + 4 <= count; j += 4) {
                const __m256d d2 = _mm256_add_pd(vbase, _mm256_mul_pd(vt, vt));
                const __m256d r = _mm256_sqrt_pd(d2);
                acc = _mm256_add_pd(acc, exp_pd_masked(_mm256_mul_pd(vlam, r)));
                vt = _mm256_add_pd(vt, vstep4);
            }
            double sum = hsum(acc);
            for (; j < count; ++j) {
                const double t = off + step * static_cast<double>(j);
                sum += std::exp(-k.lambda * std::sqrt(base_sq + t * t));
            }
            return sum;
        }
        case Family::CompactPolynomial: {
            const __m256d vsup = _mm256_set1_pd(k.support_sq);
            for (; j + 4 <= count; j += 4) {
                const __m256d d2 = _mm256_add_pd(vbase, _mm256_mul_pd(vt, vt));
                const __m256d inside = _mm256_cmp_pd(d2, vsup, _CMP_LE_OQ);
                if (_mm256_movemask_pd(inside) != 0) {
                    const __m256d r = _mm256_sqrt_pd(d2);
                    __m256d p = _mm256_setzero_pd();
                    for (int i = k.n_coeffs - 1; i >= 0; --i)
                        p = _mm256_add_pd(_mm256_mul_pd(p, r), _mm256_set1_pd(k.coeffs[i]));
                    acc = _mm256_add_pd(acc, _mm256_and_pd(inside, p));
                }
                vt = _mm256_add_pd(vt, vstep4);
            }
            double sum = hsum(acc);
            for (; j < count; ++j) {
                const double t = off + step * static_cast<double>(j);
                const double d2 = base_sq + t * t;
                if (d2 <= k.support_sq) sum += profile_eval(k, std::sqrt(d2));
            }
            return sum;
        }
    }
    return 0.0;
}

}  // namespace covercs::latsum

#endif  // COVERCS_HAVE_AVX2
