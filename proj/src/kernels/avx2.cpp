#include "prunekit/kernels/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define PRUNEKIT_HAVE_AVX2 1
#define PRUNEKIT_AVX2 __attribute__((target("avx2")))
#else
#define PRUNEKIT_HAVE_AVX2 0
#endif

namespace prunekit::kernels::avx2 {

#if PRUNEKIT_HAVE_AVX2

namespace {

PRUNEKIT_AVX2 double reduce(__m256d acc) {
    alignas(32) double lanes[kLanes];
    _mm256_store_pd(lanes, acc);
    return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

}  // namespace

bool compiled() { return true; }

// mul and add stay separate (no FMA) to round exactly like the scalar path.

PRUNEKIT_AVX2 double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    double s = reduce(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

PRUNEKIT_AVX2 double squared_l2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double s = reduce(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

PRUNEKIT_AVX2 void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes)
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i),
                                              _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

#else

bool compiled() { return false; }
double dot(const double* a, const double* b, std::size_t n) { return scalar::dot(a, b, n); }
double squared_l2(const double* a, const double* b, std::size_t n) { return scalar::squared_l2(a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { scalar::axpy(alpha, x, y, n); }

#endif

}  // namespace prunekit::kernels::avx2
