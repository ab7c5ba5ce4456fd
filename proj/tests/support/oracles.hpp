#pragma once

// Direct-definition reimplementations used as test oracles. Nothing here
// calls into the library's numeric code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

inline double sample_std(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline double dynamic_uncertainty(const std::vector<double>& p, std::size_t J, bool paper_denominator = false) {
    const std::size_t K = p.size();
    double total = 0.0;
    for (std::size_t k = J; k <= K; ++k) {
        std::vector<double> window(p.begin() + static_cast<long>(k - J), p.begin() + static_cast<long>(k));
        total += sample_std(window);
    }
    return total / static_cast<double>(paper_denominator ? K - J : K - J + 1);
}

inline std::vector<double> dft_magnitudes(const std::vector<double>& s) {
    const std::size_t K = s.size();
    std::vector<double> out(K / 2 + 1);
    for (std::size_t m = 0; m <= K / 2; ++m) {
        long double re = 0.0L, im = 0.0L;
        for (std::size_t t = 0; t < K; ++t) {
            const long double angle = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(m) *
                                      static_cast<long double>(t) / static_cast<long double>(K);
            re += s[t] * std::cos(angle);
            im += s[t] * std::sin(angle);
        }
        out[m] = static_cast<double>(std::sqrt(re * re + im * im));
    }
    return out;
}

inline double euclidean(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

inline double cosine(const double* a, const double* b, std::size_t d) {
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return 1.0 - ab / (std::sqrt(aa) * std::sqrt(bb));
}

// Full sort of every (distance, index) pair, then the first k indices.
inline std::vector<std::size_t> knn(const std::vector<double>& rows, std::size_t d, const std::vector<double>& q,
                                    std::size_t k, bool use_cosine) {
    const std::size_t n = rows.size() / d;
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < n; ++i) {
        const double* r = rows.data() + i * d;
        all.emplace_back(use_cosine ? cosine(q.data(), r, d) : euclidean(q.data(), r, d), i);
    }
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < std::min(k, n); ++i) out.push_back(all[i].second);
    return out;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

inline double rel_err(double a, double b, double floor = 0.0) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace oracle
