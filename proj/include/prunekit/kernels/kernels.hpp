#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

// Double-precision inner-loop kernels used by k-NN search, the DFT and the toy
// network.
//
// Every reduction accumulates into kLanes interleaved partial sums (element i
// goes to lane i % kLanes) and combines them as (l0 + l1) + (l2 + l3), with the
// tail folded in sequentially afterwards. The scalar reference follows the same
// order, so all variants return bitwise-identical results and dispatch never
// changes an output.

namespace prunekit::kernels {

inline constexpr std::size_t kLanes = 4;

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa);

/// Variants compiled into this binary and supported by the running CPU.
std::vector<Isa> available_isas();

/// Best available variant, unless PRUNEKIT_SIMD=scalar forces the reference.
Isa active_isa();

double dot(std::span<const double> a, std::span<const double> b);
double squared_l2(std::span<const double> a, std::span<const double> b);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// Explicit-variant entry points for equivalence tests and benchmarks.
double dot(Isa isa, std::span<const double> a, std::span<const double> b);
double squared_l2(Isa isa, std::span<const double> a, std::span<const double> b);
void axpy(Isa isa, double alpha, std::span<const double> x, std::span<double> y);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double squared_l2(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
bool compiled();
double dot(const double* a, const double* b, std::size_t n);
double squared_l2(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace avx2

namespace neon {
bool compiled();
double dot(const double* a, const double* b, std::size_t n);
double squared_l2(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace neon

}  // namespace prunekit::kernels
