#include "prunekit/kernels/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "prunekit/error.hpp"

namespace prunekit::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return avx2::compiled() && __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa select_isa() {
    const auto isas = available_isas();
    if (const char* env = std::getenv("PRUNEKIT_SIMD")) {
        const std::string want(env);
        for (Isa isa : isas)
            if (to_string(isa) == want) return isa;
    }
    return isas.back();
}

void check_sizes(std::size_t a, std::size_t b) {
    if (a != b)
        throw ValidationError("kernel operands differ in length: " + std::to_string(a) + " vs " +
                              std::to_string(b));
}

}  // namespace

std::string_view to_string(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "?";
}

std::vector<Isa> available_isas() {
    std::vector<Isa> out{Isa::scalar};
    if (cpu_has_avx2()) out.push_back(Isa::avx2);
    if (neon::compiled()) out.push_back(Isa::neon);
    return out;
}

Isa active_isa() {
    static const Isa isa = select_isa();
    return isa;
}

double dot(Isa isa, std::span<const double> a, std::span<const double> b) {
    check_sizes(a.size(), b.size());
    switch (isa) {
        case Isa::avx2: return avx2::dot(a.data(), b.data(), a.size());
        case Isa::neon: return neon::dot(a.data(), b.data(), a.size());
        case Isa::scalar: break;
    }
    return scalar::dot(a.data(), b.data(), a.size());
}

double squared_l2(Isa isa, std::span<const double> a, std::span<const double> b) {
    check_sizes(a.size(), b.size());
    switch (isa) {
        case Isa::avx2: return avx2::squared_l2(a.data(), b.data(), a.size());
        case Isa::neon: return neon::squared_l2(a.data(), b.data(), a.size());
        case Isa::scalar: break;
    }
    return scalar::squared_l2(a.data(), b.data(), a.size());
}

void axpy(Isa isa, double alpha, std::span<const double> x, std::span<double> y) {
    check_sizes(x.size(), y.size());
    switch (isa) {
        case Isa::avx2: avx2::axpy(alpha, x.data(), y.data(), x.size()); return;
        case Isa::neon: neon::axpy(alpha, x.data(), y.data(), x.size()); return;
        case Isa::scalar: break;
    }
    scalar::axpy(alpha, x.data(), y.data(), x.size());
}

double dot(std::span<const double> a, std::span<const double> b) { return dot(active_isa(), a, b); }
double squared_l2(std::span<const double> a, std::span<const double> b) {
    return squared_l2(active_isa(), a, b);
}
void axpy(double alpha, std::span<const double> x, std::span<double> y) { axpy(active_isa(), alpha, x, y); }

}  // namespace prunekit::kernels
