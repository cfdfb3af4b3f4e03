#include "tcm/markoff.hpp"

#include <cmath>
#include <stdexcept>

namespace tcm {

JxCoefficients jx_coefficients(const CVector& atomic) {
    if (atomic.size() != 4) throw DimensionError("jx_coefficients: expected four amplitudes (ee, eg, ge, gg)");
    const double r2 = std::sqrt(2.0);
    const cplx ee = atomic(0);
    const cplx sym = (atomic(1) + atomic(2)) / r2;
    const cplx gg = atomic(3);
    JxCoefficients d;
    d.d_plus1 = (ee + r2 * sym + gg) / 2.0;
    d.d_zero = (ee - gg) / r2;
    d.d_minus1 = (ee - r2 * sym + gg) / 2.0;
    d.singlet_amp = (atomic(1) - atomic(2)) / r2;
    return d;
}

double constant_c(const JxCoefficients& d) {
    const double m = std::norm(d.d_minus1);
    const double z = std::norm(d.d_zero);
    const double p = std::norm(d.d_plus1);
    return 4.0 * (m * m + z * z + p * p) + 2.0 * z * p + m * (2.0 * z + 3.0 * p) - 4.0 * m * p;
}

double h_of_t(const JxCoefficients& d, double t_prime) {
    const double m = std::norm(d.d_minus1);
    const double z = std::norm(d.d_zero);
    const double p = std::norm(d.d_plus1);
    return 2.0 * z * (m + p) * std::cos(4.0 * t_prime) + m * p * std::cos(8.0 * t_prime);
}

double scaled_time(double g, double t, double mean_n, int atoms) {
    const double radicand = mean_n - atoms / 2.0 + 0.5;
    if (!(radicand > 0.0)) throw std::invalid_argument("scaled_time: <n> - N/2 + 1/2 must be positive");
    return g * t / (2.0 * std::sqrt(radicand));
}

double approx_tau_F_AA(const JxCoefficients& d, double g, double t, double mean_n, int atoms) {
    const double tp = scaled_time(g, t, mean_n, atoms);
    return 2.0 * (1.0 - 0.25 * (constant_c(d) - h_of_t(d, tp)));
}

double pointer_basis_tau_F_AA(const JxCoefficients& d, double g, double t, double mean_n, int atoms) {
    const double tp = scaled_time(g, t, mean_n, atoms);
    const double m = std::norm(d.d_minus1);
    const double z = std::norm(d.d_zero);
    const double p = std::norm(d.d_plus1);
    const double s = std::norm(d.singlet_amp);
    const double s2 = std::pow(std::sin(2.0 * tp), 2);
    const double purity = m * m + p * p + (z + s) * (z + s) + z * (m + p) * s2 + 2.0 * m * p * s2 * s2;
    return 2.0 * (1.0 - purity);
}

}  // namespace tcm
