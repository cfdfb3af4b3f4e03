#pragma once

// Large-<n> factorization + Markoff approximation to the field-ensemble
// tangle, written in the symmetric eigenbasis of J_x = J_+ + J_-.

#include "tcm/tensor.hpp"

namespace tcm {

/// Amplitudes of a two-atom state on the J_x eigenvectors
///   m = +1: (|ee> + sqrt2 |S> + |gg>) / 2
///   m =  0: (|ee> - |gg>) / sqrt2
///   m = -1: (|ee> - sqrt2 |S> + |gg>) / 2
/// with |S> = (|eg> + |ge>) / sqrt2, plus the singlet amplitude.
struct JxCoefficients {
    cplx d_minus1;
    cplx d_zero;
    cplx d_plus1;
    cplx singlet_amp;
};

JxCoefficients jx_coefficients(const CVector& atomic);

double constant_c(const JxCoefficients& d);
double h_of_t(const JxCoefficients& d, double t_prime);

/// t' = g t / (2 sqrt(<n> - N/2 + 1/2)).
double scaled_time(double g, double t, double mean_n, int atoms = 2);

/// 2 {1 - [c - h(t')] / 4}; meaningful for t up to about 2 pi sqrt(<n>) / g.
double approx_tau_F_AA(const JxCoefficients& d, double g, double t, double mean_n, int atoms = 2);

/// 2 [1 - tr rho_AA^2] for the pointer-basis mixture sum_m |d_m|^2 |A_m(t)><A_m(t)|,
/// using the large-<n> overlaps |<A_{+-1}|A_0>|^2 = sin^2(2t')/2 and
/// |<A_1|A_-1>|^2 = sin^4(2t'). The singlet leaves the field in place, as
/// does m = 0, so the two stay coherent and share one pointer state.
double pointer_basis_tau_F_AA(const JxCoefficients& d, double g, double t, double mean_n, int atoms = 2);

}  // namespace tcm
