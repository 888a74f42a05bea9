#pragma once

// Laboratory-frame photon bookkeeping, signal-to-noise ratios and g2(0).

#include <string>

#include "dce/hilbert.hpp"

namespace dce {

/// Ratio that may be infinite (zero noise, nonzero signal) or undefined
/// (zero noise and zero signal).
struct Snr {
    enum class Kind { Finite, Infinite, NotApplicable };
    Kind kind = Kind::NotApplicable;
    double value = 0.0;  // meaningful only for Finite

    static Snr finite(double v) { return {Kind::Finite, v}; }
    static Snr infinite() { return {Kind::Infinite, 0.0}; }
    static Snr not_applicable() { return {Kind::NotApplicable, 0.0}; }

    bool is_finite() const { return kind == Kind::Finite; }
    /// "inf", "n/a" or the value with 17 significant digits.
    std::string str() const;
};

struct FluxBreakdown {
    double phi_bgn = 0.0;  // sinh^2 r
    double phi_dce = 0.0;  // n_s cosh 2r - Re<a_s^2> sinh 2r
    double phi_out = 0.0;  // kappa (phi_bgn + phi_dce), in the units of kappa
    Snr snr;               // phi_dce / phi_bgn
};

/// Throws Precondition when n_s < 0 (beyond -1e-12 rounding).
FluxBreakdown lab_frame_breakdown(double n_s, cplx as2, double r, double kappa);

/// <a^dag a> of the bare mode for a squeezed-frame state, evaluated through
/// a = cosh(r) a_s - sinh(r) a_s^dag on the cavity (mode 0) operators.
double lab_photon_number(const DensityMatrix& rho, double r);

/// <a_s^dag2 a_s^2> / <a_s^dag a_s>^2 on mode 0. Throws UndefinedCorrelation
/// when the photon number is below 1e-14.
double g2(const DensityMatrix& rho);

/// (n_F - n_0) / n_0, infinite when n_0 < 1e-12.
Snr snr_squeezed_frame(double n_F, double n_0);

}  // namespace dce
