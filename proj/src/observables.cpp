#include "dce/observables.hpp"

#include <cmath>
#include <cstdio>

#include "dce/errors.hpp"

namespace dce {

namespace {

OperatorMatrix cavity_annihilation(const SpaceLayout& layout) {
    return embed(annihilation(layout.dim(0)), layout, 0);
}

}  // namespace

std::string Snr::str() const {
    switch (kind) {
        case Kind::Infinite: return "inf";
        case Kind::NotApplicable: return "n/a";
        case Kind::Finite: break;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

FluxBreakdown lab_frame_breakdown(double n_s, cplx as2, double r, double kappa) {
    if (n_s < -1e-12) throw Error(ErrorKind::Precondition, "photon number must be >= 0");
    FluxBreakdown f;
    const double sh = std::sinh(r);
    f.phi_bgn = sh * sh;
    f.phi_dce = n_s * std::cosh(2.0 * r) - as2.real() * std::sinh(2.0 * r);
    f.phi_out = kappa * (f.phi_bgn + f.phi_dce);
    if (f.phi_bgn > 0.0)
        f.snr = Snr::finite(f.phi_dce / f.phi_bgn);
    else if (f.phi_dce > 0.0)
        f.snr = Snr::infinite();
    else
        f.snr = Snr::not_applicable();
    return f;
}

double lab_photon_number(const DensityMatrix& rho, double r) {
    const OperatorMatrix as = cavity_annihilation(rho.layout());
    const OperatorMatrix a = std::cosh(r) * as - std::sinh(r) * as.adjoint();
    return expectation(rho, a.adjoint() * a).real();
}

double g2(const DensityMatrix& rho) {
    const OperatorMatrix a = cavity_annihilation(rho.layout());
    const OperatorMatrix ad = a.adjoint();
    const double n = expectation(rho, ad * a).real();
    if (!(n > 1e-14)) throw Error(ErrorKind::UndefinedCorrelation, "g2 is undefined for an empty cavity");
    const double n2 = expectation(rho, (ad * ad) * (a * a)).real();
    return n2 / (n * n);
}

Snr snr_squeezed_frame(double n_F, double n_0) {
    if (n_F < 0.0 || n_0 < 0.0) throw Error(ErrorKind::Precondition, "photon numbers must be >= 0");
    if (n_0 < 1e-12) return Snr::infinite();
    return Snr::finite((n_F - n_0) / n_0);
}

}  // namespace dce
