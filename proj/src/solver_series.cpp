#include <cmath>
#include <vector>

#include "lsmkit/forward.hpp"
#include "lsmkit/specfun.hpp"

namespace lsm {

namespace {

struct AntennaModes {
    // H^(2)_n(k rho_m) and angle phi_m of antenna m relative to the cylinder
    // center, for n = 0..nmax.
    std::vector<cplx> h2; // (nmax+1) entries
    double phi = 0.0;
};

} // namespace

// TM_z dielectric cylinder under a (-j/4) H0^(2) line source. The incident
// wave is expanded about the cylinder center (Graf addition theorem), E_z and
// dE_z/drho are matched at rho = a per azimuthal mode, and the scattered field
// at an exterior point follows as an outgoing-harmonic sum. Folding +/-n uses
// a_{-n} = a_n.
CMatrix solve_cylinder_series(const SceneConfig& scene, double f) {
    if (scene.scatterers.size() != 1)
        throw ValidationError("solve_cylinder_series: exactly one circular scatterer supported");
    const Scatterer& s = scene.scatterers.front();
    if (s.sigma != 0.0)
        throw ValidationError(
            "solve_cylinder_series: lossy scatterers unsupported (sigma != 0); use the MoM solver");

    const double k = wavenumber(f);
    const double k1 = k * std::sqrt(s.eps_r);
    const double a = s.radius;
    const int nmax = static_cast<int>(std::ceil(k * a)) + 15;

    // J_n(ka), J_n(k1 a), H2_n(ka) through order nmax+1 for the derivatives.
    std::vector<double> j_ka(nmax + 2), j_k1a(nmax + 2), y_ka(nmax + 2);
    specfun::bessel_j_all(nmax + 1, k * a, j_ka.data());
    specfun::bessel_j_all(nmax + 1, k1 * a, j_k1a.data());
    specfun::bessel_y_all(nmax + 1, k * a, y_ka.data());

    auto dj = [&](const std::vector<double>& jv, double arg, int n) {
        return n == 0 ? -jv[1] : jv[n - 1] - (static_cast<double>(n) / arg) * jv[n];
    };

    std::vector<cplx> mode_coef(nmax + 1);
    for (int n = 0; n <= nmax; ++n) {
        const cplx h2n{j_ka[n], -y_ka[n]};
        const cplx h2p = n == 0 ? cplx{-j_ka[1], y_ka[1]}
                                : cplx{j_ka[n - 1], -y_ka[n - 1]} -
                                      (static_cast<double>(n) / (k * a)) * h2n;
        const double num_jpart = k1 * dj(j_k1a, k1 * a, n) * j_ka[n] -
                                 k * dj(j_ka, k * a, n) * j_k1a[n];
        const cplx den = k * h2p * j_k1a[n] - k1 * dj(j_k1a, k1 * a, n) * h2n;
        mode_coef[n] = num_jpart / den;
    }

    // Outgoing harmonics at every ring antenna (they serve as both Tx and Rx).
    const std::size_t n_ant = scene.ring.count;
    std::vector<AntennaModes> ant(n_ant);
    std::vector<double> jbuf(nmax + 1), ybuf(nmax + 1);
    for (std::size_t m = 0; m < n_ant; ++m) {
        const Point2 rel = scene.ring.position(m) - s.center;
        const double rho = norm(rel);
        ant[m].phi = std::atan2(rel.y, rel.x);
        ant[m].h2.resize(nmax + 1);
        specfun::bessel_j_all(nmax, k * rho, jbuf.data());
        specfun::bessel_y_all(nmax, k * rho, ybuf.data());
        for (int n = 0; n <= nmax; ++n) ant[m].h2[n] = cplx{jbuf[n], -ybuf[n]};
    }

    const auto& rx_idx = scene.aperture.rx_indices;
    CMatrix out(rx_idx.size(), n_ant);
    for (std::size_t tx = 0; tx < n_ant; ++tx) {
        const AntennaModes& at = ant[tx];
        for (std::size_t r = 0; r < rx_idx.size(); ++r) {
            const AntennaModes& ar = ant[rx_idx[r]];
            cplx sum = mode_coef[0] * at.h2[0] * ar.h2[0];
            const double dphi = ar.phi - at.phi;
            for (int n = 1; n <= nmax; ++n)
                sum += 2.0 * mode_coef[n] * at.h2[n] * ar.h2[n] * std::cos(n * dphi);
            out(r, tx) = cplx{0.0, -0.25} * sum;
        }
    }
    return out;
}

} // namespace lsm
