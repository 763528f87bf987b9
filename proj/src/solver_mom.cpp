#include <cmath>
#include <iostream>

#include "lsmkit/forward.hpp"
#include "lsmkit/specfun.hpp"

namespace lsm {
namespace mom {

cplx cell_integral_offdiag(double k, double a, double rho) {
    const cplx h0 = specfun::hankel2(0, k * rho);
    return cplx{0.0, -0.25} * (2.0 * kPi * a / k) * specfun::bessel_j(1, k * a) * h0;
}

cplx cell_integral_self(double k, double a) {
    const cplx h1 = specfun::hankel2(1, k * a);
    return cplx{0.0, -0.25} * ((2.0 * kPi * a / k) * h1 - cplx{0.0, 4.0 / (k * k)});
}

CellGrid build_cells(const std::vector<Scatterer>& scatterers, double cell_size, double f) {
    if (!(cell_size > 0.0)) throw ValidationError("mom: cell_size must be > 0");
    CellGrid grid;
    grid.cell_size = cell_size;
    grid.radius_equiv = cell_size / std::sqrt(kPi);
    for (const Scatterer& s : scatterers) {
        const auto half = static_cast<long>(std::ceil(s.radius / cell_size)) + 1;
        for (long j = -half; j < half; ++j) {
            for (long i = -half; i < half; ++i) {
                const Point2 c{s.center.x + (static_cast<double>(i) + 0.5) * cell_size,
                               s.center.y + (static_cast<double>(j) + 0.5) * cell_size};
                if (distance(c, s.center) < s.radius) {
                    grid.centers.push_back(c);
                    grid.chi.push_back(contrast(s, f));
                }
            }
        }
    }
    return grid;
}

} // namespace mom

namespace {

// Domain-equation solve shared by the full MoM and the Born shortcut.
struct MomSetup {
    mom::CellGrid cells;
    double k = 0.0;
    std::vector<Point2> tx_pos;
    std::vector<Point2> rx_pos;
};

MomSetup mom_setup(const SceneConfig& scene, double f, double cell_size) {
    MomSetup setup;
    setup.k = wavenumber(f);
    setup.cells = mom::build_cells(scene.scatterers, cell_size, f);
    if (setup.cells.centers.empty())
        throw ValidationError("mom: no cells cover the scatterer support; reduce cell_size");

    double eps_max = 1.0;
    for (const Scatterer& s : scene.scatterers) eps_max = std::max(eps_max, s.eps_r);
    const double lambda_int = 2.0 * kPi / (setup.k * std::sqrt(eps_max));
    if (cell_size > lambda_int / 8.0)
        std::cerr << "[lsmkit] warning: MoM cell size " << cell_size
                  << " m exceeds lambda_interior/8 = " << lambda_int / 8.0 << " m at f=" << f
                  << " Hz\n";

    setup.tx_pos = scene.ring.positions();
    setup.rx_pos.reserve(scene.aperture.rx_indices.size());
    for (std::size_t idx : scene.aperture.rx_indices)
        setup.rx_pos.push_back(scene.ring.position(idx));
    return setup;
}

CMatrix radiate(const MomSetup& s, const std::vector<CVector>& totals) {
    const double k = s.k;
    const double k2 = k * k;
    const std::size_t n_cells = s.cells.centers.size();
    CMatrix out(s.rx_pos.size(), totals.size());
    for (std::size_t tx = 0; tx < totals.size(); ++tx) {
        const CVector& et = totals[tx];
        for (std::size_t r = 0; r < s.rx_pos.size(); ++r) {
            cplx acc = 0.0;
            for (std::size_t q = 0; q < n_cells; ++q) {
                const double rho = distance(s.rx_pos[r], s.cells.centers[q]);
                acc += s.cells.chi[q] * et[q] *
                       mom::cell_integral_offdiag(k, s.cells.radius_equiv, rho);
            }
            out(r, tx) = k2 * acc;
        }
    }
    return out;
}

} // namespace

CMatrix solve_mom(const SceneConfig& scene, double f, double cell_size) {
    const MomSetup s = mom_setup(scene, f, cell_size);
    const double k = s.k;
    const double k2 = k * k;
    const std::size_t n = s.cells.centers.size();

    // state equation: (I - k^2 X I(p,q)) E_t = E_i
    CMatrix a(n, n);
    const cplx self = mom::cell_integral_self(k, s.cells.radius_equiv);
    for (std::size_t q = 0; q < n; ++q) {
        for (std::size_t p = 0; p < n; ++p) {
            if (p == q) {
                a(p, q) = 1.0 - k2 * s.cells.chi[q] * self;
            } else {
                const double rho = distance(s.cells.centers[p], s.cells.centers[q]);
                a(p, q) = -k2 * s.cells.chi[q] *
                          mom::cell_integral_offdiag(k, s.cells.radius_equiv, rho);
            }
        }
    }
    const LuFactors lu = lu_factor(std::move(a));

    std::vector<CVector> totals;
    totals.reserve(s.tx_pos.size());
    for (const Point2& tx : s.tx_pos)
        totals.push_back(lu_solve(lu, incident_field(tx, s.cells.centers, f)));

    return radiate(s, totals);
}

CMatrix solve_born(const SceneConfig& scene, double f, double cell_size) {
    const MomSetup s = mom_setup(scene, f, cell_size);
    std::vector<CVector> incidents;
    incidents.reserve(s.tx_pos.size());
    for (const Point2& tx : s.tx_pos) incidents.push_back(incident_field(tx, s.cells.centers, f));
    return radiate(s, incidents);
}

} // namespace lsm
