#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "surfns/config.hpp"

namespace surfns {

struct VerifyRow {
    std::string name;
    double value = 0.0; ///< measured residual
    double tol = 0.0;
    bool pass = false;
    /// True when the residual shrinks under refinement (order column
    /// meaningful); false for identities that hold to roundoff or solver
    /// tolerance at any resolution.
    bool convergent = false;
};

struct VerifyReport {
    std::string surface;
    int n = 0;
    double h = 0.0; ///< coarsest parameter spacing, for order estimates
    std::vector<VerifyRow> rows;
    bool all_pass = true;
};

/// Runs every identity and property check against the configured surface:
/// cached-geometry identities, analytic curvatures, quadrature (area,
/// total curvature), halo interpolation, nodewise operator oracles, the
/// viscous-operator route agreement, integration by parts, Helmholtz
/// projection properties, and a short energy-balance run. Nodewise operator
/// tolerances are calibrated at n = 64 and scaled by (64/n)^3.
VerifyReport run_identity_suite(const SurfaceConfig& surf, const KrylovConfig& krylov,
                                std::uint64_t seed);

/// Observed convergence order between two reports of the same surface kind
/// (coarse first); rows that are not convergent get order 0.
std::vector<double> observed_orders(const VerifyReport& coarse, const VerifyReport& fine);

} // namespace surfns
