#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include <eigen3/Eigen/Dense>

#include "purity_lab/state.hpp"

namespace purity_lab {

inline constexpr double kHermitianTol = 1e-9;
inline constexpr double kTraceTol = 1e-9;
// Looser than the elementwise checks: eigensolvers on near-boundary input
// drift a little below zero.
inline constexpr double kPsdTol = -1e-8;

struct Diagnostics {
    double hermiticity_defect = 0.0; // max |m(r,c) - conj(m(c,r))|
    double trace_defect = 0.0;       // |tr - 1|
    double min_eigenvalue = 0.0;     // of the Hermitian part

    bool ok(double herm_tol = kHermitianTol, double trace_tol = kTraceTol,
            double psd_tol = kPsdTol) const {
        return hermiticity_defect <= herm_tol && trace_defect <= trace_tol &&
               min_eigenvalue >= psd_tol;
    }
};

// Structural diagnostics for untrusted matrices. Reports, never throws;
// callers decide what to reject. Internally constructed matrices skip this.
inline Diagnostics validate(const DensityMatrix& rho) {
    Diagnostics diag;
    const std::size_t d = rho.dim();
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c <= r; ++c)
            diag.hermiticity_defect =
                std::max(diag.hermiticity_defect,
                         std::abs(rho.at(r, c) - std::conj(rho.at(c, r))));
    diag.trace_defect = std::abs(trace(rho) - cplx{1.0, 0.0});

    using EMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const EMat> m(rho.entries().data(), static_cast<Eigen::Index>(d),
                             static_cast<Eigen::Index>(d));
    EMat herm = (m + m.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<EMat> solver(herm, Eigen::EigenvaluesOnly);
    diag.min_eigenvalue = solver.eigenvalues().minCoeff();
    return diag;
}

// Constructs a DensityMatrix from untrusted entries, rejecting anything that
// fails the structural checks.
inline DensityMatrix validated_density(LocalDims dims, std::vector<cplx> entries,
                                       double herm_tol = kHermitianTol,
                                       double trace_tol = kTraceTol,
                                       double psd_tol = kPsdTol) {
    DensityMatrix rho(std::move(dims), std::move(entries));
    const Diagnostics diag = validate(rho);
    if (diag.hermiticity_defect > herm_tol)
        throw ValidationError("matrix is not Hermitian: defect " +
                              std::to_string(diag.hermiticity_defect));
    if (diag.trace_defect > trace_tol)
        throw ValidationError("matrix trace differs from 1 by " +
                              std::to_string(diag.trace_defect));
    if (diag.min_eigenvalue < psd_tol)
        throw ValidationError("matrix is not positive semidefinite: smallest eigenvalue " +
                              std::to_string(diag.min_eigenvalue));
    return rho;
}

} // namespace purity_lab
