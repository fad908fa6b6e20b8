#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "purity_lab/purity_lab.hpp"

// Shared generators for the test suites. Everything is seeded so failures
// reproduce.

namespace testutil {

using namespace purity_lab;

inline PureState ghz(int m, int d = 2) {
    LocalDims dims(std::vector<int>(static_cast<std::size_t>(m), d));
    std::vector<cplx> amps(dims.total_dim(), cplx{0.0, 0.0});
    const double c = 1.0 / std::sqrt(static_cast<double>(d));
    std::vector<int> digits(static_cast<std::size_t>(m));
    for (int j = 0; j < d; ++j) {
        std::fill(digits.begin(), digits.end(), j);
        amps[dims.index_of(digits)] = cplx{c, 0.0};
    }
    return PureState(std::move(dims), std::move(amps));
}

inline PureState bell() { return ghz(2); }

inline PureState w_state(int m) {
    LocalDims dims(std::vector<int>(static_cast<std::size_t>(m), 2));
    std::vector<cplx> amps(dims.total_dim(), cplx{0.0, 0.0});
    const double c = 1.0 / std::sqrt(static_cast<double>(m));
    std::vector<int> digits(static_cast<std::size_t>(m), 0);
    for (int i = 0; i < m; ++i) {
        digits[static_cast<std::size_t>(i)] = 1;
        amps[dims.index_of(digits)] = cplx{c, 0.0};
        digits[static_cast<std::size_t>(i)] = 0;
    }
    return PureState(std::move(dims), std::move(amps));
}

inline PureState basis_qubits(const std::vector<int>& digits) {
    return PureState::basis(LocalDims(std::vector<int>(digits.size(), 2)), digits);
}

inline DensityMatrix maximally_mixed(const std::vector<int>& dims_vec) {
    LocalDims dims(dims_vec);
    const std::size_t d = dims.total_dim();
    std::vector<cplx> m(d * d, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < d; ++i) m[i * d + i] = cplx{1.0 / static_cast<double>(d), 0.0};
    return DensityMatrix(std::move(dims), std::move(m));
}

inline PureState haar_state(const std::vector<int>& dims_vec, std::mt19937_64& rng) {
    LocalDims dims(dims_vec);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<cplx> amps(dims.total_dim());
    double norm2 = 0.0;
    for (cplx& a : amps) {
        a = cplx{gauss(rng), gauss(rng)};
        norm2 += std::norm(a);
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (cplx& a : amps) a *= scale;
    return PureState(std::move(dims), std::move(amps));
}

// Random full-rank-ish mixture of Haar pure states.
inline DensityMatrix random_density(const std::vector<int>& dims_vec, std::mt19937_64& rng,
                                    int terms = 4) {
    std::uniform_real_distribution<double> uni(0.1, 1.0);
    std::vector<double> weights(static_cast<std::size_t>(terms));
    double sum = 0.0;
    for (double& w : weights) {
        w = uni(rng);
        sum += w;
    }
    for (double& w : weights) w /= sum;
    std::vector<DensityMatrix> parts;
    for (int i = 0; i < terms; ++i)
        parts.push_back(density_from_pure(haar_state(dims_vec, rng)));
    return mix(weights, parts);
}

inline bool approx_equal(const DensityMatrix& a, const DensityMatrix& b, double tol = 1e-9) {
    if (!(a.dims() == b.dims())) return false;
    for (std::size_t i = 0; i < a.entries().size(); ++i)
        if (std::abs(a.entries()[i] - b.entries()[i]) > tol) return false;
    return true;
}

inline bool approx_equal(const PureState& a, const PureState& b, double tol = 1e-12) {
    if (!(a.dims() == b.dims())) return false;
    for (std::size_t i = 0; i < a.amplitudes().size(); ++i)
        if (std::abs(a.amplitudes()[i] - b.amplitudes()[i]) > tol) return false;
    return true;
}

} // namespace testutil
