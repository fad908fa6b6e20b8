#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "purity_lab/dims.hpp"
#include "purity_lab/errors.hpp"
#include "purity_lab/subset.hpp"

namespace purity_lab {

using cplx = std::complex<double>;

inline constexpr double kNormTol = 1e-9;

// How boundaries treat input that is off normalization: reject it, or
// rescale and warn.
enum class NormalizePolicy { Strict, Lenient };

// Normalized n-site state vector. Amplitudes are indexed mixed-radix with
// site 0 as the most significant digit (see LocalDims).
class PureState {
public:
    PureState(LocalDims dims, std::vector<cplx> amplitudes)
        : dims_(std::move(dims)), amps_(std::move(amplitudes)) {
        if (amps_.size() != dims_.total_dim())
            throw ValidationError("amplitude count " + std::to_string(amps_.size()) +
                                  " does not match total dimension " +
                                  std::to_string(dims_.total_dim()));
        double norm2 = 0.0;
        for (const cplx& a : amps_) norm2 += std::norm(a);
        if (std::abs(norm2 - 1.0) > kNormTol)
            throw ValidationError("state is not normalized: sum |amplitude|^2 = " +
                                  std::to_string(norm2));
    }

    static PureState basis(LocalDims dims, const std::vector<int>& digits) {
        for (int i = 0; i < dims.site_count(); ++i) {
            const int g = digits[static_cast<std::size_t>(i)];
            if (g < 0 || g >= dims.dim(i))
                throw ValidationError("basis digit " + std::to_string(g) +
                                      " out of range for site " + std::to_string(i));
        }
        std::vector<cplx> amps(dims.total_dim(), cplx{0.0, 0.0});
        amps[dims.index_of(digits)] = cplx{1.0, 0.0};
        return PureState(std::move(dims), std::move(amps));
    }

    const LocalDims& dims() const { return dims_; }
    int site_count() const { return dims_.site_count(); }
    std::size_t total_dim() const { return dims_.total_dim(); }
    const std::vector<cplx>& amplitudes() const { return amps_; }
    const cplx& amplitude(std::size_t index) const { return amps_[index]; }

private:
    LocalDims dims_;
    std::vector<cplx> amps_;
};

// Dense density matrix, row-major, total_dim x total_dim. Construction from
// library operations preserves Hermiticity, unit trace and positivity by
// construction; untrusted input goes through validate() first (validate.hpp).
class DensityMatrix {
public:
    DensityMatrix(LocalDims dims, std::vector<cplx> entries)
        : dims_(std::move(dims)), m_(std::move(entries)) {
        if (m_.size() != dims_.total_dim() * dims_.total_dim())
            throw ValidationError("matrix entry count does not match total dimension");
    }

    const LocalDims& dims() const { return dims_; }
    int site_count() const { return dims_.site_count(); }
    std::size_t dim() const { return dims_.total_dim(); }

    const cplx& at(std::size_t r, std::size_t c) const { return m_[r * dim() + c]; }
    cplx& at(std::size_t r, std::size_t c) { return m_[r * dim() + c]; }
    const std::vector<cplx>& entries() const { return m_; }

private:
    LocalDims dims_;
    std::vector<cplx> m_;
};

inline cplx trace(const DensityMatrix& rho) {
    cplx t{0.0, 0.0};
    for (std::size_t i = 0; i < rho.dim(); ++i) t += rho.at(i, i);
    return t;
}

// tr(rho^2) for Hermitian rho equals the squared Frobenius norm, so the
// matrix square is never formed. This runs once per enumerated subset, which
// is why it is O(d^2) and allocation-free.
inline double purity(const DensityMatrix& rho) {
    double p = 0.0;
    for (const cplx& e : rho.entries()) p += std::norm(e);
    return p;
}

inline PureState tensor_product(const PureState& a, const PureState& b,
                                std::size_t max_dim = kDefaultDimCap) {
    LocalDims dims = a.dims().concat(b.dims());
    require_within_cap(dims, max_dim);
    const std::size_t db = b.total_dim();
    std::vector<cplx> amps(dims.total_dim());
    for (std::size_t ia = 0; ia < a.total_dim(); ++ia)
        for (std::size_t ib = 0; ib < db; ++ib)
            amps[ia * db + ib] = a.amplitude(ia) * b.amplitude(ib);
    return PureState(std::move(dims), std::move(amps));
}

inline DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b,
                                    std::size_t max_dim = kDefaultDimCap) {
    LocalDims dims = a.dims().concat(b.dims());
    require_within_cap(dims, max_dim);
    const std::size_t da = a.dim(), db = b.dim(), d = da * db;
    std::vector<cplx> m(d * d);
    for (std::size_t ra = 0; ra < da; ++ra)
        for (std::size_t rb = 0; rb < db; ++rb)
            for (std::size_t ca = 0; ca < da; ++ca)
                for (std::size_t cb = 0; cb < db; ++cb)
                    m[(ra * db + rb) * d + (ca * db + cb)] = a.at(ra, ca) * b.at(rb, cb);
    return DensityMatrix(std::move(dims), std::move(m));
}

inline DensityMatrix density_from_pure(const PureState& psi) {
    const std::size_t d = psi.total_dim();
    std::vector<cplx> m(d * d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c)
            m[r * d + c] = psi.amplitude(r) * std::conj(psi.amplitude(c));
    return DensityMatrix(psi.dims(), std::move(m));
}

inline DensityMatrix mix(const std::vector<double>& weights,
                         const std::vector<DensityMatrix>& states) {
    if (weights.empty() || weights.size() != states.size())
        throw ValidationError("mix requires one weight per state");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw ValidationError("mixture weight is negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > kNormTol)
        throw ValidationError("mixture weights sum to " + std::to_string(sum) +
                              ", expected 1");
    const LocalDims& dims = states.front().dims();
    for (const DensityMatrix& s : states)
        if (!(s.dims() == dims))
            throw ValidationError("mixture states have mismatched dimensions");
    std::vector<cplx> m(dims.total_dim() * dims.total_dim(), cplx{0.0, 0.0});
    for (std::size_t k = 0; k < states.size(); ++k) {
        const double w = weights[k];
        const std::vector<cplx>& e = states[k].entries();
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += w * e[i];
    }
    return DensityMatrix(dims, std::move(m));
}

namespace detail {

inline void check_keep(const SiteSubset& keep, int site_count) {
    if (keep.empty()) throw ValidationError("keep set is empty");
    if (keep.site_count() != site_count)
        throw ValidationError("keep set is indexed over " + std::to_string(keep.site_count()) +
                              " sites but the state has " + std::to_string(site_count));
}

} // namespace detail

// Reduced density matrix on `keep`, tracing out the complementary sites.
// Entry (r, c) sums the input entries whose traced digits agree on both
// sides; kept sites appear in ascending site order.
inline DensityMatrix partial_trace(const DensityMatrix& rho, const SiteSubset& keep) {
    detail::check_keep(keep, rho.site_count());
    const std::vector<std::size_t> ko = detail::subindex_offsets(rho.dims(), keep);
    const std::vector<std::size_t> to =
        detail::subindex_offsets(rho.dims(), keep.complement());
    const std::size_t dk = ko.size();
    std::vector<cplx> m(dk * dk);
    for (std::size_t r = 0; r < dk; ++r) {
        for (std::size_t c = 0; c <= r; ++c) {
            cplx acc{0.0, 0.0};
            for (std::size_t t : to) acc += rho.at(ko[r] + t, ko[c] + t);
            m[r * dk + c] = acc;
            if (c != r) m[c * dk + r] = std::conj(acc);
        }
    }
    return DensityMatrix(rho.dims().select(keep), std::move(m));
}

// Reduced density matrix of a pure state, computed straight from the
// amplitude vector: rho_S = M M^dagger where M reshapes psi with kept sites
// as rows. Never materializes the full |psi><psi|, which matters once the
// cap is raised past a few thousand.
inline DensityMatrix reduced_density(const PureState& psi, const SiteSubset& keep) {
    detail::check_keep(keep, psi.site_count());
    const std::vector<std::size_t> ko = detail::subindex_offsets(psi.dims(), keep);
    const std::vector<std::size_t> to =
        detail::subindex_offsets(psi.dims(), keep.complement());
    const std::size_t dk = ko.size(), dt = to.size();
    const std::vector<cplx>& a = psi.amplitudes();

    // gather rows once for locality
    std::vector<cplx> rows(dk * dt);
    for (std::size_t r = 0; r < dk; ++r)
        for (std::size_t t = 0; t < dt; ++t) rows[r * dt + t] = a[ko[r] + to[t]];

    std::vector<cplx> m(dk * dk);
    for (std::size_t r = 0; r < dk; ++r) {
        for (std::size_t c = 0; c <= r; ++c) {
            cplx acc{0.0, 0.0};
            const cplx* pr = rows.data() + r * dt;
            const cplx* pc = rows.data() + c * dt;
            for (std::size_t t = 0; t < dt; ++t) acc += pr[t] * std::conj(pc[t]);
            m[r * dk + c] = acc;
            if (c != r) m[c * dk + r] = std::conj(acc);
        }
    }
    return DensityMatrix(psi.dims().select(keep), std::move(m));
}

inline double reduced_purity(const PureState& psi, const SiteSubset& keep) {
    return purity(reduced_density(psi, keep));
}

inline double reduced_purity(const DensityMatrix& rho, const SiteSubset& keep) {
    return purity(partial_trace(rho, keep));
}

// Relabels sites: output position j holds what was site order[j] in the
// input. order must be a permutation of 0..n-1.
inline PureState permute_sites(const PureState& psi, const std::vector<int>& order) {
    const int n = psi.site_count();
    std::vector<int> out_dims(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        out_dims[static_cast<std::size_t>(j)] = psi.dims().dim(order[static_cast<std::size_t>(j)]);
    LocalDims dims(out_dims);
    std::vector<cplx> amps(dims.total_dim());
    std::vector<int> in_digits, out_digits(static_cast<std::size_t>(n));
    for (std::size_t idx = 0; idx < psi.total_dim(); ++idx) {
        psi.dims().digits_of(idx, in_digits);
        for (int j = 0; j < n; ++j)
            out_digits[static_cast<std::size_t>(j)] =
                in_digits[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
        amps[dims.index_of(out_digits)] = psi.amplitude(idx);
    }
    return PureState(std::move(dims), std::move(amps));
}

inline DensityMatrix permute_sites(const DensityMatrix& rho, const std::vector<int>& order) {
    const int n = rho.site_count();
    std::vector<int> out_dims(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        out_dims[static_cast<std::size_t>(j)] = rho.dims().dim(order[static_cast<std::size_t>(j)]);
    LocalDims dims(out_dims);
    const std::size_t d = rho.dim();
    // old index -> new index map
    std::vector<std::size_t> map(d);
    std::vector<int> in_digits, out_digits(static_cast<std::size_t>(n));
    for (std::size_t idx = 0; idx < d; ++idx) {
        rho.dims().digits_of(idx, in_digits);
        for (int j = 0; j < n; ++j)
            out_digits[static_cast<std::size_t>(j)] =
                in_digits[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
        map[idx] = dims.index_of(out_digits);
    }
    std::vector<cplx> m(d * d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) m[map[r] * d + map[c]] = rho.at(r, c);
    return DensityMatrix(std::move(dims), std::move(m));
}

} // namespace purity_lab
