#pragma once

#include <algorithm>
#include <vector>

#include <eigen3/Eigen/Dense>

#include "purity_lab/state.hpp"
#include "purity_lab/subset.hpp"

// Ground-truth checks that take a different route from the purity pipeline:
// singular values across a cut, and literal product reconstruction. Slower
// by design; used to validate every purity-based decision on small states.

namespace purity_lab::oracle {

inline constexpr double kRankTol = 1e-8;

struct CutSpectrum {
    SiteSubset cut;
    std::vector<double> singular_values; // descending
    int schmidt_rank = 0;                // values above the rank tolerance
};

// Reshapes the amplitude vector across cut | complement and reads off the
// singular values. Rank 1 means the cut factorizes.
inline CutSpectrum schmidt_rank(const PureState& psi, const SiteSubset& cut,
                                double rank_tol = kRankTol) {
    const int n = psi.site_count();
    if (cut.empty() || cut.size() == n || cut.site_count() != n)
        throw ValidationError("cut must be a non-empty proper subset of the sites");

    const std::vector<std::size_t> ro = detail::subindex_offsets(psi.dims(), cut);
    const std::vector<std::size_t> co = detail::subindex_offsets(psi.dims(), cut.complement());
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(ro.size()),
                       static_cast<Eigen::Index>(co.size()));
    for (std::size_t r = 0; r < ro.size(); ++r)
        for (std::size_t c = 0; c < co.size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                psi.amplitude(ro[r] + co[c]);

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    CutSpectrum spectrum;
    spectrum.cut = cut;
    const auto& sv = svd.singularValues();
    spectrum.singular_values.assign(sv.data(), sv.data() + sv.size());
    std::sort(spectrum.singular_values.begin(), spectrum.singular_values.end(),
              std::greater<double>());
    spectrum.schmidt_rank = static_cast<int>(
        std::count_if(spectrum.singular_values.begin(), spectrum.singular_values.end(),
                      [rank_tol](double s) { return s > rank_tol; }));
    return spectrum;
}

// True iff rho equals partial_trace(rho, S) (x) partial_trace(rho, ~S) with
// the factor sites put back in their original positions.
//
// The re-permutation is plain index bookkeeping. Worked 3-site example with
// S = {1} on sites {0,1,2}: the product rho_S (x) rho_Sc orders its sites
// [1, 0, 2], so position 0 of the product holds original site 1, position 1
// holds site 0, position 2 holds site 2. The inverse map sends original
// site j to its position in [members(S), members(~S)] = [1, 0, 2], giving
// order = [1, 0, 2] for permute_sites (output position j takes product site
// order[j]): output 0 <- product 1 (site 0), output 1 <- product 0 (site 1),
// output 2 <- product 2 (site 2).
inline bool factor_check(const DensityMatrix& rho, const SiteSubset& subset, double tol) {
    const int n = rho.site_count();
    if (subset.empty() || subset.size() == n || subset.site_count() != n)
        throw ValidationError("subset must be a non-empty proper subset of the sites");

    const DensityMatrix left = partial_trace(rho, subset);
    const DensityMatrix right = partial_trace(rho, subset.complement());
    const DensityMatrix product = tensor_product(left, right, rho.dim());

    // position in the product of each original site
    std::vector<int> product_site(static_cast<std::size_t>(n));
    int pos = 0;
    for (int site : subset.members()) product_site[static_cast<std::size_t>(site)] = pos++;
    for (int site : subset.complement().members())
        product_site[static_cast<std::size_t>(site)] = pos++;
    const DensityMatrix restored = permute_sites(product, product_site);

    for (std::size_t i = 0; i < restored.entries().size(); ++i)
        if (std::abs(restored.entries()[i] - rho.entries()[i]) > tol) return false;
    return true;
}

} // namespace purity_lab::oracle
