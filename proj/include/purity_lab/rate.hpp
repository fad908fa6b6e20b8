#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "purity_lab/rational.hpp"
#include "purity_lab/separability.hpp"
#include "purity_lab/state.hpp"

namespace purity_lab {

// Number of particle pairs inside an s-particle group: s(s-1)/2.
inline std::int64_t pair_count(std::int64_t s) {
    if (s < 0) throw ValidationError("pair_count requires s >= 0");
    return s * (s - 1) / 2;
}

// Share of the system's particle pairs entangled inside one s-site factor.
inline Rational factor_rate(int s, int n) {
    if (s < 2 || s > n)
        throw ValidationError("factor size " + std::to_string(s) +
                              " out of range [2, " + std::to_string(n) + "]");
    return Rational(static_cast<std::int64_t>(s) * (s - 1),
                    static_cast<std::int64_t>(n) * (n - 1));
}

enum class RateClass { Separable, Partial, Maximal };

inline const char* to_string(RateClass c) {
    switch (c) {
        case RateClass::Separable: return "separable";
        case RateClass::Partial: return "partial";
        case RateClass::Maximal: return "maximal";
    }
    return "?";
}

struct FactorRate {
    SiteSubset sites;
    int size = 0;
    Rational rate;                  // 0/1 for singletons
    bool plausibly_maximal = false; // heuristic, see below; meaningful for entangled factors
};

struct RateReport {
    Factorization factorization;
    std::vector<FactorRate> per_factor;
    Rational e_total;
    RateClass classification = RateClass::Separable;
    // Set when some entangled factor fails the plausibly-maximal heuristic.
    // The total is then still the exact pair ratio, but reading it as an
    // entanglement measure assumes maximally entangled factors.
    bool measure_caveat = false;
};

// Total entanglement rate of a pure state: the finest factorization is
// recovered, each entangled factor of size s contributes s(s-1)/(n(n-1)),
// singletons contribute zero. All sums are exact rationals; doubles appear
// only in rendering.
//
// The plausibly-maximal flag checks a necessary condition only: every
// single-site reduction inside the factor is maximally mixed (purity within
// tol of 1/d_i). There is no operational test for multipartite maximal
// entanglement here; the flag is labeled a heuristic everywhere it surfaces.
inline RateReport total_rate(const PureState& psi, double tol = kPurityTol,
                             int workers = 1) {
    const int n = psi.site_count();
    RateReport report;
    report.factorization = finest_factorization(psi, tol, workers);
    report.e_total = Rational(0, 1);
    for (const Factor& factor : report.factorization.factors) {
        FactorRate entry;
        entry.sites = factor.sites;
        entry.size = factor.sites.size();
        if (factor.entangled) {
            entry.rate = factor_rate(entry.size, n);
            entry.plausibly_maximal = true;
            for (int site : factor.sites.members()) {
                const double p =
                    reduced_purity(psi, SiteSubset::of({site}, n));
                const double maximally_mixed = 1.0 / psi.dims().dim(site);
                if (std::abs(p - maximally_mixed) > tol) {
                    entry.plausibly_maximal = false;
                    report.measure_caveat = true;
                }
            }
        } else {
            entry.rate = Rational(0, 1);
        }
        report.e_total = report.e_total + entry.rate;
        report.per_factor.push_back(entry);
    }
    if (report.e_total == Rational(0, 1)) {
        report.classification = RateClass::Separable;
    } else if (report.e_total == Rational(1, 1)) {
        report.classification = RateClass::Maximal;
    } else {
        report.classification = RateClass::Partial;
    }
    return report;
}

} // namespace purity_lab
