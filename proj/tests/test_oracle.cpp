#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace purity_lab;
using Catch::Approx;

namespace {

// Small pure corpus used for exhaustive cut checks.
std::vector<PureState> pure_corpus() {
    std::mt19937_64 rng(101);
    std::vector<PureState> corpus;
    corpus.push_back(testutil::basis_qubits({0, 1}));
    corpus.push_back(testutil::bell());
    corpus.push_back(testutil::ghz(3));
    corpus.push_back(testutil::ghz(3, 3));
    corpus.push_back(testutil::w_state(4));
    corpus.push_back(tensor_product(testutil::ghz(3), testutil::bell()));
    corpus.push_back(tensor_product(testutil::bell(), testutil::bell()));
    corpus.push_back(testutil::haar_state({2, 2, 2}, rng));
    corpus.push_back(tensor_product(testutil::haar_state({2}, rng),
                                    testutil::haar_state({2, 3}, rng)));
    return corpus;
}

} // namespace

TEST_CASE("schmidt spectrum of product and entangled cuts", "[oracle]") {
    const oracle::CutSpectrum product =
        oracle::schmidt_rank(testutil::basis_qubits({0, 0}), SiteSubset::of({0}, 2));
    REQUIRE(product.schmidt_rank == 1);
    REQUIRE(product.singular_values.front() == Approx(1.0).margin(1e-12));

    const oracle::CutSpectrum bell =
        oracle::schmidt_rank(testutil::bell(), SiteSubset::of({0}, 2));
    REQUIRE(bell.schmidt_rank == 2);
    REQUIRE(bell.singular_values[0] == Approx(1.0 / std::sqrt(2.0)).margin(1e-12));
    REQUIRE(bell.singular_values[1] == Approx(1.0 / std::sqrt(2.0)).margin(1e-12));

    const oracle::CutSpectrum ghz =
        oracle::schmidt_rank(testutil::ghz(3), SiteSubset::of({0, 1}, 3));
    REQUIRE(ghz.schmidt_rank == 2);
    REQUIRE(ghz.singular_values[0] == Approx(1.0 / std::sqrt(2.0)).margin(1e-12));
}

TEST_CASE("schmidt_rank rejects improper cuts", "[oracle]") {
    REQUIRE_THROWS_AS(oracle::schmidt_rank(testutil::bell(), SiteSubset::empty_set(2)),
                      ValidationError);
    REQUIRE_THROWS_AS(oracle::schmidt_rank(testutil::bell(), SiteSubset::full(2)),
                      ValidationError);
}

TEST_CASE("factor_check on explicit products and entangled cuts", "[oracle]") {
    const DensityMatrix product =
        tensor_product(density_from_pure(testutil::basis_qubits({0})),
                       testutil::maximally_mixed({2}));
    REQUIRE(oracle::factor_check(product, SiteSubset::of({0}, 2), 1e-9));

    const DensityMatrix bell = density_from_pure(testutil::bell());
    REQUIRE_FALSE(oracle::factor_check(bell, SiteSubset::of({0}, 2), 1e-9));

    const DensityMatrix ghz_bell =
        density_from_pure(tensor_product(testutil::ghz(3), testutil::bell()));
    REQUIRE(oracle::factor_check(ghz_bell, SiteSubset::of({3, 4}, 5), 1e-9));
    REQUIRE_FALSE(oracle::factor_check(ghz_bell, SiteSubset::of({2, 3}, 5), 1e-9));
}

TEST_CASE("factor_check handles non-contiguous subsets", "[oracle]") {
    // sites 0 and 2 carry the Bell pair after relabeling
    const PureState psi =
        permute_sites(tensor_product(testutil::bell(), testutil::basis_qubits({0})),
                      {0, 2, 1});
    const DensityMatrix rho = density_from_pure(psi);
    REQUIRE(oracle::factor_check(rho, SiteSubset::of({0, 2}, 3), 1e-9));
    REQUIRE(oracle::factor_check(rho, SiteSubset::of({1}, 3), 1e-9));
    REQUIRE_FALSE(oracle::factor_check(rho, SiteSubset::of({0, 1}, 3), 1e-9));
}

TEST_CASE("purity, schmidt rank, and factor_check agree on every cut", "[oracle]") {
    for (const PureState& psi : pure_corpus()) {
        const int n = psi.site_count();
        const DensityMatrix rho = density_from_pure(psi);
        const std::uint64_t full = SiteSubset::full(n).mask();
        for (std::uint64_t mask = 1; mask < full; ++mask) {
            const SiteSubset cut(mask, n);
            const bool by_purity = reduced_purity(psi, cut) >= 1.0 - kPurityTol;
            const bool by_rank = oracle::schmidt_rank(psi, cut).schmidt_rank == 1;
            const bool by_product = oracle::factor_check(rho, cut, 1e-9);
            INFO("state dim " << psi.total_dim() << " cut " << cut.to_string());
            REQUIRE(by_purity == by_rank);
            REQUIRE(by_rank == by_product);
        }
    }
}

TEST_CASE("sum of fourth powers of singular values equals the reduction purity",
          "[oracle]") {
    std::mt19937_64 rng(103);
    for (int rep = 0; rep < 10; ++rep) {
        const PureState psi = testutil::haar_state({2, 3, 2}, rng);
        for (std::uint64_t mask = 1; mask < 7; ++mask) {
            const SiteSubset cut(mask, 3);
            const oracle::CutSpectrum spectrum = oracle::schmidt_rank(psi, cut);
            double quartic = 0.0;
            double quadratic = 0.0;
            for (double s : spectrum.singular_values) {
                quartic += s * s * s * s;
                quadratic += s * s;
            }
            REQUIRE(quadratic == Approx(1.0).margin(1e-9));
            REQUIRE(quartic == Approx(reduced_purity(psi, cut)).margin(1e-9));
        }
    }
}
