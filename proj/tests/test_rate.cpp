#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace purity_lab;
using Catch::Approx;

TEST_CASE("pair_count", "[rate]") {
    REQUIRE(pair_count(2) == 1);
    REQUIRE(pair_count(3) == 3);
    REQUIRE(pair_count(5) == 10);
    REQUIRE(pair_count(0) == 0);
    REQUIRE(pair_count(1) == 0);
}

TEST_CASE("factor_rate is an exact reduced fraction", "[rate]") {
    REQUIRE(factor_rate(3, 5) == Rational(3, 10));
    REQUIRE(factor_rate(2, 5) == Rational(1, 10));
    REQUIRE(factor_rate(6, 6) == Rational(1, 1));
    REQUIRE(factor_rate(3, 5).value() == Approx(0.3));
    REQUIRE_THROWS_AS(factor_rate(1, 5), ValidationError);
    REQUIRE_THROWS_AS(factor_rate(6, 5), ValidationError);
}

TEST_CASE("rates of the 5-qubit GHZ (x) Bell state", "[rate]") {
    const RateReport report = total_rate(tensor_product(testutil::ghz(3), testutil::bell()));
    REQUIRE(report.per_factor.size() == 2);
    REQUIRE(report.per_factor[0].rate == Rational(3, 10));
    REQUIRE(report.per_factor[1].rate == Rational(1, 10));
    REQUIRE(report.e_total == Rational(2, 5));
    REQUIRE(report.classification == RateClass::Partial);
    REQUIRE_FALSE(report.measure_caveat);
    REQUIRE(report.per_factor[0].plausibly_maximal);
    REQUIRE(report.per_factor[1].plausibly_maximal);
}

TEST_CASE("rate of five Bell pairs", "[rate]") {
    PureState psi = testutil::bell();
    for (int i = 0; i < 4; ++i) psi = tensor_product(psi, testutil::bell());
    REQUIRE(psi.site_count() == 10);
    const RateReport report = total_rate(psi);
    REQUIRE(report.e_total == Rational(1, 9));
}

TEST_CASE("rate of GHZ_5 (x) GHZ_4", "[rate]") {
    const RateReport report =
        total_rate(tensor_product(testutil::ghz(5), testutil::ghz(4)));
    REQUIRE(report.e_total == Rational(4, 9));
}

TEST_CASE("rate of GHZ_5 (x) four Bell pairs", "[rate]") {
    PureState psi = testutil::ghz(5);
    for (int i = 0; i < 4; ++i) psi = tensor_product(psi, testutil::bell(), 8192);
    const RateReport report = total_rate(psi);
    REQUIRE(report.e_total == Rational(7, 39));
}

TEST_CASE("product states have rate zero", "[rate]") {
    const RateReport report = total_rate(testutil::basis_qubits({0, 0, 0, 0, 0, 0}));
    REQUIRE(report.e_total == Rational(0, 1));
    REQUIRE(report.classification == RateClass::Separable);
    for (const FactorRate& fr : report.per_factor) REQUIRE(fr.rate.num == 0);
}

TEST_CASE("fully entangled states have rate one", "[rate]") {
    for (int n : {2, 3, 5}) {
        const RateReport report = total_rate(testutil::ghz(n));
        REQUIRE(report.e_total == Rational(1, 1));
        REQUIRE(report.classification == RateClass::Maximal);
    }
}

TEST_CASE("rate agrees with the separability verdicts", "[rate]") {
    std::mt19937_64 rng(307);
    std::vector<PureState> corpus;
    corpus.push_back(testutil::basis_qubits({0, 1}));
    corpus.push_back(testutil::ghz(4));
    corpus.push_back(tensor_product(testutil::bell(), testutil::haar_state({2}, rng)));
    corpus.push_back(testutil::haar_state({2, 2, 2}, rng));
    for (const PureState& psi : corpus) {
        const RateReport report = total_rate(psi);
        REQUIRE((report.e_total == Rational(0, 1)) == is_separable_pure(psi).separable);
        REQUIRE((report.e_total == Rational(1, 1)) == fully_entangled(psi));
    }
}

TEST_CASE("per-factor rates add up exactly", "[rate]") {
    PureState psi = tensor_product(testutil::ghz(5), testutil::ghz(4));
    const RateReport report = total_rate(psi);
    Rational sum(0, 1);
    for (const FactorRate& fr : report.per_factor) {
        sum = sum + fr.rate;
        REQUIRE(fr.rate.den <= static_cast<std::int64_t>(psi.site_count()) *
                                   (psi.site_count() - 1));
    }
    REQUIRE(sum == report.e_total);
}

TEST_CASE("merging factors strictly increases the rate", "[rate]") {
    // GHZ_9 against GHZ_5 (x) GHZ_4 at n = 9
    const RateReport merged = total_rate(testutil::ghz(9));
    const RateReport split = total_rate(tensor_product(testutil::ghz(5), testutil::ghz(4)));
    REQUIRE(merged.e_total == Rational(1, 1));
    REQUIRE(split.e_total == Rational(4, 9));
    REQUIRE(split.e_total < merged.e_total);
}

TEST_CASE("non-maximally entangled factors raise the measure caveat", "[rate]") {
    // 0.8|00> + 0.6|11> is entangled but not maximally
    const PureState skew(LocalDims({2, 2}),
                         {cplx{0.8, 0.0}, cplx{0.0, 0.0}, cplx{0.0, 0.0}, cplx{0.6, 0.0}});
    const RateReport report = total_rate(tensor_product(skew, testutil::bell()));
    REQUIRE(report.e_total == Rational(1, 3)); // two pair-factors at (2*1)/(4*3) each
    REQUIRE(report.measure_caveat);
    REQUIRE_FALSE(report.per_factor[0].plausibly_maximal);
    REQUIRE(report.per_factor[1].plausibly_maximal);
}

TEST_CASE("singleton factors contribute exactly zero", "[rate]") {
    const RateReport report =
        total_rate(tensor_product(testutil::basis_qubits({1}), testutil::bell()));
    REQUIRE(report.per_factor.size() == 2);
    REQUIRE(report.per_factor[0].rate == Rational(0, 1));
    REQUIRE(report.per_factor[1].rate == Rational(1, 3));
    REQUIRE(report.e_total == Rational(1, 3));
}
