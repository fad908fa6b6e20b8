#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "helpers.hpp"

using namespace purity_lab;
using testutil::approx_equal;
using Catch::Approx;

namespace {

const std::string kFixturesDir = PURITY_LAB_FIXTURES_DIR;

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name)
        : path(std::string("/tmp/purity_lab_test_") + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

report::Report sample_report() {
    const PureState psi = tensor_product(testutil::ghz(3), testutil::bell());
    report::Report rep;
    rep.input.kind = "pure";
    rep.input.expression = "ghz(3) x bell";
    rep.input.dims = psi.dims().dims();
    rep.input.n = psi.site_count();
    rep.input.total_dim = psi.total_dim();
    rep.workers = 1;
    const SeparabilityResult sep = is_separable_pure(psi);
    rep.verdict = sep.separable ? "separable" : "entanglement-present";
    rep.witness_sites = sep.impure_sites;
    rep.profile = purity_profile(psi);
    rep.rate = total_rate(psi);
    return rep;
}

} // namespace

TEST_CASE("pure state JSON round trip", "[report]") {
    std::mt19937_64 rng(401);
    const PureState psi = testutil::haar_state({2, 3}, rng);
    const io::LoadedState loaded = io::load_state_json(io::state_to_json(psi));
    REQUIRE_FALSE(loaded.is_density());
    REQUIRE(approx_equal(loaded.pure(), psi, 1e-15));
}

TEST_CASE("density JSON round trip", "[report]") {
    std::mt19937_64 rng(403);
    const DensityMatrix rho = testutil::random_density({2, 2}, rng);
    const io::LoadedState loaded = io::load_state_json(io::state_to_json(rho));
    REQUIRE(loaded.is_density());
    REQUIRE(approx_equal(loaded.density(), rho, 1e-12));
}

TEST_CASE("state files are validated strictly by default", "[report]") {
    nlohmann::json off_norm = {{"dims", {2}}, {"amplitudes", {{0.5, 0.0}, {0.5, 0.0}}}};
    REQUIRE_THROWS_AS(io::load_state_json(off_norm), ValidationError);
    const io::LoadedState loaded =
        io::load_state_json(off_norm, NormalizePolicy::Lenient);
    REQUIRE(loaded.warnings.size() == 1);
    REQUIRE(std::abs(loaded.pure().amplitude(0)) ==
            Approx(1.0 / std::sqrt(2.0)).margin(1e-12));

    nlohmann::json non_hermitian = {
        {"dims", {2}},
        {"matrix", {{{0.5, 0.0}, {0.3, 0.0}}, {{0.0, 0.0}, {0.5, 0.0}}}}};
    REQUIRE_THROWS_AS(io::load_state_json(non_hermitian), ValidationError);
    REQUIRE_THROWS_AS(io::load_state_json(non_hermitian, NormalizePolicy::Lenient),
                      ValidationError);

    nlohmann::json non_psd = {
        {"dims", {2}},
        {"matrix", {{{0.25, 0.0}, {0.75, 0.0}}, {{0.75, 0.0}, {0.75, 0.0}}}}};
    REQUIRE_THROWS_AS(io::load_state_json(non_psd), ValidationError);

    nlohmann::json off_trace = {
        {"dims", {2}},
        {"matrix", {{{0.45, 0.0}, {0.0, 0.0}}, {{0.0, 0.0}, {0.45, 0.0}}}}};
    REQUIRE_THROWS_AS(io::load_state_json(off_trace), ValidationError);
    const io::LoadedState rescaled =
        io::load_state_json(off_trace, NormalizePolicy::Lenient);
    REQUIRE(rescaled.warnings.size() == 1);
    REQUIRE(trace(rescaled.density()).real() == Approx(1.0).margin(1e-12));
}

TEST_CASE("malformed state files are rejected with a reason", "[report]") {
    REQUIRE_THROWS_AS(io::load_state_json(nlohmann::json::array()), ValidationError);
    REQUIRE_THROWS_AS(io::load_state_json({{"dims", {2}}}), ValidationError);
    REQUIRE_THROWS_AS(io::load_state_json({{"dims", {1}}, {"amplitudes", {{1.0, 0.0}}}}),
                      ValidationError);
    REQUIRE_THROWS_AS(
        io::load_state_json({{"dims", {2}}, {"amplitudes", {{1.0, 0.0}}}}),
        ValidationError);
    REQUIRE_THROWS_AS(io::load_state_json({{"dims", {2}},
                                           {"amplitudes", {{1.0}, {0.0, 0.0}}}}),
                      ValidationError);
}

TEST_CASE("file round trip through disk", "[report]") {
    TempFile tmp("state.json");
    {
        std::ofstream out(tmp.path);
        out << io::state_to_json(testutil::bell()).dump();
    }
    const io::LoadedState loaded = io::load_state_file(tmp.path);
    REQUIRE(approx_equal(loaded.pure(), testutil::bell(), 1e-15));
    REQUIRE_THROWS_AS(io::load_state_file("/nonexistent/state.json"), ValidationError);
}

TEST_CASE("shipped fixtures match their construction", "[report]") {
    const DensityMatrix mixed_example = tensor_product(
        tensor_product(density_from_pure(testutil::basis_qubits({0})),
                       testutil::maximally_mixed({2})),
        density_from_pure(testutil::bell()));
    const io::LoadedState loaded =
        io::load_state_file(kFixturesDir + "/mixed_example.json");
    REQUIRE(loaded.is_density());
    REQUIRE(approx_equal(loaded.density(), mixed_example, 1e-12));

    const io::LoadedState mm =
        io::load_state_file(kFixturesDir + "/maximally_mixed_2q.json");
    REQUIRE(approx_equal(mm.density(), testutil::maximally_mixed({2, 2}), 1e-12));

    const io::LoadedState product =
        io::load_state_file(kFixturesDir + "/pure_product_density.json");
    REQUIRE(approx_equal(product.density(),
                         density_from_pure(testutil::basis_qubits({0, 1, 0})), 1e-12));
}

TEST_CASE("report JSON round trips losslessly", "[report]") {
    const report::Report rep = sample_report();
    const nlohmann::json j = report::to_json(rep);
    const report::Report back = report::from_json(j);
    REQUIRE(report::to_json(back).dump(2) == j.dump(2));
}

TEST_CASE("identical analyses serialize byte-identically", "[report]") {
    const std::string a = report::to_json(sample_report()).dump(2);
    const std::string b = report::to_json(sample_report()).dump(2);
    REQUIRE(a == b);
}

TEST_CASE("every number in the text rendering appears in the JSON body", "[report]") {
    report::Report rep = sample_report();
    rep.timing_ms["analysis"] = 1.25;
    rep.timing_ms["total"] = 2.5;
    const std::string text = report::render_text(rep);
    const std::string body = report::to_json(rep).dump();

    // pull numerals out of the text and look them up in the JSON string
    std::size_t i = 0;
    while (i < text.size()) {
        if (std::isdigit(static_cast<unsigned char>(text[i]))) {
            std::size_t j = i;
            while (j < text.size() &&
                   (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.' ||
                    text[j] == 'e' || text[j] == '-' || text[j] == '+'))
                ++j;
            const std::string numeral = text.substr(i, j - i);
            INFO("numeral " << numeral << " from text:\n" << text);
            const std::string trimmed =
                numeral.back() == '.' || numeral.back() == '-' || numeral.back() == '+'
                    ? numeral.substr(0, numeral.size() - 1)
                    : numeral;
            REQUIRE(body.find(trimmed) != std::string::npos);
            i = j;
        } else {
            ++i;
        }
    }
}

TEST_CASE("mixed reports serialize the stage data", "[report]") {
    const DensityMatrix rho = tensor_product(
        tensor_product(density_from_pure(testutil::basis_qubits({0})),
                       testutil::maximally_mixed({2})),
        density_from_pure(testutil::bell()));
    report::Report rep;
    rep.input.kind = "mixed";
    rep.input.file = "mixed_example.json";
    rep.input.dims = rho.dims().dims();
    rep.input.n = rho.site_count();
    rep.input.total_dim = rho.dim();
    MixedAnalysis analysis = np_mixed(rho);
    rep.verdict = to_string(analysis.verdict);
    rep.mixed = std::move(analysis);

    const nlohmann::json j = report::to_json(rep);
    REQUIRE(j.at("mixed").at("n_p") == 3);
    REQUIRE(j.at("mixed").at("gamma_max")[2].is_null());
    const report::Report back = report::from_json(j);
    REQUIRE(report::to_json(back).dump() == j.dump());
    REQUIRE_FALSE(report::render_text(rep).empty());
}
