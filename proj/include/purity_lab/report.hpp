#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "purity_lab/rate.hpp"
#include "purity_lab/separability.hpp"
#include "purity_lab/version.hpp"

// Structured analysis report. The JSON schema is versioned ("purity-lab/1")
// and evolves additively; keys are emitted in sorted order so identical
// analyses serialize byte-identically. The text rendering formats every
// numeral exactly as the JSON body does.

namespace purity_lab::report {

using nlohmann::json;

struct InputEcho {
    std::string kind; // "pure" | "mixed" (representation of the input)
    std::optional<std::string> expression;
    std::optional<std::string> file;
    std::vector<int> dims;
    int n = 0;
    std::size_t total_dim = 0;
};

struct Report {
    std::string version = kVersion;
    InputEcho input;
    double purity_tol = kPurityTol;
    int workers = 1;
    std::vector<std::string> warnings;
    std::string verdict;
    std::vector<int> witness_sites; // single sites whose reduction is not pure
    std::optional<PurityProfile> profile;
    std::optional<RateReport> rate;     // pure analysis path
    std::optional<MixedAnalysis> mixed; // mixed analysis path
    std::map<std::string, double> timing_ms;
};

namespace detail {

inline json rational_to_json(const Rational& r) {
    return json{{"num", r.num}, {"den", r.den}, {"value", r.value()}};
}

inline Rational rational_from_json(const json& j) {
    return Rational(j.at("num").get<std::int64_t>(), j.at("den").get<std::int64_t>());
}

// Format a double exactly the way the JSON body will print it.
inline std::string num(double v) { return json(v).dump(); }

} // namespace detail

inline json to_json(const Report& r) {
    json j;
    j["schema"] = kReportSchema;
    j["version"] = r.version;

    json input;
    input["kind"] = r.input.kind;
    if (r.input.expression) input["expression"] = *r.input.expression;
    if (r.input.file) input["file"] = *r.input.file;
    input["dims"] = r.input.dims;
    input["n"] = r.input.n;
    input["total_dim"] = r.input.total_dim;
    j["input"] = std::move(input);

    j["tolerances"] = json{{"purity", r.purity_tol}};
    j["workers"] = r.workers;
    j["warnings"] = r.warnings;
    j["verdict"] = r.verdict;
    if (!r.witness_sites.empty()) j["witness_sites"] = r.witness_sites;

    if (r.profile) {
        j["profile"] = json{{"gammas", r.profile->gammas},
                            {"gamma_max", r.profile->gamma_max},
                            {"tol", r.profile->tol}};
    }

    if (r.rate) {
        json factors = json::array();
        for (const Factor& f : r.rate->factorization.factors)
            factors.push_back(json{{"sites", f.sites.members()},
                                   {"size", f.sites.size()},
                                   {"entangled", f.entangled}});
        j["factorization"] = json{{"factors", std::move(factors)}};

        json per_factor = json::array();
        for (const FactorRate& fr : r.rate->per_factor) {
            json entry;
            entry["sites"] = fr.sites.members();
            entry["s"] = fr.size;
            entry["rate"] = detail::rational_to_json(fr.rate);
            entry["plausibly_maximal"] = fr.plausibly_maximal;
            per_factor.push_back(std::move(entry));
        }
        j["rate"] = json{{"per_factor", std::move(per_factor)},
                         {"e_total", detail::rational_to_json(r.rate->e_total)},
                         {"classification", to_string(r.rate->classification)},
                         {"measure_caveat", r.rate->measure_caveat}};
    }

    if (r.mixed) {
        json maxima = json::array();
        for (const auto& m : r.mixed->gamma_max_mixed) {
            if (m)
                maxima.push_back(*m);
            else
                maxima.push_back(nullptr);
        }
        json substates = json::array();
        for (const SiteSubset& s : r.mixed->pure_substates) substates.push_back(s.members());
        j["mixed"] = json{{"stage_gammas", r.mixed->stage_gammas},
                          {"gamma_max", std::move(maxima)},
                          {"n_p", r.mixed->n_p},
                          {"verdict", to_string(r.mixed->verdict)},
                          {"pure_substates", std::move(substates)}};
    }

    if (!r.timing_ms.empty()) j["timing_ms"] = r.timing_ms;
    return j;
}

inline Report from_json(const json& j) {
    Report r;
    if (j.at("schema").get<std::string>() != kReportSchema)
        throw ValidationError("unknown report schema");
    r.version = j.at("version").get<std::string>();

    const json& input = j.at("input");
    r.input.kind = input.at("kind").get<std::string>();
    if (input.contains("expression"))
        r.input.expression = input.at("expression").get<std::string>();
    if (input.contains("file")) r.input.file = input.at("file").get<std::string>();
    r.input.dims = input.at("dims").get<std::vector<int>>();
    r.input.n = input.at("n").get<int>();
    r.input.total_dim = input.at("total_dim").get<std::size_t>();

    r.purity_tol = j.at("tolerances").at("purity").get<double>();
    r.workers = j.at("workers").get<int>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.verdict = j.at("verdict").get<std::string>();
    if (j.contains("witness_sites"))
        r.witness_sites = j.at("witness_sites").get<std::vector<int>>();

    if (j.contains("profile")) {
        PurityProfile p;
        p.n = r.input.n;
        p.tol = j.at("profile").at("tol").get<double>();
        p.gammas = j.at("profile").at("gammas").get<std::vector<std::uint64_t>>();
        p.gamma_max = j.at("profile").at("gamma_max").get<std::vector<std::uint64_t>>();
        r.profile = std::move(p);
    }

    if (j.contains("rate")) {
        RateReport rate;
        for (const json& f : j.at("factorization").at("factors")) {
            Factor factor;
            factor.sites =
                SiteSubset::from_indices(f.at("sites").get<std::vector<int>>(), r.input.n);
            factor.entangled = f.at("entangled").get<bool>();
            rate.factorization.factors.push_back(factor);
        }
        for (const json& f : j.at("rate").at("per_factor")) {
            FactorRate fr;
            fr.sites =
                SiteSubset::from_indices(f.at("sites").get<std::vector<int>>(), r.input.n);
            fr.size = f.at("s").get<int>();
            fr.rate = detail::rational_from_json(f.at("rate"));
            fr.plausibly_maximal = f.at("plausibly_maximal").get<bool>();
            rate.per_factor.push_back(fr);
        }
        rate.e_total = detail::rational_from_json(j.at("rate").at("e_total"));
        const std::string cls = j.at("rate").at("classification").get<std::string>();
        rate.classification = cls == "separable"  ? RateClass::Separable
                              : cls == "maximal" ? RateClass::Maximal
                                                 : RateClass::Partial;
        rate.measure_caveat = j.at("rate").at("measure_caveat").get<bool>();
        r.rate = std::move(rate);
    }

    if (j.contains("mixed")) {
        MixedAnalysis m;
        m.n = r.input.n;
        m.stage_gammas = j.at("mixed").at("stage_gammas").get<std::vector<std::uint64_t>>();
        for (const json& g : j.at("mixed").at("gamma_max")) {
            if (g.is_null())
                m.gamma_max_mixed.push_back(std::nullopt);
            else
                m.gamma_max_mixed.push_back(g.get<std::uint64_t>());
        }
        m.n_p = j.at("mixed").at("n_p").get<int>();
        const std::string v = j.at("mixed").at("verdict").get<std::string>();
        m.verdict = v == "entanglement-detected" ? MixedVerdict::EntanglementDetected
                    : v == "necessary-condition-passed"
                        ? MixedVerdict::NecessaryConditionPassed
                        : MixedVerdict::InconclusiveNoPureSubstates;
        for (const json& s : j.at("mixed").at("pure_substates"))
            m.pure_substates.push_back(
                SiteSubset::from_indices(s.get<std::vector<int>>(), r.input.n));
        r.mixed = std::move(m);
    }

    if (j.contains("timing_ms"))
        r.timing_ms = j.at("timing_ms").get<std::map<std::string, double>>();
    return r;
}

inline std::string render_text(const Report& r) {
    std::ostringstream os;
    os << "purity-lab " << r.version << "\n";
    if (r.input.expression)
        os << "input: expression \"" << *r.input.expression << "\"\n";
    else if (r.input.file)
        os << "input: file " << *r.input.file << "\n";
    os << "kind: " << r.input.kind << ", n = " << r.input.n << ", dims = [";
    for (std::size_t i = 0; i < r.input.dims.size(); ++i)
        os << (i ? "," : "") << r.input.dims[i];
    os << "], total_dim = " << r.input.total_dim << "\n";
    os << "tolerance: purity " << detail::num(r.purity_tol) << "\n";
    os << "workers: " << r.workers << "\n";
    for (const std::string& w : r.warnings) os << "warning: " << w << "\n";

    os << "verdict: " << r.verdict;
    if (!r.witness_sites.empty()) {
        os << " (impure single-site reductions:";
        for (int s : r.witness_sites) os << " " << s;
        os << ")";
    }
    os << "\n";

    if (r.profile) {
        os << "profile:\n";
        for (int s = 1; s <= r.profile->n - 1; ++s)
            os << "  γ_" << s << " = " << r.profile->gamma_s(s) << " / "
               << r.profile->max_s(s) << "\n";
    }

    if (r.rate) {
        os << "factorization:\n";
        for (std::size_t i = 0; i < r.rate->factorization.factors.size(); ++i) {
            const Factor& f = r.rate->factorization.factors[i];
            os << "  " << f.sites.to_string() << "  size " << f.sites.size() << "  "
               << (f.entangled ? "entangled" : "singleton");
            if (f.entangled)
                os << (r.rate->per_factor[i].plausibly_maximal
                           ? "  plausibly-maximal (heuristic)"
                           : "  not-maximal (heuristic)");
            os << "\n";
        }
        os << "rate:\n";
        for (const FactorRate& fr : r.rate->per_factor) {
            if (fr.rate.num == 0) continue;
            os << "  e" << fr.sites.to_string() << " = " << fr.rate.to_string() << " ≈ "
               << detail::num(fr.rate.value()) << "\n";
        }
        os << "  e_total = " << r.rate->e_total.to_string() << " ≈ "
           << detail::num(r.rate->e_total.value())
           << "  [" << to_string(r.rate->classification) << "]";
        if (r.rate->measure_caveat)
            os << "  (caveat: some entangled factor is not plausibly maximal; the total "
                  "is a pair ratio, not a measure)";
        os << "\n";
    }

    if (r.mixed) {
        os << "mixed analysis:\n";
        for (std::size_t i = 0; i < r.mixed->stage_gammas.size(); ++i) {
            os << "  stage γ_" << (i + 1) << " = " << r.mixed->stage_gammas[i];
            if (r.mixed->gamma_max_mixed[i])
                os << " (max " << *r.mixed->gamma_max_mixed[i] << ")";
            else
                os << " (max undefined)";
            os << "\n";
        }
        os << "  n_p = " << r.mixed->n_p << "\n";
        if (!r.mixed->pure_substates.empty()) {
            os << "  pure substates:";
            for (const SiteSubset& s : r.mixed->pure_substates) os << " " << s.to_string();
            os << "\n";
        }
        os << "  verdict: " << to_string(r.mixed->verdict) << "\n";
    }

    if (!r.timing_ms.empty()) {
        os << "timing:";
        bool first = true;
        for (const auto& [stage, ms] : r.timing_ms) {
            os << (first ? " " : ", ") << stage << " " << detail::num(ms) << " ms";
            first = false;
        }
        os << "\n";
    }
    return os.str();
}

} // namespace purity_lab::report
