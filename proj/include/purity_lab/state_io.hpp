#pragma once

#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "purity_lab/ket.hpp"
#include "purity_lab/state.hpp"
#include "purity_lab/validate.hpp"

// JSON state files:
//   pure:    {"dims": [d_1, ..., d_n], "amplitudes": [[re, im], ...]}
//   density: {"dims": [d_1, ..., d_n], "matrix": [[[re, im], ...], ...]}
// Basis ordering is mixed-radix with site 0 as the most significant digit.

namespace purity_lab::io {

using nlohmann::json;

struct LoadedState {
    std::variant<PureState, DensityMatrix> state;
    std::vector<std::string> warnings;

    bool is_density() const { return std::holds_alternative<DensityMatrix>(state); }
    const PureState& pure() const { return std::get<PureState>(state); }
    const DensityMatrix& density() const { return std::get<DensityMatrix>(state); }
};

namespace detail {

inline cplx parse_complex(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ValidationError(what + " must be a [re, im] pair");
    return cplx{j[0].get<double>(), j[1].get<double>()};
}

inline LocalDims parse_dims(const json& j, std::size_t max_dim) {
    if (!j.contains("dims") || !j["dims"].is_array() || j["dims"].empty())
        throw ValidationError("state file needs a non-empty \"dims\" array");
    std::vector<int> dims;
    for (const json& d : j["dims"]) {
        if (!d.is_number_integer())
            throw ValidationError("\"dims\" entries must be integers");
        dims.push_back(d.get<int>());
    }
    return ket::detail::make_dims_capped(std::move(dims), max_dim);
}

} // namespace detail

inline LoadedState load_state_json(const json& j,
                                   NormalizePolicy policy = NormalizePolicy::Strict,
                                   std::size_t max_dim = kDefaultDimCap) {
    if (!j.is_object()) throw ValidationError("state file must be a JSON object");
    LocalDims dims = detail::parse_dims(j, max_dim);
    const std::size_t d = dims.total_dim();
    std::vector<std::string> warnings;

    if (j.contains("amplitudes")) {
        const json& amps_json = j["amplitudes"];
        if (!amps_json.is_array() || amps_json.size() != d)
            throw ValidationError("\"amplitudes\" must hold " + std::to_string(d) +
                                  " entries");
        std::vector<cplx> amps;
        amps.reserve(d);
        for (const json& a : amps_json)
            amps.push_back(detail::parse_complex(a, "amplitude"));
        PureState psi = ket::detail::normalize_pure(std::move(dims), std::move(amps), policy,
                                                    warnings, "state file");
        return LoadedState{std::move(psi), std::move(warnings)};
    }

    if (j.contains("matrix")) {
        const json& rows = j["matrix"];
        if (!rows.is_array() || rows.size() != d)
            throw ValidationError("\"matrix\" must hold " + std::to_string(d) + " rows");
        std::vector<cplx> entries;
        entries.reserve(d * d);
        for (const json& row : rows) {
            if (!row.is_array() || row.size() != d)
                throw ValidationError("every matrix row must hold " + std::to_string(d) +
                                      " entries");
            for (const json& e : row)
                entries.push_back(detail::parse_complex(e, "matrix entry"));
        }
        DensityMatrix rho(std::move(dims), std::move(entries));
        Diagnostics diag = validate(rho);
        if (diag.hermiticity_defect > kHermitianTol)
            throw ValidationError("matrix is not Hermitian: defect " +
                                  std::to_string(diag.hermiticity_defect));
        if (diag.trace_defect > kTraceTol) {
            if (policy == NormalizePolicy::Strict)
                throw ValidationError("matrix trace differs from 1 by " +
                                      std::to_string(diag.trace_defect) +
                                      "; the lenient policy rescales instead");
            const double tr = trace(rho).real();
            if (tr <= 0.0) throw ValidationError("matrix trace is not positive");
            std::vector<cplx> scaled = rho.entries();
            for (cplx& e : scaled) e /= tr;
            rho = DensityMatrix(rho.dims(), std::move(scaled));
            diag.min_eigenvalue /= tr;
            warnings.push_back("rescaled matrix trace (was off by " +
                               std::to_string(diag.trace_defect) + ")");
        }
        if (diag.min_eigenvalue < kPsdTol)
            throw ValidationError("matrix is not positive semidefinite: smallest eigenvalue " +
                                  std::to_string(diag.min_eigenvalue));
        return LoadedState{std::move(rho), std::move(warnings)};
    }

    throw ValidationError("state file needs either \"amplitudes\" or \"matrix\"");
}

inline LoadedState load_state_file(const std::string& path,
                                   NormalizePolicy policy = NormalizePolicy::Strict,
                                   std::size_t max_dim = kDefaultDimCap) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open state file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ValidationError("state file " + path + " is not valid JSON: " + e.what());
    }
    return load_state_json(j, policy, max_dim);
}

inline json state_to_json(const PureState& psi) {
    json j;
    j["dims"] = psi.dims().dims();
    json amps = json::array();
    for (const cplx& a : psi.amplitudes()) amps.push_back({a.real(), a.imag()});
    j["amplitudes"] = std::move(amps);
    return j;
}

inline json state_to_json(const DensityMatrix& rho) {
    json j;
    j["dims"] = rho.dims().dims();
    json rows = json::array();
    for (std::size_t r = 0; r < rho.dim(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < rho.dim(); ++c)
            row.push_back({rho.at(r, c).real(), rho.at(r, c).imag()});
        rows.push_back(std::move(row));
    }
    j["matrix"] = std::move(rows);
    return j;
}

} // namespace purity_lab::io
