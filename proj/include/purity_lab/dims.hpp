#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "purity_lab/errors.hpp"
#include "purity_lab/subset.hpp"

namespace purity_lab {

// Default cap on the total Hilbert-space dimension (about 12 qubits).
// Everything downstream enumerates subsets exponentially, so states beyond
// desk scale are rejected at the boundaries rather than half-processed.
inline constexpr std::size_t kDefaultDimCap = 4096;

// Per-site local dimensions d_0..d_{n-1} with precomputed mixed-radix
// strides. Site 0 is the most significant digit: a basis index decomposes as
// index = sum_i digit_i * stride_i with stride_{n-1} = 1.
class LocalDims {
public:
    LocalDims() = default;

    explicit LocalDims(std::vector<int> dims) : dims_(std::move(dims)) {
        strides_.resize(dims_.size());
        std::size_t acc = 1;
        for (int i = static_cast<int>(dims_.size()) - 1; i >= 0; --i) {
            const int d = dims_[static_cast<std::size_t>(i)];
            if (d < 2)
                throw ValidationError("local dimension must be >= 2, got " + std::to_string(d));
            strides_[static_cast<std::size_t>(i)] = acc;
            if (acc > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(d))
                throw OverflowError("total dimension overflows");
            acc *= static_cast<std::size_t>(d);
        }
        total_dim_ = acc;
    }

    int site_count() const { return static_cast<int>(dims_.size()); }
    int dim(int site) const { return dims_[static_cast<std::size_t>(site)]; }
    const std::vector<int>& dims() const { return dims_; }
    std::size_t total_dim() const { return total_dim_; }
    std::size_t stride(int site) const { return strides_[static_cast<std::size_t>(site)]; }

    std::size_t index_of(const std::vector<int>& digits) const {
        std::size_t idx = 0;
        for (int i = 0; i < site_count(); ++i)
            idx += static_cast<std::size_t>(digits[static_cast<std::size_t>(i)]) * stride(i);
        return idx;
    }

    void digits_of(std::size_t index, std::vector<int>& out) const {
        out.resize(dims_.size());
        for (int i = 0; i < site_count(); ++i) {
            out[static_cast<std::size_t>(i)] = static_cast<int>(index / stride(i));
            index %= stride(i);
        }
    }

    LocalDims concat(const LocalDims& other) const {
        std::vector<int> d = dims_;
        d.insert(d.end(), other.dims_.begin(), other.dims_.end());
        return LocalDims(std::move(d));
    }

    // Dims of the kept sites, in ascending site order.
    LocalDims select(const SiteSubset& keep) const {
        std::vector<int> d;
        d.reserve(static_cast<std::size_t>(keep.size()));
        for (int i : keep.members()) d.push_back(dim(i));
        return LocalDims(std::move(d));
    }

    friend bool operator==(const LocalDims& a, const LocalDims& b) {
        return a.dims_ == b.dims_;
    }

private:
    std::vector<int> dims_;
    std::vector<std::size_t> strides_;
    std::size_t total_dim_ = 1;
};

inline void require_within_cap(const LocalDims& dims, std::size_t max_dim) {
    if (dims.total_dim() > max_dim) throw DimensionCapError(dims.total_dim(), max_dim);
}

namespace detail {

// Partial basis indices contributed by the sites in `sites`, enumerated in
// mixed-radix order of those sites' digits. A full index splits as
// offsets(keep)[a] + offsets(complement)[b] because strides are per-site.
inline std::vector<std::size_t> subindex_offsets(const LocalDims& dims,
                                                 const SiteSubset& sites) {
    const std::vector<int> members = sites.members();
    std::size_t count = 1;
    for (int i : members) count *= static_cast<std::size_t>(dims.dim(i));
    std::vector<std::size_t> offsets(count, 0);
    std::size_t block = count;
    for (int i : members) {
        const std::size_t d = static_cast<std::size_t>(dims.dim(i));
        const std::size_t stride = dims.stride(i);
        block /= d;
        // digit of site i cycles every `block` entries
        for (std::size_t idx = 0; idx < count; ++idx)
            offsets[idx] += ((idx / block) % d) * stride;
    }
    return offsets;
}

} // namespace detail
} // namespace purity_lab
