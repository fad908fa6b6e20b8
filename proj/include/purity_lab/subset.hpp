#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "purity_lab/errors.hpp"

namespace purity_lab {

// A set of site indices within an n-site system, stored as a bitmask.
// Bit i corresponds to site i. Complement and membership are O(1); member
// extraction is O(n). n is bounded by the mask width, far above anything
// the dimension cap admits.
class SiteSubset {
public:
    static constexpr int kMaxSites = 63;

    SiteSubset() = default;

    SiteSubset(std::uint64_t mask, int site_count)
        : mask_(mask), site_count_(site_count) {
        if (site_count < 0 || site_count > kMaxSites)
            throw ValidationError("site count out of range: " + std::to_string(site_count));
        if (site_count < kMaxSites && (mask >> site_count) != 0)
            throw ValidationError("subset contains a site index >= " + std::to_string(site_count));
    }

    static SiteSubset from_indices(const std::vector<int>& indices, int site_count) {
        std::uint64_t mask = 0;
        for (int i : indices) {
            if (i < 0 || i >= site_count)
                throw ValidationError("site index " + std::to_string(i) + " out of range [0, " +
                                      std::to_string(site_count) + ")");
            mask |= std::uint64_t{1} << i;
        }
        return SiteSubset(mask, site_count);
    }

    static SiteSubset of(std::initializer_list<int> indices, int site_count) {
        return from_indices(std::vector<int>(indices), site_count);
    }

    static SiteSubset full(int site_count) {
        std::uint64_t mask =
            site_count == 0 ? 0 : (~std::uint64_t{0} >> (64 - site_count));
        return SiteSubset(mask, site_count);
    }

    static SiteSubset empty_set(int site_count) { return SiteSubset(0, site_count); }

    std::uint64_t mask() const { return mask_; }
    int site_count() const { return site_count_; }
    int size() const { return std::popcount(mask_); }
    bool empty() const { return mask_ == 0; }

    bool contains(int site) const {
        return site >= 0 && site < site_count_ && ((mask_ >> site) & 1u);
    }
    bool contains_all(const SiteSubset& other) const {
        return (mask_ & other.mask_) == other.mask_;
    }
    bool disjoint_with(const SiteSubset& other) const { return (mask_ & other.mask_) == 0; }

    SiteSubset complement() const {
        return SiteSubset(full(site_count_).mask_ & ~mask_, site_count_);
    }
    SiteSubset united(const SiteSubset& other) const {
        return SiteSubset(mask_ | other.mask_, site_count_);
    }
    SiteSubset minus(const SiteSubset& other) const {
        return SiteSubset(mask_ & ~other.mask_, site_count_);
    }

    // Members in strictly increasing order.
    std::vector<int> members() const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(size()));
        for (std::uint64_t m = mask_; m != 0; m &= m - 1)
            out.push_back(std::countr_zero(m));
        return out;
    }

    std::string to_string() const {
        std::string s = "{";
        bool first = true;
        for (int i : members()) {
            if (!first) s += ",";
            s += std::to_string(i);
            first = false;
        }
        return s + "}";
    }

    friend bool operator==(const SiteSubset& a, const SiteSubset& b) {
        return a.mask_ == b.mask_ && a.site_count_ == b.site_count_;
    }
    friend bool operator<(const SiteSubset& a, const SiteSubset& b) {
        return a.mask_ < b.mask_;
    }

private:
    std::uint64_t mask_ = 0;
    int site_count_ = 0;
};

// Calls fn(members) for every k-element subset of `universe` (which must be
// sorted ascending), in lexicographic order of the index tuples. This order
// is part of the deterministic-selection contract of the scans built on top.
template <typename Fn>
void for_each_combination(const std::vector<int>& universe, int k, Fn&& fn) {
    const int n = static_cast<int>(universe.size());
    if (k < 0 || k > n) return;
    std::vector<int> pos(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) pos[static_cast<std::size_t>(i)] = i;
    std::vector<int> members(static_cast<std::size_t>(k));
    while (true) {
        for (int i = 0; i < k; ++i)
            members[static_cast<std::size_t>(i)] =
                universe[static_cast<std::size_t>(pos[static_cast<std::size_t>(i)])];
        fn(members);
        // advance rightmost position that can still move
        int i = k - 1;
        while (i >= 0 && pos[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++pos[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            pos[static_cast<std::size_t>(j)] = pos[static_cast<std::size_t>(j - 1)] + 1;
    }
}

inline std::vector<SiteSubset> combinations(const std::vector<int>& universe, int k,
                                            int site_count) {
    std::vector<SiteSubset> out;
    for_each_combination(universe, k, [&](const std::vector<int>& members) {
        out.push_back(SiteSubset::from_indices(members, site_count));
    });
    return out;
}

} // namespace purity_lab
