#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace polygas {

inline constexpr std::size_t kMaxElements = 64;

/// Finite set of indices below 64, stored as a bit mask. The tag keeps
/// polymer families and site regions from mixing.
template <class Tag>
class IndexSet {
public:
    constexpr IndexSet() = default;

    static constexpr IndexSet from_bits(std::uint64_t bits)
    {
        IndexSet s;
        s.bits_ = bits;
        return s;
    }

    static constexpr IndexSet first(std::size_t n)
    {
        return from_bits(n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1));
    }

    static constexpr IndexSet single(std::size_t i) { return from_bits(std::uint64_t{1} << i); }

    IndexSet(std::initializer_list<std::size_t> items)
    {
        for (auto i : items) {
            insert(i);
        }
    }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
    constexpr bool contains(std::size_t i) const { return (bits_ >> i) & 1u; }

    /// Smallest member; undefined on the empty set.
    constexpr std::size_t front() const { return static_cast<std::size_t>(std::countr_zero(bits_)); }

    constexpr void insert(std::size_t i) { bits_ |= std::uint64_t{1} << i; }
    constexpr void erase(std::size_t i) { bits_ &= ~(std::uint64_t{1} << i); }

    constexpr IndexSet with(std::size_t i) const { return from_bits(bits_ | (std::uint64_t{1} << i)); }
    constexpr IndexSet without(std::size_t i) const { return from_bits(bits_ & ~(std::uint64_t{1} << i)); }

    constexpr bool subset_of(IndexSet other) const { return (bits_ & ~other.bits_) == 0; }
    constexpr bool intersects(IndexSet other) const { return (bits_ & other.bits_) != 0; }

    std::vector<std::size_t> members() const
    {
        std::vector<std::size_t> out;
        out.reserve(size());
        for (auto b = bits_; b != 0; b &= b - 1) {
            out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
        }
        return out;
    }

    template <class F>
    void for_each(F&& fn) const
    {
        for (auto b = bits_; b != 0; b &= b - 1) {
            fn(static_cast<std::size_t>(std::countr_zero(b)));
        }
    }

    friend constexpr IndexSet operator|(IndexSet a, IndexSet b) { return from_bits(a.bits_ | b.bits_); }
    friend constexpr IndexSet operator&(IndexSet a, IndexSet b) { return from_bits(a.bits_ & b.bits_); }
    /// Set difference.
    friend constexpr IndexSet operator-(IndexSet a, IndexSet b) { return from_bits(a.bits_ & ~b.bits_); }
    friend constexpr bool operator==(IndexSet, IndexSet) = default;

private:
    std::uint64_t bits_ = 0;
};

struct PolymerTag;
struct SiteTag;

using PolymerSet = IndexSet<PolymerTag>;
/// A region: a finite set of ground-set sites.
using SiteSet = IndexSet<SiteTag>;

/// Maps the subsets of an ordered member list onto dense local masks
/// 0..2^m-1, bit i standing for members[i].
class LocalIndex {
public:
    LocalIndex() = default;
    explicit LocalIndex(std::vector<std::size_t> members) : members_(std::move(members)) {}

    std::size_t size() const { return members_.size(); }
    const std::vector<std::size_t>& members() const { return members_; }
    std::size_t table_size() const { return std::size_t{1} << members_.size(); }

    std::uint64_t to_global(std::uint64_t local) const
    {
        std::uint64_t out = 0;
        for (auto b = local; b != 0; b &= b - 1) {
            out |= std::uint64_t{1} << members_[static_cast<std::size_t>(std::countr_zero(b))];
        }
        return out;
    }

    /// Members of `global` outside the list are dropped.
    std::uint64_t to_local(std::uint64_t global) const
    {
        std::uint64_t out = 0;
        for (std::size_t i = 0; i < members_.size(); ++i) {
            if ((global >> members_[i]) & 1u) {
                out |= std::uint64_t{1} << i;
            }
        }
        return out;
    }

private:
    std::vector<std::size_t> members_;
};

} // namespace polygas
