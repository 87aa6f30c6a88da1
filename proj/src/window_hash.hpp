#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "symdyn/words.hpp"

namespace symdyn::detail {

// Polynomial hashing modulo 2^61 - 1. Hashes only bucket windows; every
// equality decision is made by comparing symbols.
class WindowHasher {
public:
    static constexpr std::uint64_t kMod = (std::uint64_t{1} << 61) - 1;
    static constexpr std::uint64_t kBase = 0x1f3a5c7e9b2d4f61ULL % kMod;

    explicit WindowHasher(std::size_t n) : n_(n), top_(1) {
        for (std::size_t i = 0; i < n; ++i) top_ = mul(top_, kBase);
    }

    std::size_t length() const noexcept { return n_; }

    std::uint64_t hash(std::span<const Symbol> s) const {
        std::uint64_t h = 0;
        for (Symbol c : s) h = add(mul(h, kBase), c + 1);
        return h;
    }

    // out[i] = hash of s[i, i+n) for every full window.
    void all(std::span<const Symbol> s, std::vector<std::uint64_t>& out) const {
        out.clear();
        if (s.size() < n_) return;
        out.reserve(s.size() - n_ + 1);
        std::uint64_t h = hash(s.first(n_));
        out.push_back(h);
        for (std::size_t i = n_; i < s.size(); ++i) {
            h = add(mul(h, kBase), s[i] + 1);
            h = sub(h, mul(top_, s[i - n_] + 1));
            out.push_back(h);
        }
    }

    static std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
        __uint128_t p = static_cast<__uint128_t>(a) * b;
        std::uint64_t lo = static_cast<std::uint64_t>(p & kMod);
        std::uint64_t hi = static_cast<std::uint64_t>(p >> 61);
        return reduce(lo + hi);
    }
    static std::uint64_t add(std::uint64_t a, std::uint64_t b) { return reduce(a + b); }
    static std::uint64_t sub(std::uint64_t a, std::uint64_t b) { return reduce(a + kMod - b); }

private:
    static std::uint64_t reduce(std::uint64_t x) {
        x = (x & kMod) + (x >> 61);
        return x >= kMod ? x - kMod : x;
    }

    std::size_t n_;
    std::uint64_t top_;
};

// Set of distinct length-n windows; members are copied into an arena.
class DistinctWindows {
public:
    explicit DistinctWindows(std::size_t n) : n_(n) {}

    bool insert(std::span<const Symbol> window, std::uint64_t h) {
        auto& bucket = buckets_[h];
        for (std::uint32_t id : bucket) {
            const Symbol* rep = arena_.data() + static_cast<std::size_t>(id) * n_;
            if (std::equal(window.begin(), window.end(), rep)) return false;
        }
        bucket.push_back(static_cast<std::uint32_t>(count_));
        arena_.insert(arena_.end(), window.begin(), window.end());
        ++count_;
        return true;
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    // Member id of the window, or npos.
    std::size_t find(std::span<const Symbol> window, std::uint64_t h) const {
        auto it = buckets_.find(h);
        if (it == buckets_.end()) return npos;
        for (std::uint32_t id : it->second) {
            const Symbol* rep = arena_.data() + static_cast<std::size_t>(id) * n_;
            if (std::equal(window.begin(), window.end(), rep)) return id;
        }
        return npos;
    }

    bool contains(std::span<const Symbol> window, std::uint64_t h) const { return find(window, h) != npos; }

    // Member id of the window, inserting it if new.
    std::size_t intern(std::span<const Symbol> window, std::uint64_t h) {
        std::size_t id = find(window, h);
        if (id != npos) return id;
        insert(window, h);
        return count_ - 1;
    }

    std::size_t size() const noexcept { return count_; }
    std::span<const Symbol> member(std::size_t id) const {
        return {arena_.data() + id * n_, n_};
    }

private:
    std::size_t n_;
    std::size_t count_ = 0;
    std::vector<Symbol> arena_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
};

}  // namespace symdyn::detail
