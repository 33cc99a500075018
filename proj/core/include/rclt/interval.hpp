#ifndef RCLT_INTERVAL_HPP
#define RCLT_INTERVAL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rclt/errors.hpp"

namespace rclt {

// Contiguous index set [lo, hi] on 1..n, or (wrap=true) the wrap-around set
// [hi, n] ∪ [1, lo] on the ring. Indices are 1-based throughout.
struct IntervalSet {
    int lo = 1;
    int hi = 1;
    bool wrap = false;

    static IntervalSet range(int lo, int hi) { return IntervalSet{lo, hi, false}; }
    static IntervalSet wrapped(int lo, int hi) { return IntervalSet{lo, hi, true}; }

    int cardinality(int n) const {
        if (!wrap) return hi - lo + 1;
        return lo + (n - hi + 1);
    }

    bool contains(int i, [[maybe_unused]] int n) const {
        if (!wrap) return lo <= i && i <= hi;
        return i <= lo || i >= hi;
    }

    void validate(int n) const {
        if (!wrap) {
            if (lo < 1 || hi > n || lo > hi) throw BadIndexSet("interval out of range");
        } else {
            if (lo < 1 || hi > n || lo + 1 >= hi) throw BadIndexSet("wrap interval out of range");
        }
    }

    // Member indices in increasing order.
    std::vector<int> members(int n) const {
        validate(n);
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(cardinality(n)));
        if (!wrap) {
            for (int i = lo; i <= hi; ++i) out.push_back(i);
        } else {
            for (int i = 1; i <= lo; ++i) out.push_back(i);
            for (int i = hi; i <= n; ++i) out.push_back(i);
        }
        return out;
    }

    std::vector<int> complement(int n) const {
        validate(n);
        std::vector<int> out;
        for (int i = 1; i <= n; ++i)
            if (!contains(i, n)) out.push_back(i);
        return out;
    }

    bool subset_of(const IntervalSet& other, int n) const {
        for (int i = 1; i <= n; ++i)
            if (contains(i, n) && !other.contains(i, n)) return false;
        return true;
    }

    std::string to_string() const {
        if (!wrap) return "[" + std::to_string(lo) + "," + std::to_string(hi) + "]";
        return "[" + std::to_string(hi) + ",n]u[1," + std::to_string(lo) + "]";
    }

    bool operator==(const IntervalSet&) const = default;
};

}  // namespace rclt

#endif
