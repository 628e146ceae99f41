#ifndef UALG_TUPLES_HPP
#define UALG_TUPLES_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace ualg {

/// n^k, or nullopt on overflow of 64 bits.
inline std::optional<std::uint64_t> checked_power(std::uint64_t n, std::size_t k) {
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < k; ++i) {
        if (n != 0 && r > std::numeric_limits<std::uint64_t>::max() / n) {
            return std::nullopt;
        }
        r *= n;
    }
    return r;
}

/// Calls f(tuple) for every tuple in {0..n-1}^k in lexicographic order
/// (first coordinate most significant, matching the table layout).
template <class T, class F>
void for_each_tuple(std::size_t n, std::size_t k, F&& f) {
    std::vector<T> t(k, T{0});
    if (k == 0) {
        f(std::span<const T>(t));
        return;
    }
    if (n == 0) {
        return;
    }
    for (;;) {
        f(std::span<const T>(t));
        std::size_t pos = k;
        while (pos > 0) {
            --pos;
            if (static_cast<std::size_t>(++t[pos]) < n) {
                break;
            }
            t[pos] = T{0};
            if (pos == 0) {
                return;
            }
        }
    }
}

/// Calls f(tuple) for every k-tuple over {0..i} that contains i at least
/// once. Over i = 0, 1, 2, ... this visits every tuple exactly once, which
/// is what semi-naive closure needs.
template <class F>
void for_each_tuple_with_max(std::size_t i, std::size_t k, F&& f) {
    std::vector<std::size_t> t(k);
    for (std::size_t first = 0; first < k; ++first) {
        // positions < first range over [0, i), position first is i,
        // positions > first range over [0, i].
        for (std::size_t p = 0; p < k; ++p) {
            t[p] = (p == first) ? i : 0;
        }
        if (first > 0 && i == 0) {
            continue;
        }
        for (;;) {
            f(std::span<const std::size_t>(t));
            std::size_t pos = k;
            bool done = true;
            while (pos > 0) {
                --pos;
                if (pos == first) {
                    continue;
                }
                std::size_t bound = pos < first ? i : i + 1;
                if (++t[pos] < bound) {
                    done = false;
                    break;
                }
                t[pos] = 0;
            }
            if (done) {
                break;
            }
        }
    }
}

} // namespace ualg

#endif
