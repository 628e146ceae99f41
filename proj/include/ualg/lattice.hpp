#ifndef UALG_LATTICE_HPP
#define UALG_LATTICE_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "algebra.hpp"
#include "error.hpp"

namespace ualg {

/// A finite lattice given by its order on {0..m-1}, with join and meet
/// tables derived once.
class FiniteLattice {
public:
    FiniteLattice() : FiniteLattice(from_order(1, {1})) {}

    /// leq is row-major m*m. Throws ValidationError if the relation is not
    /// a partial order or some pair lacks a join or meet.
    static FiniteLattice from_order(std::size_t m, std::vector<char> leq) {
        if (m == 0 || leq.size() != m * m) {
            throw ValidationError("order matrix must be nonempty and square");
        }
        FiniteLattice l(Tag{});
        l.m_ = m;
        l.leq_ = std::move(leq);
        for (std::size_t i = 0; i < m; ++i) {
            if (!l.leq(i, i)) {
                throw ValidationError("order is not reflexive at " + std::to_string(i));
            }
            for (std::size_t j = 0; j < m; ++j) {
                if (i != j && l.leq(i, j) && l.leq(j, i)) {
                    throw ValidationError("order is not antisymmetric");
                }
                for (std::size_t k = 0; k < m; ++k) {
                    if (l.leq(i, j) && l.leq(j, k) && !l.leq(i, k)) {
                        throw ValidationError("order is not transitive");
                    }
                }
            }
        }
        l.join_.assign(m * m, 0);
        l.meet_.assign(m * m, 0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                auto lub = l.extremal_bound(i, j, true);
                auto glb = l.extremal_bound(i, j, false);
                if (!lub || !glb) {
                    throw ValidationError("elements " + std::to_string(i) + " and " + std::to_string(j) +
                                          " have no " + (!lub ? "join" : "meet"));
                }
                l.join_[i * m + j] = *lub;
                l.meet_[i * m + j] = *glb;
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            bool is_bottom = true, is_top = true;
            for (std::size_t j = 0; j < m; ++j) {
                is_bottom = is_bottom && l.leq(i, j);
                is_top = is_top && l.leq(j, i);
            }
            if (is_bottom) {
                l.bottom_ = i;
            }
            if (is_top) {
                l.top_ = i;
            }
        }
        return l;
    }

    /// From a lattice-as-algebra: op indices of join and meet.
    static FiniteLattice from_algebra(const FiniteAlgebra& a, std::size_t join_op = 0) {
        const std::size_t m = a.size();
        std::vector<char> leq(m * m, 0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                leq[i * m + j] = a.apply(join_op, {static_cast<Element>(i), static_cast<Element>(j)}) == j;
            }
        }
        return from_order(m, std::move(leq));
    }

    std::size_t size() const noexcept { return m_; }
    bool leq(std::size_t i, std::size_t j) const { return leq_[i * m_ + j] != 0; }
    std::size_t join(std::size_t i, std::size_t j) const { return join_[i * m_ + j]; }
    std::size_t meet(std::size_t i, std::size_t j) const { return meet_[i * m_ + j]; }
    std::size_t bottom() const noexcept { return bottom_; }
    std::size_t top() const noexcept { return top_; }

    /// Covering pairs (i, j): i < j with nothing strictly between.
    std::vector<std::pair<std::size_t, std::size_t>> covers() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < m_; ++j) {
                if (i == j || !leq(i, j)) {
                    continue;
                }
                bool cover = true;
                for (std::size_t k = 0; k < m_ && cover; ++k) {
                    cover = k == i || k == j || !(leq(i, k) && leq(k, j));
                }
                if (cover) {
                    out.emplace_back(i, j);
                }
            }
        }
        return out;
    }

    /// The lattice as an algebra with binary operations join and meet.
    FiniteAlgebra to_algebra() const {
        std::vector<Element> j(join_.begin(), join_.end()), mt(meet_.begin(), meet_.end());
        return FiniteAlgebra::create(m_, Signature{{"join", 2}, {"meet", 2}}, {std::move(j), std::move(mt)});
    }

private:
    struct Tag {};
    explicit FiniteLattice(Tag) {}

    std::optional<std::size_t> extremal_bound(std::size_t i, std::size_t j, bool upper) const {
        std::optional<std::size_t> best;
        for (std::size_t k = 0; k < m_; ++k) {
            bool bound = upper ? (leq(i, k) && leq(j, k)) : (leq(k, i) && leq(k, j));
            if (!bound) {
                continue;
            }
            if (!best || (upper ? leq(k, *best) : leq(*best, k))) {
                best = k;
            }
        }
        if (!best) {
            return std::nullopt;
        }
        for (std::size_t k = 0; k < m_; ++k) {
            bool bound = upper ? (leq(i, k) && leq(j, k)) : (leq(k, i) && leq(k, j));
            if (bound && !(upper ? leq(*best, k) : leq(k, *best))) {
                return std::nullopt;
            }
        }
        return best;
    }

    std::size_t m_ = 0;
    std::vector<char> leq_;
    std::vector<std::size_t> join_, meet_;
    std::size_t bottom_ = 0, top_ = 0;
};

namespace lattices {

inline FiniteLattice chain(std::size_t m) {
    std::vector<char> leq(m * m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            leq[i * m + j] = 1;
        }
    }
    return FiniteLattice::from_order(m, std::move(leq));
}

/// 2^k, element = bitmask, ordered by inclusion.
inline FiniteLattice boolean(std::size_t k) {
    const std::size_t m = std::size_t{1} << k;
    std::vector<char> leq(m * m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            leq[i * m + j] = (i & j) == i;
        }
    }
    return FiniteLattice::from_order(m, std::move(leq));
}

inline FiniteLattice from_covers(std::size_t m, const std::vector<std::pair<std::size_t, std::size_t>>& covers) {
    std::vector<char> leq(m * m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        leq[i * m + i] = 1;
    }
    for (auto [i, j] : covers) {
        leq[i * m + j] = 1;
    }
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (leq[i * m + k] && leq[k * m + j]) {
                    leq[i * m + j] = 1;
                }
            }
        }
    }
    return FiniteLattice::from_order(m, std::move(leq));
}

/// 0 < a, b, c < 1 numbered 0, 1, 2, 3, 4.
inline FiniteLattice m3() { return from_covers(5, {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {2, 4}, {3, 4}}); }

/// 0 < a < b < 1 and 0 < c < 1, numbered 0, a=1, b=2, c=3, 1=4.
inline FiniteLattice n5() { return from_covers(5, {{0, 1}, {1, 2}, {2, 4}, {0, 3}, {3, 4}}); }

} // namespace lattices

enum class LatticeProperty { distributive, modular, sd_join, sd_meet };

inline const char* to_string(LatticeProperty p) {
    switch (p) {
    case LatticeProperty::distributive: return "distributive";
    case LatticeProperty::modular: return "modular";
    case LatticeProperty::sd_join: return "sd_join";
    case LatticeProperty::sd_meet: return "sd_meet";
    }
    return "?";
}

struct PropertyVerdict {
    bool holds = true;
    /// First violating (x, y, z) in index order.
    std::optional<std::array<std::size_t, 3>> witness;
};

/// Exhaustive check over all triples:
///   distributive  x∧(y∨z) = (x∧y)∨(x∧z)
///   modular       x ≤ z  ⇒  x∨(y∧z) = (x∨y)∧z
///   sd_join       x∨y = x∨z  ⇒  x∨y = x∨(y∧z)
///   sd_meet       x∧y = x∧z  ⇒  x∧y = x∧(y∨z)
inline PropertyVerdict lattice_property(const FiniteLattice& l, LatticeProperty which) {
    const std::size_t m = l.size();
    for (std::size_t x = 0; x < m; ++x) {
        for (std::size_t y = 0; y < m; ++y) {
            for (std::size_t z = 0; z < m; ++z) {
                bool ok = true;
                switch (which) {
                case LatticeProperty::distributive:
                    ok = l.meet(x, l.join(y, z)) == l.join(l.meet(x, y), l.meet(x, z));
                    break;
                case LatticeProperty::modular:
                    ok = !l.leq(x, z) || l.join(x, l.meet(y, z)) == l.meet(l.join(x, y), z);
                    break;
                case LatticeProperty::sd_join:
                    ok = l.join(x, y) != l.join(x, z) || l.join(x, y) == l.join(x, l.meet(y, z));
                    break;
                case LatticeProperty::sd_meet:
                    ok = l.meet(x, y) != l.meet(x, z) || l.meet(x, y) == l.meet(x, l.join(y, z));
                    break;
                }
                if (!ok) {
                    return {false, std::array<std::size_t, 3>{x, y, z}};
                }
            }
        }
    }
    return {};
}

/// Three elements of a lattice forming a 0,1-sublattice isomorphic to M3,
/// with the six equations that were checked.
struct M3Witness {
    std::array<std::size_t, 3> atoms{};
    std::vector<std::string> checks;
};

/// Recomputes the six M3 equations (pairwise meets 0, pairwise joins 1) and
/// distinctness from 0 and 1; nullopt if any fails.
inline std::optional<M3Witness> verify_m3(const FiniteLattice& l, std::array<std::size_t, 3> t) {
    M3Witness w{t, {}};
    for (auto e : t) {
        if (e == l.bottom() || e == l.top()) {
            return std::nullopt;
        }
    }
    static constexpr std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
    for (auto [i, j] : pairs) {
        if (t[i] == t[j] || l.meet(t[i], t[j]) != l.bottom()) {
            return std::nullopt;
        }
        w.checks.push_back("meet(" + std::to_string(t[i]) + "," + std::to_string(t[j]) + ") = 0");
    }
    for (auto [i, j] : pairs) {
        if (l.join(t[i], t[j]) != l.top()) {
            return std::nullopt;
        }
        w.checks.push_back("join(" + std::to_string(t[i]) + "," + std::to_string(t[j]) + ") = 1");
    }
    return w;
}

/// First triple a < b < c (index order) of elements other than 0 and 1
/// with pairwise meets 0 and pairwise joins 1.
inline std::optional<M3Witness> find_m3_01(const FiniteLattice& l) {
    const std::size_t m = l.size();
    const std::size_t z = l.bottom(), o = l.top();
    for (std::size_t a = 0; a < m; ++a) {
        if (a == z || a == o) {
            continue;
        }
        for (std::size_t b = a + 1; b < m; ++b) {
            if (b == z || b == o || l.meet(a, b) != z || l.join(a, b) != o) {
                continue;
            }
            for (std::size_t c = b + 1; c < m; ++c) {
                if (c == z || c == o) {
                    continue;
                }
                if (l.meet(a, c) == z && l.meet(b, c) == z && l.join(a, c) == o && l.join(b, c) == o) {
                    return verify_m3(l, {a, b, c});
                }
            }
        }
    }
    return std::nullopt;
}

/// Order isomorphism by backtracking, elements matched only when their
/// down-set and up-set sizes agree.
inline bool lattices_isomorphic(const FiniteLattice& a, const FiniteLattice& b) {
    const std::size_t m = a.size();
    if (b.size() != m) {
        return false;
    }
    auto profile = [m](const FiniteLattice& l, std::size_t x) {
        std::size_t down = 0, up = 0;
        for (std::size_t y = 0; y < m; ++y) {
            down += l.leq(y, x);
            up += l.leq(x, y);
        }
        return std::make_pair(down, up);
    };
    std::vector<std::pair<std::size_t, std::size_t>> pa(m), pb(m);
    for (std::size_t x = 0; x < m; ++x) {
        pa[x] = profile(a, x);
        pb[x] = profile(b, x);
    }
    {
        auto sa = pa, sb = pb;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        if (sa != sb) {
            return false;
        }
    }
    std::vector<std::size_t> image(m);
    std::vector<char> used(m, 0);
    auto extend = [&](auto&& self, std::size_t x) -> bool {
        if (x == m) {
            return true;
        }
        for (std::size_t y = 0; y < m; ++y) {
            if (used[y] || pb[y] != pa[x]) {
                continue;
            }
            bool ok = true;
            for (std::size_t w = 0; w < x && ok; ++w) {
                ok = a.leq(w, x) == b.leq(image[w], y) && a.leq(x, w) == b.leq(y, image[w]);
            }
            if (!ok) {
                continue;
            }
            image[x] = y;
            used[y] = 1;
            if (self(self, x + 1)) {
                return true;
            }
            used[y] = 0;
        }
        return false;
    };
    return extend(extend, 0);
}

} // namespace ualg

#endif
