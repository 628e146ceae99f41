#ifndef UALG_POWERSET_HPP
#define UALG_POWERSET_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace ualg {

/// A subset of {0..61} as a bitmask.
using Subset = std::uint64_t;

inline constexpr std::size_t max_ground_size = 62;

inline Subset full_subset(std::size_t n) { return n == 0 ? 0 : (~Subset{0} >> (64 - n)); }

inline Subset subset_of(std::initializer_list<std::size_t> elems) {
    Subset s = 0;
    for (auto e : elems) {
        s |= Subset{1} << e;
    }
    return s;
}

inline std::string subset_to_string(Subset s) {
    std::string out = "{";
    bool first = true;
    for (std::size_t i = 0; i < 64; ++i) {
        if (s >> i & 1) {
            out += (first ? "" : ",") + std::to_string(i);
            first = false;
        }
    }
    return out + "}";
}

/// The Boolean join-semilattice P(n) of all subsets of {0..n-1}.
class PowersetSemilattice {
public:
    explicit PowersetSemilattice(std::size_t ground) : ground_(ground) {
        if (ground > max_ground_size) {
            throw ValidationError("ground set too large");
        }
    }
    std::size_t ground() const noexcept { return ground_; }
    std::uint64_t element_count() const noexcept { return std::uint64_t{1} << ground_; }
    Subset bottom() const noexcept { return 0; }
    Subset top() const noexcept { return full_subset(ground_); }
    Subset join(Subset a, Subset b) const noexcept { return a | b; }
    bool contains(Subset s) const noexcept { return (s & ~top()) == 0; }
    bool operator==(const PowersetSemilattice&) const = default;

private:
    std::size_t ground_;
};

/// A join- and 0-preserving map P(m) -> P(n), determined by the images of
/// the atoms {i}: h(X) is the union of the images of the atoms in X.
class SemilatticeMap {
public:
    SemilatticeMap(std::size_t source_ground, std::size_t target_ground, std::vector<Subset> atom_images)
        : source_(source_ground), target_(target_ground), atoms_(std::move(atom_images)) {
        if (source_ground > max_ground_size || target_ground > max_ground_size) {
            throw ValidationError("ground set too large");
        }
        if (atoms_.size() != source_ground) {
            throw ValidationError("expected " + std::to_string(source_ground) + " atom images, got " +
                                  std::to_string(atoms_.size()));
        }
        const Subset full = full_subset(target_ground);
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            if ((atoms_[i] & ~full) != 0) {
                throw ValidationError("atom image " + std::to_string(i) + " is not a subset of the target ground set");
            }
        }
        compute_flags();
    }

    static SemilatticeMap identity(std::size_t n) {
        std::vector<Subset> a(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = Subset{1} << i;
        }
        return SemilatticeMap(n, n, std::move(a));
    }

    std::size_t source_ground() const noexcept { return source_; }
    std::size_t target_ground() const noexcept { return target_; }
    const std::vector<Subset>& atom_images() const noexcept { return atoms_; }

    Subset operator()(Subset x) const {
        Subset out = 0;
        for (std::size_t i = 0; i < source_; ++i) {
            if (x >> i & 1) {
                out |= atoms_[i];
            }
        }
        return out;
    }

    /// h(1) = 1.
    bool unit_preserving() const noexcept { return unit_preserving_; }
    /// Injective: every atom has a point no other atom image covers.
    bool embedding() const noexcept { return embedding_; }
    /// h(X ∩ Y) = h(X) ∩ h(Y): atom images pairwise disjoint.
    bool meet_preserving() const noexcept { return meet_preserving_; }

    bool operator==(const SemilatticeMap& o) const {
        return source_ == o.source_ && target_ == o.target_ && atoms_ == o.atoms_;
    }

    std::string to_string() const {
        std::string s;
        for (std::size_t i = 0; i < source_; ++i) {
            s += (i ? ", " : "") + subset_to_string(Subset{1} << i) + " -> " + subset_to_string(atoms_[i]);
        }
        return s;
    }

private:
    void compute_flags() {
        unit_preserving_ = (*this)(full_subset(source_)) == full_subset(target_);
        embedding_ = true;
        meet_preserving_ = true;
        for (std::size_t i = 0; i < source_; ++i) {
            Subset others = 0;
            for (std::size_t j = 0; j < source_; ++j) {
                if (j != i) {
                    others |= atoms_[j];
                    if ((atoms_[i] & atoms_[j]) != 0) {
                        meet_preserving_ = false;
                    }
                }
            }
            if ((atoms_[i] & ~others) == 0) {
                embedding_ = false;
            }
        }
    }

    std::size_t source_, target_;
    std::vector<Subset> atoms_;
    bool unit_preserving_ = false, embedding_ = false, meet_preserving_ = false;
};

inline SemilatticeMap atom_map(std::size_t m, std::size_t n, std::vector<Subset> images) {
    return SemilatticeMap(m, n, std::move(images));
}

/// h2 after h1, atom by atom.
inline SemilatticeMap compose(const SemilatticeMap& h2, const SemilatticeMap& h1) {
    if (h1.target_ground() != h2.source_ground()) {
        throw ValidationError("composition of non-matching semilattice maps");
    }
    std::vector<Subset> a(h1.source_ground());
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = h2(h1.atom_images()[i]);
    }
    return SemilatticeMap(h1.source_ground(), h2.target_ground(), std::move(a));
}

inline constexpr std::size_t default_path_cap = 10000;

/// A diagram of powerset semilattices indexed by a finite poset. The poset
/// is given by its covering pairs; each cover carries one arrow. Element
/// indices must list the poset in a linear extension (every cover goes
/// from a smaller to a larger index).
class PosetDiagram {
public:
    struct Arrow {
        std::size_t source = 0, target = 0;
        SemilatticeMap map;
    };

    PosetDiagram(std::vector<std::string> names, std::vector<std::size_t> grounds, std::vector<Arrow> arrows)
        : names_(std::move(names)), grounds_(std::move(grounds)), arrows_(std::move(arrows)) {
        const std::size_t v = names_.size();
        if (grounds_.size() != v) {
            throw ValidationError("one ground size per vertex expected");
        }
        leq_.assign(v * v, 0);
        for (std::size_t i = 0; i < v; ++i) {
            leq_[i * v + i] = 1;
        }
        for (std::size_t k = 0; k < arrows_.size(); ++k) {
            const auto& a = arrows_[k];
            if (a.source >= v || a.target >= v || a.source >= a.target) {
                throw ValidationError("arrow " + std::to_string(k) + " must go from a lower to a higher vertex index");
            }
            if (a.map.source_ground() != grounds_[a.source] || a.map.target_ground() != grounds_[a.target]) {
                throw ValidationError("arrow " + std::to_string(k) + " does not match its vertex semilattices");
            }
            for (std::size_t j = 0; j < k; ++j) {
                if (arrows_[j].source == a.source && arrows_[j].target == a.target) {
                    throw ValidationError("duplicate arrow " + names_[a.source] + " -> " + names_[a.target]);
                }
            }
            leq_[a.source * v + a.target] = 1;
        }
        for (std::size_t k = 0; k < v; ++k) {
            for (std::size_t i = 0; i < v; ++i) {
                for (std::size_t j = 0; j < v; ++j) {
                    if (leq_[i * v + k] && leq_[k * v + j]) {
                        leq_[i * v + j] = 1;
                    }
                }
            }
        }
        for (const auto& a : arrows_) {
            for (std::size_t k = 0; k < v; ++k) {
                if (k != a.source && k != a.target && leq(a.source, k) && leq(k, a.target)) {
                    throw ValidationError("arrow " + names_[a.source] + " -> " + names_[a.target] + " is not a cover");
                }
            }
        }
    }

    std::size_t vertex_count() const noexcept { return names_.size(); }
    std::size_t arrow_count() const noexcept { return arrows_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::string& name(std::size_t v) const { return names_.at(v); }
    std::size_t ground(std::size_t v) const { return grounds_.at(v); }
    const std::vector<std::size_t>& grounds() const noexcept { return grounds_; }
    const std::vector<Arrow>& arrows() const noexcept { return arrows_; }
    const Arrow& arrow(std::size_t k) const { return arrows_.at(k); }
    bool leq(std::size_t i, std::size_t j) const { return leq_[i * vertex_count() + j] != 0; }

    std::optional<std::size_t> find(const std::string& name) const {
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (names_[i] == name) {
                return i;
            }
        }
        return std::nullopt;
    }

    /// Greatest element, if the poset has one.
    std::optional<std::size_t> top() const {
        for (std::size_t t = 0; t < vertex_count(); ++t) {
            bool greatest = true;
            for (std::size_t i = 0; i < vertex_count() && greatest; ++i) {
                greatest = leq(i, t);
            }
            if (greatest) {
                return t;
            }
        }
        return std::nullopt;
    }

    std::vector<std::size_t> incoming(std::size_t v) const {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < arrows_.size(); ++k) {
            if (arrows_[k].target == v) {
                out.push_back(k);
            }
        }
        return out;
    }

    /// All directed cover paths from s to t, as arrow-index sequences.
    /// Throws CapExceeded past `cap` paths.
    std::vector<std::vector<std::size_t>> paths(std::size_t s, std::size_t t, std::size_t cap = default_path_cap) const {
        std::vector<std::vector<std::size_t>> out;
        std::vector<std::size_t> cur;
        auto dfs = [&](auto&& self, std::size_t v) -> void {
            if (v == t) {
                out.push_back(cur);
                if (out.size() > cap) {
                    throw CapExceeded("too many paths " + names_[s] + " -> " + names_[t], cap);
                }
                return;
            }
            for (std::size_t k = 0; k < arrows_.size(); ++k) {
                if (arrows_[k].source == v && leq(arrows_[k].target, t)) {
                    cur.push_back(k);
                    self(self, arrows_[k].target);
                    cur.pop_back();
                }
            }
        };
        if (leq(s, t)) {
            dfs(dfs, s);
        }
        return out;
    }

    /// Composite along one path (identity on an empty path).
    SemilatticeMap composite(std::span<const std::size_t> path, std::size_t s) const {
        SemilatticeMap h = SemilatticeMap::identity(grounds_.at(s));
        for (auto k : path) {
            h = compose(arrows_[k].map, h);
        }
        return h;
    }

    /// Returns a copy with arrow k's map replaced.
    PosetDiagram with_arrow_map(std::size_t k, SemilatticeMap m) const {
        auto arrows = arrows_;
        arrows.at(k).map = std::move(m);
        return PosetDiagram(names_, grounds_, std::move(arrows));
    }

private:
    std::vector<std::string> names_;
    std::vector<std::size_t> grounds_;
    std::vector<Arrow> arrows_;
    std::vector<char> leq_;
};

struct FunctorialityFailure {
    std::size_t source = 0, target = 0;
    std::vector<std::size_t> path_a, path_b;
    SemilatticeMap composite_a, composite_b;
};

struct FunctorialityReport {
    bool holds = true;
    std::size_t pairs_checked = 0;
    std::size_t paths_checked = 0;
    std::vector<FunctorialityFailure> failures;
};

/// For every comparable pair, composes every cover path and compares
/// against the first one.
inline FunctorialityReport verify_functorial(const PosetDiagram& d, std::size_t path_cap = default_path_cap) {
    FunctorialityReport r;
    for (std::size_t s = 0; s < d.vertex_count(); ++s) {
        for (std::size_t t = 0; t < d.vertex_count(); ++t) {
            if (s == t || !d.leq(s, t)) {
                continue;
            }
            ++r.pairs_checked;
            auto ps = d.paths(s, t, path_cap);
            r.paths_checked += ps.size();
            const auto first = d.composite(ps.front(), s);
            for (std::size_t i = 1; i < ps.size(); ++i) {
                auto other = d.composite(ps[i], s);
                if (!(other == first)) {
                    r.holds = false;
                    r.failures.push_back({s, t, ps.front(), ps[i], first, other});
                }
            }
        }
    }
    return r;
}

/// The arrows e, f_i and u_i as atom tables.
namespace bowtie_maps {
inline SemilatticeMap e() { return atom_map(1, 2, {subset_of({0, 1})}); }
inline SemilatticeMap f(std::size_t i) {
    static const std::array<std::array<Subset, 2>, 3> t{{
        {subset_of({0, 1}), subset_of({0, 2})},
        {subset_of({0, 1}), subset_of({1, 2})},
        {subset_of({0, 2}), subset_of({1, 2})},
    }};
    return atom_map(2, 3, {t.at(i)[0], t.at(i)[1]});
}
inline SemilatticeMap u(std::size_t i) {
    static const std::array<std::array<Subset, 3>, 3> t{{
        {subset_of({0}), subset_of({1, 3}), subset_of({2, 3})},
        {subset_of({0, 3}), subset_of({1}), subset_of({2, 3})},
        {subset_of({0, 3}), subset_of({1, 3}), subset_of({2})},
    }};
    return atom_map(3, 4, {t.at(i)[0], t.at(i)[1], t.at(i)[2]});
}
} // namespace bowtie_maps

/// The bow-tie diagram: vertices A < A0, A1, A2 < B0, B1, B2 < B with every
/// Ai below every Bj, semilattices P(1), P(2)^3, P(3)^3, P(4); arrows
/// A -> Ai is e, Ai -> Bj is f_i, Bj -> B is u_j.
inline PosetDiagram build_bowtie() {
    std::vector<std::string> names{"A", "A0", "A1", "A2", "B0", "B1", "B2", "B"};
    std::vector<std::size_t> grounds{1, 2, 2, 2, 3, 3, 3, 4};
    std::vector<PosetDiagram::Arrow> arrows;
    for (std::size_t i = 0; i < 3; ++i) {
        arrows.push_back({0, 1 + i, bowtie_maps::e()});
    }
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            arrows.push_back({1 + i, 4 + j, bowtie_maps::f(i)});
        }
    }
    for (std::size_t j = 0; j < 3; ++j) {
        arrows.push_back({4 + j, 7, bowtie_maps::u(j)});
    }
    return PosetDiagram(std::move(names), std::move(grounds), std::move(arrows));
}

/// The five-element copy of M3 inside P(3): {∅, {0,1}, {0,2}, {1,2}, {0,1,2}}.
inline std::vector<Subset> m3_subsets() {
    return {0, subset_of({0, 1}), subset_of({0, 2}), subset_of({1, 2}), subset_of({0, 1, 2})};
}

struct ImageIntersection {
    /// im u0 ∩ im u1 ∩ im u2, ascending.
    std::vector<Subset> common_image;
    /// {X : u0(X) = u1(X) = u2(X)}, ascending.
    std::vector<Subset> agreement;
    bool agreement_is_m3 = false;
    /// common_image, ordered by inclusion, is a lattice isomorphic to M3.
    bool common_image_is_m3 = false;
    /// common_image[k] = u0(agreement[k]) when the two have the same size.
    std::vector<std::pair<Subset, Subset>> correspondence;

    bool verdict() const { return agreement_is_m3 && common_image_is_m3; }
};

/// Five subsets closed under union, with a least and a greatest one and the
/// three others pairwise incomparable with pairwise unions equal to the
/// greatest and no common lower bound in the set but the least.
inline bool is_m3_under_inclusion(const std::vector<Subset>& s) {
    if (s.size() != 5) {
        return false;
    }
    for (auto a : s) {
        for (auto b : s) {
            if (std::find(s.begin(), s.end(), a | b) == s.end()) {
                return false;
            }
        }
    }
    Subset lo = s[0], hi = s[0];
    for (auto x : s) {
        lo &= x;
        hi |= x;
    }
    if (std::find(s.begin(), s.end(), lo) == s.end() || std::find(s.begin(), s.end(), hi) == s.end()) {
        return false;
    }
    std::vector<Subset> mid;
    for (auto x : s) {
        if (x != lo && x != hi) {
            mid.push_back(x);
        }
    }
    if (mid.size() != 3) {
        return false;
    }
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i + 1; j < 3; ++j) {
            Subset a = mid[i], b = mid[j];
            if ((a & b) == a || (a & b) == b || (a | b) != hi) {
                return false;
            }
            for (auto x : s) {
                if ((x & a) == x && (x & b) == x && x != lo) {
                    return false;
                }
            }
        }
    }
    return true;
}

inline ImageIntersection image_intersection_m3(const SemilatticeMap& u0, const SemilatticeMap& u1,
                                               const SemilatticeMap& u2) {
    const std::size_t m = u0.source_ground();
    if (u1.source_ground() != m || u2.source_ground() != m || u1.target_ground() != u0.target_ground() ||
        u2.target_ground() != u0.target_ground() || m > 20) {
        throw ValidationError("image intersection needs three maps P(m) -> P(n) of the same shape");
    }
    std::vector<Subset> im0, im1, im2;
    ImageIntersection r;
    for (Subset x = 0; x < (Subset{1} << m); ++x) {
        im0.push_back(u0(x));
        im1.push_back(u1(x));
        im2.push_back(u2(x));
        if (u0(x) == u1(x) && u1(x) == u2(x)) {
            r.agreement.push_back(x);
        }
    }
    for (auto* v : {&im0, &im1, &im2}) {
        std::sort(v->begin(), v->end());
        v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    std::vector<Subset> tmp;
    std::set_intersection(im0.begin(), im0.end(), im1.begin(), im1.end(), std::back_inserter(tmp));
    std::set_intersection(tmp.begin(), tmp.end(), im2.begin(), im2.end(), std::back_inserter(r.common_image));
    auto m3 = m3_subsets();
    std::sort(m3.begin(), m3.end());
    r.agreement_is_m3 = m == 3 && r.agreement == m3;
    r.common_image_is_m3 = is_m3_under_inclusion(r.common_image);
    if (r.agreement.size() == r.common_image.size()) {
        for (auto x : r.agreement) {
            r.correspondence.emplace_back(x, u0(x));
        }
    }
    return r;
}

} // namespace ualg

#endif
