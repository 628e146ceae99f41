#ifndef UALG_CONGRUENCE_HPP
#define UALG_CONGRUENCE_HPP

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "algebra.hpp"
#include "error.hpp"

namespace ualg {

/// An equivalence relation on {0..n-1}, canonically labeled: every element
/// is labeled by the least element of its block. Compatibility with an
/// algebra is not part of the type; cg() and friends only ever produce
/// compatible partitions, and is_congruence() checks user input.
class Congruence {
public:
    Congruence() = default;

    static Congruence identity(std::size_t n) {
        Congruence c;
        c.labels_.resize(n);
        std::iota(c.labels_.begin(), c.labels_.end(), Element{0});
        return c;
    }

    static Congruence total(std::size_t n) {
        Congruence c;
        c.labels_.assign(n, 0);
        return c;
    }

    /// From an arbitrary block-id assignment (ids need not be canonical).
    static Congruence from_classes(std::span<const Element> ids) {
        std::map<Element, Element> first;
        Congruence c;
        c.labels_.resize(ids.size());
        for (std::size_t x = 0; x < ids.size(); ++x) {
            auto [it, inserted] = first.emplace(ids[x], static_cast<Element>(x));
            c.labels_[x] = it->second;
        }
        return c;
    }

    /// From a canonical labeling; throws if it is not one.
    static Congruence from_labels(std::vector<Element> labels) {
        for (std::size_t x = 0; x < labels.size(); ++x) {
            if (labels[x] > x || labels[labels[x]] != labels[x]) {
                throw ValidationError("labels are not canonical at element " + std::to_string(x));
            }
        }
        Congruence c;
        c.labels_ = std::move(labels);
        return c;
    }

    /// From a list of blocks; elements not mentioned become singletons.
    static Congruence from_blocks(std::size_t n, const std::vector<std::vector<Element>>& blocks) {
        std::vector<Element> ids(n);
        std::iota(ids.begin(), ids.end(), Element{0});
        std::vector<char> seen(n, 0);
        Element next = static_cast<Element>(n);
        for (const auto& b : blocks) {
            for (auto x : b) {
                if (x >= n) {
                    throw ValidationError("block element " + std::to_string(x) + " out of range");
                }
                if (seen[x]) {
                    throw ValidationError("element " + std::to_string(x) + " appears in two blocks");
                }
                seen[x] = 1;
                ids[x] = next;
            }
            ++next;
        }
        return from_classes(ids);
    }

    std::size_t size() const noexcept { return labels_.size(); }
    Element label(Element x) const { return labels_.at(x); }
    std::span<const Element> labels() const noexcept { return labels_; }
    bool related(Element a, Element b) const { return labels_.at(a) == labels_.at(b); }

    std::size_t block_count() const {
        std::size_t c = 0;
        for (std::size_t x = 0; x < labels_.size(); ++x) {
            c += labels_[x] == x;
        }
        return c;
    }

    bool is_identity() const { return block_count() == labels_.size(); }
    bool is_total() const { return block_count() <= 1; }

    /// Blocks in order of their least element, each sorted.
    std::vector<std::vector<Element>> blocks() const {
        std::vector<std::vector<Element>> out;
        std::vector<std::size_t> where(labels_.size());
        for (std::size_t x = 0; x < labels_.size(); ++x) {
            if (labels_[x] == x) {
                where[x] = out.size();
                out.emplace_back();
            }
            out[where[labels_[x]]].push_back(static_cast<Element>(x));
        }
        return out;
    }

    /// Refinement order: every pair related here is related in o.
    bool leq(const Congruence& o) const {
        for (std::size_t x = 0; x < labels_.size(); ++x) {
            if (o.labels_[x] != o.labels_[labels_[x]]) {
                return false;
            }
        }
        return true;
    }

    /// Spanning pairs (x, label(x)) for x not a block leader.
    std::vector<ElementPair> generating_pairs() const {
        std::vector<ElementPair> out;
        for (std::size_t x = 0; x < labels_.size(); ++x) {
            if (labels_[x] != x) {
                out.emplace_back(labels_[x], static_cast<Element>(x));
            }
        }
        return out;
    }

    std::string to_string() const {
        std::string s;
        for (const auto& b : blocks()) {
            s += '{';
            for (std::size_t i = 0; i < b.size(); ++i) {
                s += (i ? "," : "") + std::to_string(b[i]);
            }
            s += '}';
        }
        return s;
    }

    bool operator==(const Congruence&) const = default;
    auto operator<=>(const Congruence&) const = default;

private:
    std::vector<Element> labels_;
};

namespace detail {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), Element{0});
    }

    Element find(Element x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(Element a, Element b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return false;
        }
        if (rank_[a] < rank_[b]) {
            std::swap(a, b);
        }
        parent_[b] = a;
        if (rank_[a] == rank_[b]) {
            ++rank_[a];
        }
        return true;
    }

    Congruence to_congruence() {
        std::vector<Element> ids(parent_.size());
        for (std::size_t x = 0; x < ids.size(); ++x) {
            ids[x] = find(static_cast<Element>(x));
        }
        return Congruence::from_classes(ids);
    }

private:
    std::vector<Element> parent_;
    std::vector<unsigned char> rank_;
};

inline void require_size(const FiniteAlgebra& a, const Congruence& c) {
    if (c.size() != a.size()) {
        throw ValidationError("congruence size " + std::to_string(c.size()) + " does not match algebra size " +
                              std::to_string(a.size()));
    }
}

} // namespace detail

/// The congruence generated by a set of pairs. Union-find seeded with the
/// pairs; every pair that causes a merge is pushed through all unary
/// translations (one operation slot varies, the others range over A) and
/// the images are merged in turn, until nothing new merges.
inline Congruence cg(const FiniteAlgebra& a, std::span<const ElementPair> pairs) {
    const std::size_t n = a.size();
    detail::UnionFind uf(n);
    std::vector<ElementPair> work;
    for (auto [x, y] : pairs) {
        if (x >= n || y >= n) {
            throw ValidationError("pair element out of range");
        }
        if (uf.unite(x, y)) {
            work.emplace_back(x, y);
        }
    }
    std::vector<Element> left, right;
    while (!work.empty()) {
        auto [x, y] = work.back();
        work.pop_back();
        for (std::size_t op = 0; op < a.operation_count(); ++op) {
            const std::size_t k = a.arity(op);
            if (k == 0) {
                continue;
            }
            left.resize(k);
            right.resize(k);
            for (std::size_t slot = 0; slot < k; ++slot) {
                for_each_tuple<Element>(n, k - 1, [&](std::span<const Element> other) {
                    for (std::size_t p = 0, q = 0; p < k; ++p) {
                        if (p == slot) {
                            left[p] = x;
                            right[p] = y;
                        } else {
                            left[p] = right[p] = other[q++];
                        }
                    }
                    Element u = a.apply(op, std::span<const Element>(left));
                    Element v = a.apply(op, std::span<const Element>(right));
                    if (uf.unite(u, v)) {
                        work.emplace_back(u, v);
                    }
                });
            }
        }
    }
    return uf.to_congruence();
}

inline Congruence cg(const FiniteAlgebra& a, std::initializer_list<ElementPair> pairs) {
    return cg(a, std::span<const ElementPair>(pairs.begin(), pairs.size()));
}

/// Principal congruence cg(x, y).
inline Congruence principal(const FiniteAlgebra& a, Element x, Element y) {
    const ElementPair p{x, y};
    return cg(a, std::span<const ElementPair>(&p, 1));
}

/// Partition intersection; always a congruence when both arguments are.
inline Congruence meet(const Congruence& s, const Congruence& t) {
    if (s.size() != t.size()) {
        throw ValidationError("meet of congruences on different algebras");
    }
    std::map<std::pair<Element, Element>, Element> first;
    std::vector<Element> labels(s.size());
    for (std::size_t x = 0; x < s.size(); ++x) {
        auto key = std::make_pair(s.label(static_cast<Element>(x)), t.label(static_cast<Element>(x)));
        labels[x] = first.emplace(key, static_cast<Element>(x)).first->second;
    }
    return Congruence::from_labels(std::move(labels));
}

/// cg of the union of both relations.
inline Congruence join(const FiniteAlgebra& a, const Congruence& s, const Congruence& t) {
    detail::require_size(a, s);
    detail::require_size(a, t);
    auto pairs = s.generating_pairs();
    auto more = t.generating_pairs();
    pairs.insert(pairs.end(), more.begin(), more.end());
    return cg(a, pairs);
}

struct CompatibilityViolation {
    std::size_t operation = 0;
    std::size_t slot = 0;
    Element x = 0, y = 0;              // related pair placed in the slot
    std::vector<Element> arguments;    // with x in the slot
    Element result_x = 0, result_y = 0;

    std::string message(const Signature& sig) const {
        std::string s = "'" + sig[operation].name + "' slot " + std::to_string(slot) + ": " + std::to_string(x) +
                        " ~ " + std::to_string(y) + " but results " + std::to_string(result_x) + " and " +
                        std::to_string(result_y) + " are not related";
        return s;
    }
};

/// First failure of compatibility, checked on unary translations only:
/// for every spanning pair (label(x), x) and every operation slot.
inline std::optional<CompatibilityViolation> find_incompatibility(const FiniteAlgebra& a, const Congruence& c) {
    detail::require_size(a, c);
    std::optional<CompatibilityViolation> bad;
    std::vector<Element> left, right;
    for (auto [x, y] : c.generating_pairs()) {
        for (std::size_t op = 0; op < a.operation_count() && !bad; ++op) {
            const std::size_t k = a.arity(op);
            left.resize(k);
            right.resize(k);
            for (std::size_t slot = 0; slot < k && !bad; ++slot) {
                for_each_tuple<Element>(a.size(), k - 1, [&](std::span<const Element> other) {
                    if (bad) {
                        return;
                    }
                    for (std::size_t p = 0, q = 0; p < k; ++p) {
                        if (p == slot) {
                            left[p] = x;
                            right[p] = y;
                        } else {
                            left[p] = right[p] = other[q++];
                        }
                    }
                    Element u = a.apply(op, std::span<const Element>(left));
                    Element v = a.apply(op, std::span<const Element>(right));
                    if (!c.related(u, v)) {
                        bad = CompatibilityViolation{op, slot, x, y, left, u, v};
                    }
                });
            }
        }
        if (bad) {
            break;
        }
    }
    return bad;
}

inline bool is_congruence(const FiniteAlgebra& a, const Congruence& c) {
    return c.size() == a.size() && !find_incompatibility(a, c);
}

} // namespace ualg

#endif
