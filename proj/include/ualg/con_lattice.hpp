#ifndef UALG_CON_LATTICE_HPP
#define UALG_CON_LATTICE_HPP

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "algebra.hpp"
#include "congruence.hpp"
#include "error.hpp"
#include "homomorphism.hpp"
#include "lattice.hpp"

namespace ualg {

inline constexpr std::size_t default_con_cap = 4096;

struct ConLatticeOptions {
    /// Refuse (CapExceeded) once more congruences than this are found.
    std::size_t cap = default_con_cap;
    /// Worker threads for the principal-congruence phase. Results do not
    /// depend on this.
    unsigned jobs = 1;
};

namespace detail {
struct LabelHash {
    std::size_t operator()(const Congruence& c) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (auto x : c.labels()) {
            h = (h ^ x) * 1099511628211ull;
        }
        return h;
    }
};
} // namespace detail

/// All congruences of a finite algebra, sorted by decreasing block count
/// and then by labeling, so index 0 is the identity congruence and the
/// last index the total one.
class ConLattice {
public:
    const FiniteAlgebra& algebra() const noexcept { return algebra_; }
    std::size_t size() const noexcept { return elements_.size(); }
    const Congruence& operator[](std::size_t i) const { return elements_.at(i); }
    const std::vector<Congruence>& elements() const noexcept { return elements_; }
    std::size_t bottom() const noexcept { return 0; }
    std::size_t top() const noexcept { return elements_.size() - 1; }
    bool leq(std::size_t i, std::size_t j) const { return leq_[i * size() + j] != 0; }

    std::optional<std::size_t> index_of(const Congruence& c) const {
        auto it = index_.find(c);
        if (it == index_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    std::size_t at(const Congruence& c) const {
        auto i = index_of(c);
        if (!i) {
            throw ValidationError("not a congruence of this algebra: " + c.to_string());
        }
        return *i;
    }

    std::size_t join(std::size_t i, std::size_t j) const { return at(ualg::join(algebra_, elements_[i], elements_[j])); }
    std::size_t meet(std::size_t i, std::size_t j) const { return at(ualg::meet(elements_[i], elements_[j])); }

    std::vector<std::pair<std::size_t, std::size_t>> covers() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        const std::size_t m = size();
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (i == j || !leq(i, j)) {
                    continue;
                }
                bool cover = true;
                for (std::size_t k = 0; k < m && cover; ++k) {
                    cover = k == i || k == j || !(leq(i, k) && leq(k, j));
                }
                if (cover) {
                    out.emplace_back(i, j);
                }
            }
        }
        return out;
    }

    /// The abstract lattice (indices shared with this object).
    FiniteLattice lattice() const { return FiniteLattice::from_order(size(), leq_); }

private:
    friend ConLattice con_lattice(const FiniteAlgebra&, ConLatticeOptions);
    explicit ConLattice(FiniteAlgebra a) : algebra_(std::move(a)) {}

    FiniteAlgebra algebra_;
    std::vector<Congruence> elements_;
    std::unordered_map<Congruence, std::size_t, detail::LabelHash> index_;
    std::vector<char> leq_;
};

/// Computes Con A: principal congruences cg(a, b) for a < b, closed under
/// joins with principals (every congruence of a finite algebra is a join
/// of principal ones).
inline ConLattice con_lattice(const FiniteAlgebra& a, ConLatticeOptions opts = {}) {
    const std::size_t n = a.size();
    std::vector<ElementPair> pairs;
    for (Element x = 0; x < n; ++x) {
        for (Element y = x + 1; y < n; ++y) {
            pairs.emplace_back(x, y);
        }
    }
    std::vector<Congruence> principals(pairs.size());
    const unsigned jobs = std::max(1u, std::min<unsigned>(opts.jobs, static_cast<unsigned>(pairs.size())));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            principals[i] = principal(a, pairs[i].first, pairs[i].second);
        }
    } else {
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < jobs; ++w) {
            workers.emplace_back([&, w] {
                for (std::size_t i = w; i < pairs.size(); i += jobs) {
                    principals[i] = principal(a, pairs[i].first, pairs[i].second);
                }
            });
        }
    }

    std::unordered_map<Congruence, std::size_t, detail::LabelHash> seen;
    std::vector<Congruence> found;
    auto add = [&](Congruence c) {
        if (seen.emplace(c, found.size()).second) {
            found.push_back(std::move(c));
            if (found.size() > opts.cap) {
                throw CapExceeded("congruence lattice too large", opts.cap);
            }
        }
    };
    add(Congruence::identity(n));
    std::vector<Congruence> distinct_principals;
    for (auto& p : principals) {
        if (!seen.count(p)) {
            distinct_principals.push_back(p);
        }
        add(p);
    }
    for (std::size_t i = 0; i < found.size(); ++i) {
        for (const auto& p : distinct_principals) {
            if (p.leq(found[i])) {
                continue;
            }
            add(join(a, found[i], p));
        }
    }

    std::sort(found.begin(), found.end(), [](const Congruence& x, const Congruence& y) {
        auto bx = x.block_count(), by = y.block_count();
        if (bx != by) {
            return bx > by;
        }
        return x < y;
    });
    ConLattice l(a);
    const std::size_t m = found.size();
    l.leq_.assign(m * m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        l.index_.emplace(found[i], i);
        for (std::size_t j = 0; j < m; ++j) {
            l.leq_[i * m + j] = found[i].leq(found[j]);
        }
    }
    l.elements_ = std::move(found);
    return l;
}

/// Con f applied to one congruence: the congruence of the codomain
/// generated by all pairs (f(x), f(y)) with x α y.
inline Congruence image_congruence(const Homomorphism& f, const Congruence& alpha) {
    detail::require_size(f.domain(), alpha);
    std::vector<ElementPair> pairs;
    for (auto [x, y] : alpha.generating_pairs()) {
        pairs.emplace_back(f(x), f(y));
    }
    return cg(f.codomain(), pairs);
}

/// Con f as a table between two congruence lattices.
class ConMap {
public:
    const ConLattice& source() const noexcept { return *source_; }
    const ConLattice& target() const noexcept { return *target_; }
    std::shared_ptr<const ConLattice> source_ptr() const noexcept { return source_; }
    std::shared_ptr<const ConLattice> target_ptr() const noexcept { return target_; }
    std::size_t operator()(std::size_t i) const { return image_.at(i); }
    const std::vector<std::size_t>& table() const noexcept { return image_; }

    bool operator==(const ConMap& o) const { return image_ == o.image_; }

    /// Checks 0 preservation and binary joins on every pair.
    bool preserves_joins() const {
        if (image_[source_->bottom()] != target_->bottom()) {
            return false;
        }
        for (std::size_t i = 0; i < image_.size(); ++i) {
            for (std::size_t j = i + 1; j < image_.size(); ++j) {
                if (image_[source_->join(i, j)] != target_->join(image_[i], image_[j])) {
                    return false;
                }
            }
        }
        return true;
    }

    static ConMap identity(std::shared_ptr<const ConLattice> l) {
        std::vector<std::size_t> t(l->size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            t[i] = i;
        }
        return ConMap(l, l, std::move(t));
    }

private:
    friend ConMap con_functor(const Homomorphism&, std::shared_ptr<const ConLattice>, std::shared_ptr<const ConLattice>);
    friend ConMap compose(const ConMap&, const ConMap&);

    ConMap(std::shared_ptr<const ConLattice> s, std::shared_ptr<const ConLattice> t, std::vector<std::size_t> image)
        : source_(std::move(s)), target_(std::move(t)), image_(std::move(image)) {}

    std::shared_ptr<const ConLattice> source_, target_;
    std::vector<std::size_t> image_;
};

/// Con f over precomputed lattices of f's domain and codomain. The result
/// is checked to preserve 0 and joins; a failure is a library bug.
inline ConMap con_functor(const Homomorphism& f, std::shared_ptr<const ConLattice> src,
                          std::shared_ptr<const ConLattice> dst) {
    if (!(src->algebra() == f.domain()) || !(dst->algebra() == f.codomain())) {
        throw ValidationError("congruence lattices do not belong to the homomorphism's algebras");
    }
    std::vector<std::size_t> image(src->size());
    for (std::size_t i = 0; i < image.size(); ++i) {
        image[i] = dst->at(image_congruence(f, (*src)[i]));
    }
    ConMap m(std::move(src), std::move(dst), std::move(image));
    if (!m.preserves_joins()) {
        throw std::logic_error("Con f does not preserve joins");
    }
    return m;
}

inline ConMap con_functor(const Homomorphism& f, ConLatticeOptions opts = {}) {
    auto src = std::make_shared<const ConLattice>(con_lattice(f.domain(), opts));
    auto dst = f.domain() == f.codomain() ? src : std::make_shared<const ConLattice>(con_lattice(f.codomain(), opts));
    return con_functor(f, std::move(src), std::move(dst));
}

/// g after f.
inline ConMap compose(const ConMap& g, const ConMap& f) {
    if (f.target_.get() != g.source_.get() && !(f.target().elements() == g.source().elements())) {
        throw ValidationError("composition of non-matching congruence maps");
    }
    std::vector<std::size_t> t(f.image_.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = g(f(i));
    }
    return ConMap(f.source_, g.target_, std::move(t));
}

} // namespace ualg

#endif
