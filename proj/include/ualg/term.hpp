#ifndef UALG_TERM_HPP
#define UALG_TERM_HPP

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "algebra.hpp"
#include "error.hpp"

namespace ualg {

/// A term or polynomial over a signature. Leaves are variables x0, x1, ...
/// or (for polynomials) elements of a fixed algebra. Immutable; copies
/// share subtrees.
class Term {
public:
    enum class Kind { variable, constant, operation };

    static Term variable(std::size_t index) { return Term(Node{Kind::variable, index, {}}); }
    static Term constant(Element value) { return Term(Node{Kind::constant, value, {}}); }
    static Term apply(std::size_t op, std::vector<Term> children) {
        return Term(Node{Kind::operation, op, std::move(children)});
    }

    Kind kind() const noexcept { return node_->kind; }
    /// Variable index, constant value, or operation index, depending on kind().
    std::size_t index() const noexcept { return node_->index; }
    std::span<const Term> children() const noexcept { return node_->children; }

    std::size_t depth() const {
        std::size_t d = 0;
        for (const auto& c : node_->children) {
            d = std::max(d, c.depth() + 1);
        }
        return d;
    }

    /// One more than the largest variable index, or 0 for ground terms.
    std::size_t variable_bound() const {
        if (kind() == Kind::variable) {
            return index() + 1;
        }
        std::size_t b = 0;
        for (const auto& c : node_->children) {
            b = std::max(b, c.variable_bound());
        }
        return b;
    }

    bool is_polynomial() const {
        if (kind() == Kind::constant) {
            return true;
        }
        return std::any_of(node_->children.begin(), node_->children.end(),
                           [](const Term& c) { return c.is_polynomial(); });
    }

    std::string to_string(const Signature& sig) const {
        switch (kind()) {
        case Kind::variable:
            return "x" + std::to_string(index());
        case Kind::constant:
            return "c" + std::to_string(index());
        case Kind::operation:
            break;
        }
        std::string s = sig[index()].name;
        if (node_->children.empty()) {
            return s;
        }
        s += '(';
        for (std::size_t i = 0; i < node_->children.size(); ++i) {
            if (i) {
                s += ',';
            }
            s += node_->children[i].to_string(sig);
        }
        return s + ')';
    }

    bool operator==(const Term& o) const {
        if (node_ == o.node_) {
            return true;
        }
        return kind() == o.kind() && index() == o.index() && node_->children == o.node_->children;
    }

private:
    struct Node {
        Kind kind;
        std::size_t index;
        std::vector<Term> children;
    };
    explicit Term(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}

    std::shared_ptr<const Node> node_;
};

/// Value of t in A with variable i bound to env[i].
inline Element eval_term(const FiniteAlgebra& a, const Term& t, std::span<const Element> env) {
    switch (t.kind()) {
    case Term::Kind::variable:
        if (t.index() >= env.size()) {
            throw ValidationError("variable x" + std::to_string(t.index()) + " outside environment of size " +
                                  std::to_string(env.size()));
        }
        return env[t.index()];
    case Term::Kind::constant:
        if (t.index() >= a.size()) {
            throw ValidationError("constant " + std::to_string(t.index()) + " is not an element");
        }
        return static_cast<Element>(t.index());
    case Term::Kind::operation:
        break;
    }
    if (t.index() >= a.operation_count() || t.children().size() != a.arity(t.index())) {
        throw ValidationError("term node does not match the signature");
    }
    std::vector<Element> args;
    args.reserve(t.children().size());
    for (const auto& c : t.children()) {
        args.push_back(eval_term(a, c, env));
    }
    return a.apply(t.index(), std::span<const Element>(args));
}

inline Element eval_term(const FiniteAlgebra& a, const Term& t, std::initializer_list<Element> env) {
    return eval_term(a, t, std::span<const Element>(env.begin(), env.size()));
}

/// The k-ary operation induced by t on A, as a row-major table of length n^k.
inline std::vector<Element> term_table(const FiniteAlgebra& a, const Term& t, std::size_t k) {
    std::vector<Element> out;
    for_each_tuple<Element>(a.size(), k, [&](std::span<const Element> env) { out.push_back(eval_term(a, t, env)); });
    return out;
}

struct TermEnumerationOptions {
    std::size_t arity = 0;
    std::size_t max_depth = 0;
    /// When set, terms inducing an operation already produced on this
    /// algebra are skipped.
    std::optional<FiniteAlgebra> dedup;
    /// Add one constant leaf per element of `dedup` (polynomials).
    bool element_constants = false;
};

/// Pull-based enumeration of terms by depth, then lexicographically:
/// depth 0 lists x0..x(k-1), nullary operations, then element constants;
/// depth d lists, per operation in signature order, the argument tuples
/// (in index order of earlier terms) whose deepest argument has depth d-1.
class TermEnumerator {
public:
    TermEnumerator(Signature sig, TermEnumerationOptions opts) : sig_(std::move(sig)), opts_(std::move(opts)) {
        if (opts_.element_constants && !opts_.dedup) {
            throw ValidationError("element constants need an algebra");
        }
        if (opts_.dedup && !(opts_.dedup->signature() == sig_)) {
            throw SignatureMismatch("dedup algebra has a different signature");
        }
        if (opts_.dedup) {
            auto cells = checked_power(opts_.dedup->size(), opts_.arity);
            if (!cells || *cells > (1u << 24)) {
                throw CapExceeded("term tables too large to deduplicate", 1u << 24);
            }
            cells_ = static_cast<std::size_t>(*cells);
        }
        for (std::size_t i = 0; i < opts_.arity; ++i) {
            pending_.push_back(Term::variable(i));
        }
        for (std::size_t op = 0; op < sig_.size(); ++op) {
            if (sig_[op].arity == 0) {
                pending_.push_back(Term::apply(op, {}));
            }
        }
        if (opts_.element_constants) {
            for (std::size_t e = 0; e < opts_.dedup->size(); ++e) {
                pending_.push_back(Term::constant(static_cast<Element>(e)));
            }
        }
        level_start_.push_back(0);
    }

    /// Next term, or nullopt once every term of depth <= max_depth is out.
    std::optional<Term> next() {
        for (;;) {
            if (depth_ == 0) {
                while (pending_pos_ < pending_.size()) {
                    Term t = pending_[pending_pos_++];
                    if (accept(t, nullptr)) {
                        return t;
                    }
                }
                if (!advance_level()) {
                    return std::nullopt;
                }
                continue;
            }
            if (op_ >= sig_.size()) {
                if (!advance_level()) {
                    return std::nullopt;
                }
                continue;
            }
            const std::size_t k = sig_[op_].arity;
            if (k == 0) {
                ++op_;
                tuple_.clear();
                tuple_started_ = false;
                continue;
            }
            if (!tuple_started_) {
                tuple_.assign(k, 0);
                tuple_started_ = true;
            } else if (!step_tuple()) {
                ++op_;
                tuple_started_ = false;
                continue;
            }
            if (std::none_of(tuple_.begin(), tuple_.end(), [&](std::size_t i) { return i >= prev_start_; })) {
                continue;
            }
            std::vector<Term> children;
            children.reserve(k);
            for (auto i : tuple_) {
                children.push_back(terms_[i]);
            }
            Term t = Term::apply(op_, std::move(children));
            if (accept(t, &tuple_)) {
                return t;
            }
        }
    }

    std::size_t current_depth() const noexcept { return depth_; }
    std::size_t produced() const noexcept { return terms_.size(); }

private:
    bool step_tuple() {
        for (std::size_t p = tuple_.size(); p > 0; --p) {
            if (++tuple_[p - 1] < limit_) {
                return true;
            }
            tuple_[p - 1] = 0;
        }
        return false;
    }

    bool advance_level() {
        if (depth_ >= opts_.max_depth) {
            return false;
        }
        prev_start_ = level_start_.back();
        limit_ = terms_.size();
        if (prev_start_ == limit_) {
            // previous level empty: nothing deeper can appear
            return false;
        }
        level_start_.push_back(terms_.size());
        ++depth_;
        op_ = 0;
        tuple_started_ = false;
        return true;
    }

    bool accept(const Term& t, const std::vector<std::size_t>* child_idx) {
        if (!opts_.dedup) {
            terms_.push_back(t);
            return true;
        }
        const FiniteAlgebra& a = *opts_.dedup;
        std::vector<Element> table(cells_);
        if (child_idx == nullptr) {
            table = term_table(a, t, opts_.arity);
        } else {
            std::vector<Element> args(child_idx->size());
            for (std::size_t c = 0; c < cells_; ++c) {
                for (std::size_t p = 0; p < args.size(); ++p) {
                    args[p] = tables_[(*child_idx)[p]][c];
                }
                table[c] = a.apply(t.index(), std::span<const Element>(args));
            }
        }
        if (!seen_.insert(table).second) {
            return false;
        }
        terms_.push_back(t);
        tables_.push_back(std::move(table));
        return true;
    }

    struct TableHash {
        std::size_t operator()(const std::vector<Element>& v) const noexcept {
            std::size_t h = 1469598103934665603ull;
            for (auto x : v) {
                h = (h ^ x) * 1099511628211ull;
            }
            return h;
        }
    };

    Signature sig_;
    TermEnumerationOptions opts_;
    std::size_t cells_ = 0;
    std::vector<Term> pending_;
    std::size_t pending_pos_ = 0;
    std::vector<Term> terms_;
    std::vector<std::vector<Element>> tables_;
    std::unordered_set<std::vector<Element>, TableHash> seen_;
    std::vector<std::size_t> level_start_;
    std::size_t depth_ = 0;
    std::size_t prev_start_ = 0;
    std::size_t limit_ = 0;
    std::size_t op_ = 0;
    std::vector<std::size_t> tuple_;
    bool tuple_started_ = false;
};

/// All terms up to max_depth, collected. See TermEnumerator for the order.
inline std::vector<Term> enumerate_terms(const Signature& sig, std::size_t arity, std::size_t max_depth,
                                         std::optional<FiniteAlgebra> dedup = std::nullopt) {
    TermEnumerator en(sig, TermEnumerationOptions{arity, max_depth, std::move(dedup), false});
    std::vector<Term> out;
    while (auto t = en.next()) {
        out.push_back(std::move(*t));
    }
    return out;
}

} // namespace ualg

#endif
