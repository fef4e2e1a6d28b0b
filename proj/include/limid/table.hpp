#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <vector>

namespace limid {

using VarId = int;

/// Dense table over an ordered variable scope. The first scope variable is the
/// most significant index digit; the last varies fastest. CPTs use the scope
/// (parents in declared order, child), so a "row" is one parent instantiation
/// and the child state varies fastest within it.
struct Table {
    std::vector<VarId> scope;
    std::vector<int> cards;
    std::vector<double> data;

    Table() = default;
    Table(std::vector<VarId> scope_, std::vector<int> cards_, double fill = 0.0)
        : scope(std::move(scope_)), cards(std::move(cards_)) {
        std::size_t n = 1;
        for (int c : cards) n *= static_cast<std::size_t>(c);
        data.assign(n, fill);
    }

    std::size_t size() const { return data.size(); }

    int position_of(VarId v) const {
        for (std::size_t i = 0; i < scope.size(); ++i)
            if (scope[i] == v) return static_cast<int>(i);
        return -1;
    }

    /// Stride of the i-th scope variable (product of cards to its right).
    std::size_t stride(int pos) const {
        std::size_t s = 1;
        for (std::size_t j = pos + 1; j < cards.size(); ++j) s *= cards[j];
        return s;
    }

    int state_at(std::size_t index, int pos, std::size_t pos_stride) const {
        return static_cast<int>((index / pos_stride) % static_cast<std::size_t>(cards[pos]));
    }
};

/// Maps each linear index of `outer` to the corresponding index of a table
/// whose scope is a subset of outer's. Strides are precomputed per shared var.
class IndexMap {
public:
    IndexMap(const Table& outer, const Table& inner) {
        for (std::size_t i = 0; i < inner.scope.size(); ++i) {
            int pos = outer.position_of(inner.scope[i]);
            assert(pos >= 0 && "inner scope must be contained in outer scope");
            entries_.push_back({outer.stride(pos),
                                static_cast<std::size_t>(outer.cards[pos]),
                                inner.stride(static_cast<int>(i))});
        }
    }

    std::size_t operator()(std::size_t outer_index) const {
        std::size_t r = 0;
        for (const auto& e : entries_)
            r += ((outer_index / e.outer_stride) % e.card) * e.inner_stride;
        return r;
    }

private:
    struct Entry {
        std::size_t outer_stride;
        std::size_t card;
        std::size_t inner_stride;
    };
    std::vector<Entry> entries_;
};

/// a *= b, with b's scope contained in a's.
inline void multiply_in(Table& a, const Table& b) {
    IndexMap map(a, b);
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] *= b.data[map(i)];
}

/// a += b * scale, with b's scope contained in a's.
inline void add_scaled_in(Table& a, const Table& b, double scale = 1.0) {
    IndexMap map(a, b);
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += scale * b.data[map(i)];
}

/// a *= (b / c) entrywise over b's scope, with 0/0 defined as 0.
inline void multiply_ratio_in(Table& a, const Table& b, const Table& c) {
    assert(b.scope == c.scope);
    IndexMap map(a, b);
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        std::size_t j = map(i);
        double denom = c.data[j];
        a.data[i] = denom == 0.0 ? 0.0 : a.data[i] * (b.data[j] / denom);
    }
}

/// Sum-marginal of `a` onto `target_scope` (a subset of a's scope, any order).
inline Table sum_marginal(const Table& a, const std::vector<VarId>& target_scope) {
    std::vector<int> cards;
    cards.reserve(target_scope.size());
    for (VarId v : target_scope) cards.push_back(a.cards[a.position_of(v)]);
    Table out(target_scope, cards, 0.0);
    IndexMap map(a, out);
    for (std::size_t i = 0; i < a.data.size(); ++i) out.data[map(i)] += a.data[i];
    return out;
}

/// Zero every entry of `a` whose state of `v` differs from `state`.
inline void condition_in(Table& a, VarId v, int state) {
    int pos = a.position_of(v);
    assert(pos >= 0);
    std::size_t st = a.stride(pos);
    for (std::size_t i = 0; i < a.data.size(); ++i)
        if (a.state_at(i, pos, st) != state) a.data[i] = 0.0;
}

/// Sum out a single variable.
inline Table sum_out(const Table& a, VarId v) {
    std::vector<VarId> target;
    for (VarId w : a.scope)
        if (w != v) target.push_back(w);
    return sum_marginal(a, target);
}

inline double total(const Table& a) {
    double s = 0.0;
    for (double x : a.data) s += x;
    return s;
}

}  // namespace limid
