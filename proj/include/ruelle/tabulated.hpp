#pragma once

#include <cmath>
#include <cstddef>
#include <set>
#include <vector>

#include "spin_word.hpp"

namespace ruelle {

// Function of the first `depth` coordinates, stored as 2^depth values.
// `completion` is the tail used when a caller evaluates the function on a
// configuration that it must extend beyond its own depth (e.g. transfer
// iteration), and travels with the table.
struct TabulatedFunction {
    int depth = 0;
    std::vector<double> values;
    BoundaryTail completion;

    TabulatedFunction() : values(1, 0.0) {}
    TabulatedFunction(int m, BoundaryTail tail)
        : depth(m), values(std::size_t{1} << m, 0.0), completion(std::move(tail)) {
        if (m < 0 || m > 26) throw cap_error("depth cap exceeded; increase cap or lower K");
    }

    static TabulatedFunction constant(double v, BoundaryTail tail = BoundaryTail::all_plus()) {
        TabulatedFunction f(0, std::move(tail));
        f.values[0] = v;
        return f;
    }

    std::size_t size() const { return values.size(); }

    // Index of the first `depth` coordinates of a configuration.
    std::size_t index_of(const Configuration& c) const {
        std::size_t idx = 0;
        int within = c.word.len < depth ? c.word.len : depth;
        idx = c.word.bits & ((std::uint64_t{1} << within) - 1);
        for (int j = within; j < depth; ++j)
            if (c.tail.at(j) == 1) idx |= std::size_t{1} << j;
        return idx;
    }

    double eval(const Configuration& c) const { return values[index_of(c)]; }

    // Value at the table's own completion-consistent point for a word.
    double at_word(std::uint64_t w) const { return values[w]; }
};

// Point of the completion-consistent configuration for tail z0: all-ones word
// for AllPlus, all-zeros for AllMinus.
inline std::size_t boundary_index(const BoundaryTail& tail, int depth) {
    std::size_t idx = 0;
    for (int j = 0; j < depth; ++j)
        if (tail.at(j) == 1) idx |= std::size_t{1} << j;
    return idx;
}

// Embedding of a configuration into [-1,1]: t = sum_j x_j 2^{-(j+1)}.
inline double embedding_t(const Configuration& c) {
    double t = 0.0;
    double w = 0.5;
    for (int j = 0; j < 62; ++j, w *= 0.5) t += w * static_cast<double>(c.spin(j));
    return t;
}

// phi_B(x) = prod_{i in B} (1 + x_i)/2: indicator that x is +1 on B.
inline double phi_indicator(const std::set<int>& B, const Configuration& c) {
    for (int i : B)
        if (c.spin(i) != 1) return 0.0;
    return 1.0;
}

// phi_B as a table of depth max(B)+1 (depth 0 for B empty).
inline TabulatedFunction phi_B_table(const std::set<int>& B,
                                     BoundaryTail completion = BoundaryTail::all_plus()) {
    int depth = B.empty() ? 0 : *B.rbegin() + 1;
    TabulatedFunction f(depth, std::move(completion));
    std::uint64_t mask = 0;
    for (int i : B) mask |= std::uint64_t{1} << i;
    for (std::size_t w = 0; w < f.size(); ++w) f.values[w] = ((w & mask) == mask) ? 1.0 : 0.0;
    return f;
}

// Increasing iff no covering flip (-1 -> +1 in one coordinate) decreases the
// value; single flips generate the coordinatewise order.
inline bool is_increasing(const TabulatedFunction& f, double tol = 0.0) {
    for (std::size_t w = 0; w < f.size(); ++w)
        for (int b = 0; b < f.depth; ++b)
            if (!(w & (std::size_t{1} << b)) && f.values[w | (std::size_t{1} << b)] < f.values[w] - tol)
                return false;
    return true;
}

// Same but reports a violating covering pair (lo word, hi word).
struct MonotonicityWitness {
    bool increasing = true;
    SpinWord lo, hi;
};

inline MonotonicityWitness is_increasing_witness(const TabulatedFunction& f, double tol = 0.0) {
    for (std::size_t w = 0; w < f.size(); ++w)
        for (int b = 0; b < f.depth; ++b)
            if (!(w & (std::size_t{1} << b)) && f.values[w | (std::size_t{1} << b)] < f.values[w] - tol)
                return {false, SpinWord(w, f.depth), SpinWord(w | (std::size_t{1} << b), f.depth)};
    return {};
}

// All {0,1}-valued increasing functions on {-1,+1}^n; counts are the Dedekind
// numbers 3, 6, 20, 168 for n = 1..4.
inline std::vector<TabulatedFunction> enumerate_monotone_indicators(int n) {
    if (n < 1 || n > 4) throw cap_error("enumeration too large");
    std::size_t points = std::size_t{1} << n;
    std::vector<TabulatedFunction> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << points); ++mask) {
        bool monotone = true;
        for (std::size_t w = 0; w < points && monotone; ++w) {
            if (!(mask & (std::uint64_t{1} << w))) continue;
            for (int b = 0; b < n; ++b) {
                if (!(w & (std::size_t{1} << b)) && !(mask & (std::uint64_t{1} << (w | (std::size_t{1} << b))))) {
                    monotone = false;
                    break;
                }
            }
        }
        if (!monotone) continue;
        TabulatedFunction f(n, BoundaryTail::all_plus());
        for (std::size_t w = 0; w < points; ++w)
            f.values[w] = (mask & (std::uint64_t{1} << w)) ? 1.0 : 0.0;
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace ruelle
