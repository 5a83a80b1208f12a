#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "parallel.hpp"
#include "potential.hpp"
#include "serialize.hpp"
#include "spin_word.hpp"
#include "tabulated.hpp"

namespace ruelle {

// mu_n^y: exact enumeration of the 2^n words at volume n with boundary y.
// Weights are computed in log space and exponentiated after subtracting the
// maximum, so Z stays finite at large beta*n.
struct FiniteVolumeMeasure {
    int n = 0;
    BoundaryTail boundary;
    std::vector<double> log_weights;  // S_n(A)([x|y]_n) per word
    std::vector<double> weights;      // normalized, sum 1
    double log_Z = 0.0;
    double Z = 0.0;

    std::size_t size() const { return weights.size(); }
};

inline FiniteVolumeMeasure build_measure(const PotentialEval& p, int n, const BoundaryTail& y) {
    if (n < 1 || n > 24) throw cap_error("volume too large for exact enumeration");
    FiniteVolumeMeasure m;
    m.n = n;
    m.boundary = y;
    std::size_t count = std::size_t{1} << n;
    m.log_weights.resize(count);
    parallel_for(count, [&](std::size_t begin, std::size_t end) {
        for (std::size_t w = begin; w < end; ++w)
            m.log_weights[w] = p.birkhoff_sum(SpinWord(w, n), y, n);
    });
    double max_log = *std::max_element(m.log_weights.begin(), m.log_weights.end());
    std::vector<double> shifted(count);
    parallel_for(count, [&](std::size_t begin, std::size_t end) {
        for (std::size_t w = begin; w < end; ++w) shifted[w] = std::exp(m.log_weights[w] - max_log);
    });
    double total = pairwise_sum(shifted);
    m.log_Z = max_log + std::log(total);
    m.Z = std::exp(m.log_Z);
    m.weights.resize(count);
    for (std::size_t w = 0; w < count; ++w) m.weights[w] = shifted[w] / total;
    return m;
}

template <typename Fn>
double expect_fn(const FiniteVolumeMeasure& m, Fn&& f) {
    std::size_t count = m.size();
    std::vector<double> terms(count);
    parallel_for(count, [&](std::size_t begin, std::size_t end) {
        for (std::size_t w = begin; w < end; ++w)
            terms[w] = m.weights[w] * f(Configuration(SpinWord(w, m.n), m.boundary));
    });
    return pairwise_sum(terms);
}

inline double expect(const FiniteVolumeMeasure& m, const TabulatedFunction& f) {
    return expect_fn(m, [&](const Configuration& c) { return f.eval(c); });
}

inline double fkg_covariance(const FiniteVolumeMeasure& m, const TabulatedFunction& f,
                             const TabulatedFunction& g) {
    double ef = expect(m, f);
    double eg = expect(m, g);
    double efg = expect_fn(m, [&](const Configuration& c) { return f.eval(c) * g.eval(c); });
    return efg - ef * eg;
}

// The five expectations of the finite-volume domination chain, in order:
// mu_{n-1}^-, mu_n^-, mu_n^{x}, mu_n^+, mu_{n-1}^+  (x defaults to the
// alternating tail; increasing f required).
inline std::array<double, 5> domination_chain(const PotentialEval& p, const TabulatedFunction& f, int n,
                                              const BoundaryTail& x_tail = BoundaryTail::alternating()) {
    if (n < 2) throw std::invalid_argument("domination chain needs n >= 2");
    if (!is_increasing(f)) throw std::invalid_argument("domination requires increasing f");
    BoundaryTail plus = BoundaryTail::all_plus(), minus = BoundaryTail::all_minus();
    return {expect(build_measure(p, n - 1, minus), f), expect(build_measure(p, n, minus), f),
            expect(build_measure(p, n, x_tail), f),   expect(build_measure(p, n, plus), f),
            expect(build_measure(p, n - 1, plus), f)};
}

// H_n via the lattice Hamiltonian (pair couplings J_{ij} = beta a_{|i-j|},
// field beta h, boundary cross-terms), minus the Birkhoff sum S_n(A).
// The two routes agree exactly; the residual is roundoff.
inline double hamiltonian_equivalence(const PotentialEval& p, int n, const SpinWord& x,
                                      const BoundaryTail& y) {
    if (!p.ising_like()) throw std::invalid_argument("hamiltonian comparison defined for Ising-type only");
    Configuration c(x, y);
    double sc = p.spec.spin_scale;
    double H = 0.0;
    for (int i = 0; i < n; ++i) H += p.spec.beta * p.spec.h * sc * c.spin(i);
    int K = p.spec.truncation_K;
    for (int i = 0; i < n; ++i)
        for (int d = 1; d <= K; ++d)
            H += p.spec.beta * p.a[d - 1] * (sc * c.spin(i)) * (sc * c.spin(i + d));
    return H - p.birkhoff_sum(x, y, n);
}

inline double magnetization(const FiniteVolumeMeasure& m, int i) {
    if (i < 0 || i >= m.n) throw std::invalid_argument("site index out of volume");
    return expect_fn(m, [&](const Configuration& c) { return static_cast<double>(c.spin(i)); });
}

// Residual of the one-step decomposition
//   sum_t lambda_t * E_{mu_n^{[y|t|y]_n}}[f] = E_{mu_{n+1}^y}[f],
//   lambda_t = e^{A(sigma^n [y|t|y]_n)} * Z_n^{[y|t|y]_n} / Z_{n+1}^y.
// Splitting S_{n+1} = S_n + A o sigma^n leaves the factor e^{A(t, y_{n+1}, ...)},
// which depends only on (t, y) and is absorbed into the weight; with it the
// lambda_t sum to exactly 1 and the identity is exact.
inline double decomposition_residual(const PotentialEval& p, int n, const BoundaryTail& y,
                                     const TabulatedFunction& f) {
    if (n < 1) throw std::invalid_argument("decomposition needs n >= 1");
    FiniteVolumeMeasure big = build_measure(p, n + 1, y);
    double lhs = 0.0;
    for (int t : {-1, +1}) {
        BoundaryTail yt = y.with_override(n, t);
        FiniteVolumeMeasure small = build_measure(p, n, yt);
        Configuration past_volume(SpinWord().prepended(t), y.shifted(n));
        lhs += std::exp(p.eval(past_volume) + small.log_Z - big.log_Z) * expect(small, f);
    }
    return lhs - expect(big, f);
}

inline void write_measure_csv(const FiniteVolumeMeasure& m, const std::string& path) {
    CsvWriter csv(path);
    csv.row({"index", "word", "log_weight", "weight_normalized"});
    for (std::size_t w = 0; w < m.size(); ++w)
        csv.row({std::to_string(w), SpinWord(w, m.n).to_string(), fmt_double(m.log_weights[w]),
                 fmt_double(m.weights[w])});
}

}  // namespace ruelle
