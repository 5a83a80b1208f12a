#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spin_word.hpp"
#include "tabulated.hpp"

namespace ruelle {

enum class PotentialKind { IsingType, ProductType, Binary };

struct CouplingRule {
    enum class Kind { PowerLaw, Geometric, Explicit };

    Kind kind = Kind::Explicit;
    double gamma = 0.0;      // PowerLaw: a_j = j^-gamma, gamma > 1
    double lambda = 0.0;     // Geometric: a_j = lambda^j, 0 < lambda < 1
    std::vector<double> list;  // Explicit: a_j = list[j-1], zero beyond

    static CouplingRule power_law(double gamma) {
        if (!(gamma > 1.0)) throw std::invalid_argument("PowerLaw requires gamma > 1");
        CouplingRule r;
        r.kind = Kind::PowerLaw;
        r.gamma = gamma;
        return r;
    }
    static CouplingRule geometric(double lambda) {
        if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("Geometric requires 0 < lambda < 1");
        CouplingRule r;
        r.kind = Kind::Geometric;
        r.lambda = lambda;
        return r;
    }
    static CouplingRule explicit_list(std::vector<double> a) {
        CouplingRule r;
        r.kind = Kind::Explicit;
        r.list = std::move(a);
        return r;
    }

    double coupling(int j) const {  // 1-based coupling index
        switch (kind) {
            case Kind::PowerLaw: return std::pow(static_cast<double>(j), -gamma);
            case Kind::Geometric: return std::pow(lambda, j);
            case Kind::Explicit:
                return (j >= 1 && j <= static_cast<int>(list.size())) ? list[j - 1] : 0.0;
        }
        return 0.0;
    }
};

// Everything defining the potential: IsingType A(x) = beta(h x_0 + x_0 sum_{j=1..K} a_j x_j),
// ProductType B(x) = beta sum_{j=1..K} a_j x_j (leading coordinate uncoupled),
// Binary = IsingType with a_j = 2^{-j+1} and spins +-1/2.
struct CouplingSpec {
    PotentialKind kind = PotentialKind::IsingType;
    double h = 0.0;
    double beta = 1.0;
    CouplingRule rule;
    int truncation_K = 64;
    double spin_scale = 1.0;

    static CouplingSpec dyson(double gamma, double beta, double h, int K) {
        CouplingSpec s;
        s.kind = PotentialKind::IsingType;
        s.h = h;
        s.beta = beta;
        s.rule = CouplingRule::power_law(gamma);
        s.truncation_K = K;
        return s;
    }
    static CouplingSpec product_power(double gamma, double beta, int K) {
        CouplingSpec s;
        s.kind = PotentialKind::ProductType;
        s.beta = beta;
        s.rule = CouplingRule::power_law(gamma);
        s.truncation_K = K;
        return s;
    }
    static CouplingSpec product_geometric(double lambda, double beta, int K) {
        CouplingSpec s;
        s.kind = PotentialKind::ProductType;
        s.beta = beta;
        s.rule = CouplingRule::geometric(lambda);
        s.truncation_K = K;
        return s;
    }
    static CouplingSpec ising_explicit(std::vector<double> a, double beta = 1.0, double h = 0.0) {
        CouplingSpec s;
        s.kind = PotentialKind::IsingType;
        s.h = h;
        s.beta = beta;
        s.truncation_K = static_cast<int>(a.size()) > 0 ? static_cast<int>(a.size()) : 1;
        s.rule = CouplingRule::explicit_list(std::move(a));
        return s;
    }
    static CouplingSpec product_explicit(std::vector<double> a, double beta = 1.0) {
        CouplingSpec s = ising_explicit(std::move(a), beta, 0.0);
        s.kind = PotentialKind::ProductType;
        return s;
    }
    // Binary potential of the interval model: a_j = 2^{-j+1}, spins +-1/2.
    static CouplingSpec binary(int K = 40) {
        CouplingSpec s;
        s.kind = PotentialKind::Binary;
        s.beta = 1.0;
        std::vector<double> a(static_cast<std::size_t>(K));
        for (int j = 1; j <= K; ++j) a[j - 1] = std::ldexp(1.0, -j + 1);
        s.rule = CouplingRule::explicit_list(std::move(a));
        s.truncation_K = K;
        s.spin_scale = 0.5;
        return s;
    }

    void validate() const {
        if (truncation_K < 1) throw std::invalid_argument("truncation K must be >= 1");
        if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
        if (kind == PotentialKind::Binary && spin_scale != 0.5)
            throw std::invalid_argument("binary potential uses spin scale 1/2");
    }
};

// Evaluator with the truncated couplings materialized.
struct PotentialEval {
    CouplingSpec spec;
    std::vector<double> a;  // a[j-1] = a_j for j = 1..K

    explicit PotentialEval(CouplingSpec s) : spec(std::move(s)) {
        spec.validate();
        a.resize(static_cast<std::size_t>(spec.truncation_K));
        for (int j = 1; j <= spec.truncation_K; ++j) a[j - 1] = spec.rule.coupling(j);
    }

    bool ising_like() const { return spec.kind != PotentialKind::ProductType; }

    // A([x|y]) with coordinates scaled by spin_scale.
    double eval(const Configuration& c) const {
        double sc = spec.spin_scale;
        double coupled = 0.0;
        for (int j = spec.truncation_K; j >= 1; --j) coupled += a[j - 1] * (sc * c.spin(j));
        if (ising_like()) {
            double s0 = sc * c.spin(0);
            return spec.beta * (spec.h * s0 + s0 * coupled);
        }
        return spec.beta * coupled;
    }

    // S_n(A)([x|y]_n) = sum_{k=0}^{n-1} A(sigma^k [x|y]_n).
    double birkhoff_sum(const SpinWord& x, const BoundaryTail& y, int n) const {
        if (n < 1) throw std::invalid_argument("birkhoff sum needs n >= 1");
        Configuration c(x, y);
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            s += eval(c);
            c = c.shifted_once();
        }
        return s;
    }

    // beta * sum_{j>K} |a_j|, the reported truncation error bound.
    double tail_bound() const {
        switch (spec.rule.kind) {
            case CouplingRule::Kind::PowerLaw:
                return spec.beta * std::pow(static_cast<double>(spec.truncation_K), 1.0 - spec.rule.gamma) /
                       (spec.rule.gamma - 1.0);
            case CouplingRule::Kind::Geometric:
                return spec.beta * std::pow(spec.rule.lambda, spec.truncation_K + 1) / (1.0 - spec.rule.lambda);
            case CouplingRule::Kind::Explicit: {
                double s = 0.0;
                for (std::size_t j = static_cast<std::size_t>(spec.truncation_K); j < spec.rule.list.size(); ++j)
                    s += std::abs(spec.rule.list[j]);
                return spec.beta * s;
            }
        }
        return 0.0;
    }
};

// Sufficient class-E condition for Ising-type potentials: all retained
// couplings nonnegative (the derivative of S_n along the interpolation is
// then increasing in x).
inline bool class_E_check_ising(const PotentialEval& p) {
    if (!p.ising_like()) throw std::invalid_argument("class \xF0\x9D\x93\x94 check defined for Ising-type only");
    for (double aj : p.a)
        if (aj < 0.0) return false;
    return true;
}

struct ClassFResult {
    bool in_class = true;
    bool l_one_increasing = true;       // L_A(1) increasing at depth m
    bool l_cylinder_increasing = true;  // L_A(1_{[1]}) increasing at depth m
    SpinWord witness_lo, witness_hi;
};

// Class-F surrogate at depth m: tabulate L_A(1)(x) and L_A(1_{[1]})(x) over
// depth-m words completed with AllPlus and test monotonicity of both.
inline ClassFResult class_F_check(const PotentialEval& p, int m) {
    if (m < 1 || m > 20) throw std::invalid_argument("class F check depth must be in [1, 20]");
    BoundaryTail tail = BoundaryTail::all_plus();
    TabulatedFunction l_one(m, tail), l_cyl(m, tail);
    for (std::size_t w = 0; w < l_one.size(); ++w) {
        Configuration x(SpinWord(w, m), tail);
        double plus = std::exp(p.eval(x.prepended(+1)));
        double minus = std::exp(p.eval(x.prepended(-1)));
        l_one.values[w] = plus + minus;
        l_cyl.values[w] = plus;
    }
    ClassFResult r;
    // Tolerance absorbs roundoff in the summed branch weights.
    MonotonicityWitness w1 = is_increasing_witness(l_one, 1e-12);
    MonotonicityWitness w2 = is_increasing_witness(l_cyl, 1e-12);
    r.l_one_increasing = w1.increasing;
    r.l_cylinder_increasing = w2.increasing;
    r.in_class = w1.increasing && w2.increasing;
    const MonotonicityWitness& bad = w1.increasing ? w2 : w1;
    if (!r.in_class) {
        r.witness_lo = bad.lo;
        r.witness_hi = bad.hi;
    }
    return r;
}

// Mirrored iff A(x) = A(-x); checked over all 2^m words with the tail
// flipped alongside the word.
inline bool is_mirrored(const PotentialEval& p, int m) {
    if (m < 1 || m > 20) throw std::invalid_argument("mirrored check depth must be in [1, 20]");
    BoundaryTail plus = BoundaryTail::all_plus();
    for (std::size_t w = 0; w < (std::size_t{1} << m); ++w) {
        Configuration x(SpinWord(w, m), plus);
        if (std::abs(p.eval(x) - p.eval(x.flipped())) > 1e-12) return false;
    }
    return true;
}

// Product-type potentials are symmetric: A* = A.
inline PotentialEval dual_product_potential(const PotentialEval& p) {
    if (p.spec.kind != PotentialKind::ProductType) throw std::invalid_argument("dual not implemented");
    return p;
}

}  // namespace ruelle
