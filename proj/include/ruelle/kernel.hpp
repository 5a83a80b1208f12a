#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gibbs.hpp"
#include "parallel.hpp"
#include "potential.hpp"
#include "random.hpp"
#include "spin_word.hpp"
#include "transfer.hpp"

namespace ruelle {

enum class KernelKind { ProductKernel, IsingKernel };

// Involution kernel W(y|x) for the two solvable families.
//   ProductKernel: W(y|x) = sum_{i>=0} (x_i + y_i) alpha_i, alpha_i = beta sum_{j>i,j<=K} a_j
//   IsingKernel:   W(y|x) = beta sum_{k<=K_y} y_{k-1} sum_{j<=K_x} x_{j-1} a_{j+k-1}
// Both identities (A* + W)(ya|x) = (A + W)(y|ax) are exact under consistent
// truncation (K_x, K_y >= K; couplings vanish beyond K).
struct KernelSpec {
    KernelKind kind = KernelKind::ProductKernel;
    PotentialEval base;
    int K_x = 0, K_y = 0;
    std::vector<double> alphas;  // ProductKernel tail sums, beta and scale folded in

    static KernelSpec from(const PotentialEval& p, int K_x = 0, int K_y = 0) {
        KernelSpec w{KernelKind::ProductKernel, p, K_x, K_y, {}};
        if (K_x <= 0) w.K_x = p.spec.truncation_K;
        if (K_y <= 0) w.K_y = p.spec.truncation_K;
        if (p.spec.kind == PotentialKind::ProductType) {
            w.kind = KernelKind::ProductKernel;
            w.alphas = explicit_alphas(p);
        } else {
            if (p.spec.h != 0.0) throw std::invalid_argument("dual not implemented");
            w.kind = KernelKind::IsingKernel;
        }
        return w;
    }

    double coupling(int j) const {  // a_j with zero tail beyond K
        return (j >= 1 && j <= base.spec.truncation_K) ? base.a[j - 1] : 0.0;
    }
};

namespace detail {

// Conditionally convergent alternating tails are summed in consecutive-pair
// groups; the word part is summed directly.
template <typename Term>
double paired_tail_sum(const Configuration& c, int limit, Term&& term) {
    double s = 0.0;
    int word_len = c.word.len < limit ? c.word.len : limit;
    for (int i = 0; i < word_len; ++i) s += term(i);
    for (int i = word_len; i < limit; i += 2) {
        double group = term(i);
        if (i + 1 < limit) group += term(i + 1);
        s += group;
    }
    return s;
}

}  // namespace detail

inline double kernel_eval(const KernelSpec& w, const Configuration& y, const Configuration& x) {
    double sc = w.base.spec.spin_scale;
    if (w.kind == KernelKind::ProductKernel) {
        int limit = static_cast<int>(w.alphas.size());
        auto term = [&](const Configuration& c) {
            return detail::paired_tail_sum(c, limit, [&](int i) { return w.alphas[i] * c.spin(i); });
        };
        return term(x) + term(y);
    }
    // Dyson kernel: defined off the alternating-tail set only when the
    // coupling series is absolutely summable (gamma > 2 or non-power-law).
    bool conditional = w.base.spec.rule.kind == CouplingRule::Kind::PowerLaw && w.base.spec.rule.gamma <= 2.0;
    if (conditional && x.word.len < w.K_x && x.tail.kind != BoundaryTail::Kind::Alternating)
        throw std::invalid_argument("kernel undefined off X\xCC\x83");
    double beta = w.base.spec.beta;
    double total = 0.0;
    for (int k = 1; k <= w.K_y; ++k) {
        double inner = detail::paired_tail_sum(
            x, w.K_x, [&](int i) { return sc * x.spin(i) * w.coupling(i + k); });
        total += sc * y.spin(k - 1) * inner;
    }
    return beta * total;
}

// |(A*(ya) + W(ya|x)) - (A(ax) + W(y|ax))| with A* = A (symmetric cases).
inline double duality_residual(const KernelSpec& w, int s, const Configuration& x, const Configuration& y) {
    const PotentialEval& dual = w.base;  // A* = A for ProductType and h=0 Ising
    Configuration ya = y.prepended(s);
    Configuration ax = x.prepended(s);
    double lhs = dual.eval(ya) + kernel_eval(w, ya, x);
    double rhs = w.base.eval(ax) + kernel_eval(w, y, ax);
    return std::abs(lhs - rhs);
}

// Quadrature over an approximation of the dual eigenmeasure nu_{A*}.
struct ExactCylinderQuadrature {
    std::vector<double> weights;
    std::vector<Configuration> nodes;
    int depth = 0;
    bool flip_paired = false;

    // Finite-volume measure mu_d of the dual potential as quadrature weights;
    // flip-paired mode averages the AllPlus and AllMinus boundaries, which is
    // flip-symmetric for mirrored potentials.
    static ExactCylinderQuadrature build(const PotentialEval& dual, int d, bool flip_paired = false) {
        ExactCylinderQuadrature q;
        q.depth = d;
        q.flip_paired = flip_paired;
        for (int pass = 0; pass < (flip_paired ? 2 : 1); ++pass) {
            BoundaryTail tail = pass == 0 ? BoundaryTail::all_plus() : BoundaryTail::all_minus();
            FiniteVolumeMeasure m = build_measure(dual, d, tail);
            double factor = flip_paired ? 0.5 : 1.0;
            for (std::size_t v = 0; v < m.size(); ++v) {
                q.weights.push_back(factor * m.weights[v]);
                q.nodes.emplace_back(SpinWord(v, d), tail);
            }
        }
        return q;
    }

    double integrate_exp_kernel(const KernelSpec& w, const Configuration& x) const {
        return parallel_map_sum(weights.size(), [&](std::size_t i) {
            return weights[i] * std::exp(kernel_eval(w, nodes[i], x));
        });
    }

    // Single-site mean of coordinate i under the quadrature weights.
    double site_mean(int i) const {
        return parallel_map_sum(weights.size(), [&](std::size_t i_node) {
            return weights[i_node] * static_cast<double>(nodes[i_node].spin(i));
        });
    }
};

// Exact single-site means of the product-type finite-volume measure:
// m_i = tanh(beta * sc * sum_{j<=min(i,K)} a_j), independent of the volume
// for interior sites. Derived from mu_d enumeration at two depths (stability
// check per the build contract) and cross-checked against the closed form.
struct MarginalDerivation {
    std::vector<double> means;       // closed form, sites 0..count-1
    double enumeration_drift = 0.0;  // max |mean(d_hi) - mean(d_lo)| over shared sites
    double closed_form_error = 0.0;  // max |enumerated - closed form|
};

inline double product_site_mean_closed_form(const PotentialEval& p, int i) {
    double c = 0.0;
    int top = std::min(i, p.spec.truncation_K);
    for (int j = 1; j <= top; ++j) c += p.a[j - 1];
    return std::tanh(p.spec.beta * p.spec.spin_scale * c);
}

inline MarginalDerivation derive_product_marginals(const PotentialEval& p, int count, int d_lo = 10,
                                                   int d_hi = 12) {
    if (p.spec.kind != PotentialKind::ProductType)
        throw std::invalid_argument("independence not established");
    MarginalDerivation out;
    FiniteVolumeMeasure lo = build_measure(p, d_lo, BoundaryTail::all_plus());
    FiniteVolumeMeasure hi = build_measure(p, d_hi, BoundaryTail::all_plus());
    for (int i = 0; i < d_lo; ++i) {
        double m_lo = magnetization(lo, i), m_hi = magnetization(hi, i);
        out.enumeration_drift = std::max(out.enumeration_drift, std::abs(m_hi - m_lo));
        out.closed_form_error =
            std::max(out.closed_form_error, std::abs(m_hi - product_site_mean_closed_form(p, i)));
    }
    if (out.enumeration_drift > 1e-6)
        throw std::runtime_error("marginal derivation failed to stabilize");
    for (int i = 0; i < count; ++i) out.means.push_back(product_site_mean_closed_form(p, i));
    return out;
}

// Largest pairwise correlation under mu_d; exactly zero for product-type
// potentials, which is what licenses independent sampling.
inline double validate_product_independence(const PotentialEval& p, int d) {
    FiniteVolumeMeasure m = build_measure(p, d, BoundaryTail::all_plus());
    double worst = 0.0;
    for (int i = 0; i < d; ++i) {
        double mi = magnetization(m, i);
        for (int j = i + 1; j < d; ++j) {
            double mj = magnetization(m, j);
            double mij = expect_fn(m, [&](const Configuration& c) {
                return static_cast<double>(c.spin(i)) * static_cast<double>(c.spin(j));
            });
            worst = std::max(worst, std::abs(mij - mi * mj));
        }
    }
    return worst;
}

// Monte Carlo realization of int e^{W(y|x)} dnu(y) for product-type
// potentials: sites are independent Bernoulli with the derived marginals.
// The kernel splits as x-part + y-part, so the per-sample work is the
// y-part only; substreams keyed by sample index keep the estimate
// byte-identical for any worker count.
struct MonteCarloQuadrature {
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    double mean_exp_y = 0.0;
    std::vector<double> marginal_means;

    static MonteCarloQuadrature build(const KernelSpec& w, std::size_t samples, std::uint64_t seed) {
        if (w.kind != KernelKind::ProductKernel)
            throw std::invalid_argument("independence not established");
        MonteCarloQuadrature q;
        q.samples = samples;
        q.seed = seed;
        int sites = static_cast<int>(w.alphas.size());
        MarginalDerivation der = derive_product_marginals(w.base, sites);
        q.marginal_means = der.means;
        q.mean_exp_y = parallel_map_sum(samples, [&](std::size_t s) {
            SplitMix64 rng = substream(seed, s);
            double e = 0.0;
            for (int i = 0; i < sites; ++i) {
                int spin = rng.next_double() < 0.5 * (1.0 + q.marginal_means[i]) ? +1 : -1;
                e += w.alphas[i] * spin;
            }
            return std::exp(e);
        }) / static_cast<double>(samples);
        return q;
    }

    double integrate_exp_kernel(const KernelSpec& w, const Configuration& x) const {
        double x_part = 0.0;
        for (std::size_t i = w.alphas.size(); i-- > 0;)
            x_part += w.alphas[i] * x.spin(static_cast<long long>(i));
        return std::exp(x_part) * mean_exp_y;
    }
};

// phi(x) = int e^{W(y|x)} dnu_{A*}(y) via the chosen quadrature.
inline double kernel_eigenfunction(const KernelSpec& w, const Configuration& x,
                                   const ExactCylinderQuadrature& q) {
    return q.integrate_exp_kernel(w, x);
}

inline double kernel_eigenfunction(const KernelSpec& w, const Configuration& x,
                                   const MonteCarloQuadrature& q) {
    return q.integrate_exp_kernel(w, x);
}

// P(beta A) < log(2 cosh(beta zeta(gamma))): the product-form bound of the
// Dyson pressure, evaluated with a partial zeta sum plus tail bound.
struct PressureBound {
    double bound = 0.0;
    double zeta_partial = 0.0;
    double zeta_tail_bound = 0.0;
    double gamma = 0.0, beta = 0.0;
    long long K = 0;
};

inline PressureBound pressure_upper_bound(double gamma, double beta, long long K = 1000000) {
    if (!(gamma > 2.0)) throw std::invalid_argument("bound derived for \xCE\xB3>2 regime");
    if (!(beta > 0.0)) throw std::invalid_argument("bound requires beta > 0");
    std::vector<double> terms(static_cast<std::size_t>(K));
    parallel_for(terms.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j)
            terms[j] = std::pow(static_cast<double>(j + 1), -gamma);
    });
    PressureBound b;
    b.gamma = gamma;
    b.beta = beta;
    b.K = K;
    b.zeta_partial = pairwise_sum(terms);
    b.zeta_tail_bound = std::pow(static_cast<double>(K), 1.0 - gamma) / (gamma - 1.0);
    b.bound = std::log(2.0 * std::cosh(beta * b.zeta_partial));
    return b;
}

// The binary model on [-1,1]: (L f)(t) = e^{t/2} f((t+1)/2) + e^{-t/2} f((t-1)/2),
// with the known quadratic eigen-approximation phi and constant c matching
// Taylor coefficients through order two at t = 0.
struct BinaryModel {
    static double phi(double t) { return 0.75 * t * t + (3.0 / 32.0) * (15.0 + std::sqrt(353.0)); }
    static double c() { return (49.0 + std::sqrt(353.0)) / 32.0; }

    template <typename F>
    static double apply(F&& f, double t) {
        return std::exp(0.5 * t) * f(0.5 * (t + 1.0)) + std::exp(-0.5 * t) * f(0.5 * (t - 1.0));
    }

    template <typename F>
    static std::vector<std::array<double, 2>> apply_grid(F&& f, int n = 2048) {
        std::vector<std::array<double, 2>> g(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            double t = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
            g[static_cast<std::size_t>(i)] = {t, apply(f, t)};
        }
        return g;
    }

    // Taylor coefficients (order 0..2) at t = 0 by Richardson-extrapolated
    // central differences. The step is 5e-3: with the (h, 2h) pair the
    // truncation error is O(h^4) ~ 4e-12 while roundoff in the second
    // difference stays ~1e-10; smaller steps would amplify cancellation past
    // the 1e-9 agreement target.
    template <typename F>
    static std::array<double, 3> taylor_at_zero(F&& g, double h = 5e-3) {
        auto d1 = [&](double step) { return (g(step) - g(-step)) / (2.0 * step); };
        auto d2 = [&](double step) { return (g(step) - 2.0 * g(0.0) + g(-step)) / (step * step); };
        double first = (4.0 * d1(h) - d1(2.0 * h)) / 3.0;
        double second = (4.0 * d2(h) - d2(2.0 * h)) / 3.0;
        return {g(0.0), first, 0.5 * second};
    }
};

}  // namespace ruelle
