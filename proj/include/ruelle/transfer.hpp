#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gibbs.hpp"
#include "parallel.hpp"
#include "potential.hpp"
#include "serialize.hpp"
#include "spin_word.hpp"
#include "tabulated.hpp"

namespace ruelle {

struct TransferOptions {
    int depth_cap = 20;        // 2^20 table entries; the desk-scale ceiling
    bool strict_depth = false; // throw instead of silently capping
};

namespace detail {

// Linear form G(w) = sum_{j=1..K} a_j * sc * z_j over the prepended
// configuration (s, w, tail), i.e. z_j = w bit (j-1) for j-1 < m, else
// tail(j-1). Filled by a subset DP: adding bit b flips coordinate b from -1
// to +1, changing G by 2*sc*a_{b+1}.
inline std::vector<double> coupled_form_table(const PotentialEval& p, int m, const BoundaryTail& tail) {
    int K = p.spec.truncation_K;
    double sc = p.spec.spin_scale;
    double base = 0.0;
    for (int j = 1; j <= K && j <= m; ++j) base -= p.a[j - 1] * sc;
    for (int j = m + 1; j <= K; ++j) base += p.a[j - 1] * sc * tail.at(j - 1);
    std::vector<double> G(std::size_t{1} << m, base);
    for (std::size_t w = 1; w < G.size(); ++w) {
        int b = __builtin_ctzll(w);
        double step = (b + 1 <= K) ? 2.0 * sc * p.a[b] : 0.0;
        G[w] = G[w & (w - 1)] + step;
    }
    return G;
}

}  // namespace detail

// (L_A f)(x) = e^{A(+1 x)} f(+1 x) + e^{A(-1 x)} f(-1 x), tabulated at depth
// m' = min(max(f.depth, K), cap). The completion tail supplies coordinates
// beyond depth for both the potential and the f lookup, so table values are
// exact for the truncated potential at completion-consistent points.
inline TabulatedFunction transfer_apply(const PotentialEval& p, const TabulatedFunction& f,
                                        const TransferOptions& opts = {}) {
    int K = p.spec.truncation_K;
    int raw_depth = std::max(f.depth, K);
    if (raw_depth > opts.depth_cap && opts.strict_depth)
        throw cap_error("depth cap exceeded; increase cap or lower K");
    int m = std::min(raw_depth, opts.depth_cap);

    TabulatedFunction out(m, f.completion);
    std::vector<double> G = detail::coupled_form_table(p, m, f.completion);

    // f index of (s, w, tail): bit 0 = s, bit i = coordinate i-1.
    int direct_bits = std::min(f.depth, m + 1);
    std::size_t fmask = (std::size_t{1} << direct_bits) - 1;
    std::size_t suffix = 0;
    for (int i = m + 1; i < f.depth; ++i)
        if (f.completion.at(i - 1) == 1) suffix |= std::size_t{1} << i;

    double beta = p.spec.beta, h = p.spec.h, sc = p.spec.spin_scale;
    bool ising = p.ising_like();
    parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t w = begin; w < end; ++w) {
            std::size_t fp = (((w << 1) | 1u) & fmask) | suffix;
            std::size_t fmi = ((w << 1) & fmask) | suffix;
            double f_plus = f.values[fp], f_minus = f.values[fmi];
            if (ising) {
                double e_plus = beta * sc * (h + G[w]);
                out.values[w] = std::exp(e_plus) * f_plus + std::exp(-e_plus) * f_minus;
            } else {
                out.values[w] = std::exp(beta * G[w]) * (f_plus + f_minus);
            }
        }
    });
    return out;
}

struct SpectralEstimate {
    double lambda = 0.0;
    double pressure = 0.0;  // log(lambda), exactly
    int iterations = 0;
    double residual = 0.0;  // sup|L z_n - lambda z_n| / sup|z_n| over the table
};

struct PowerIterateResult {
    SpectralEstimate estimate;
    TabulatedFunction z_n;         // L^n(1) normalized at the boundary point
    std::vector<double> ratios;    // renormalization ratio per step
};

struct PowerIterateOptions {
    TransferOptions transfer;
    bool early_stop = false;       // stop once successive ratios stagnate
    double stop_tol = 1e-13;
};

// z_n(x) = L^n(1)(x) / L^n(1)(z0) with z0 the all-plus or all-minus point;
// lambda is the last renormalization ratio L^{n}(1)(z0) / L^{n-1}(1)(z0).
inline PowerIterateResult power_iterate(const PotentialEval& p, int n_iters, const BoundaryTail& z0,
                                        const PowerIterateOptions& opts = {}) {
    if (z0.kind != BoundaryTail::Kind::AllPlus && z0.kind != BoundaryTail::Kind::AllMinus)
        throw std::invalid_argument("normalization point must be AllPlus or AllMinus");
    if (n_iters < 1) throw std::invalid_argument("power iteration needs n_iters >= 1");

    PowerIterateResult res;
    TabulatedFunction f = TabulatedFunction::constant(1.0, z0);
    for (int k = 0; k < n_iters; ++k) {
        TabulatedFunction g = transfer_apply(p, f, opts.transfer);
        double r = g.values[boundary_index(z0, g.depth)];
        for (double& v : g.values) v /= r;
        f = std::move(g);
        res.ratios.push_back(r);
        std::size_t s = res.ratios.size();
        if (opts.early_stop && s >= 3 &&
            std::abs(res.ratios[s - 1] / res.ratios[s - 2] - 1.0) < opts.stop_tol &&
            std::abs(res.ratios[s - 2] / res.ratios[s - 3] - 1.0) < opts.stop_tol)
            break;
    }
    res.estimate.lambda = res.ratios.back();
    res.estimate.pressure = std::log(res.estimate.lambda);
    res.estimate.iterations = static_cast<int>(res.ratios.size());

    TabulatedFunction check = transfer_apply(p, f, opts.transfer);
    double sup_defect = 0.0, sup_f = 0.0;
    for (std::size_t w = 0; w < f.size(); ++w) {
        sup_defect = std::max(sup_defect, std::abs(check.values[w] - res.estimate.lambda * f.values[w]));
        sup_f = std::max(sup_f, std::abs(f.values[w]));
    }
    res.estimate.residual = sup_defect / sup_f;
    res.z_n = std::move(f);
    return res;
}

// L^n f at a single configuration via explicit preimage recursion; an
// independent route used to cross-check table iteration and finite-volume
// duality.
inline double transfer_pullback(const PotentialEval& p, const TabulatedFunction& f, int n,
                                const Configuration& x) {
    if (n == 0) return f.eval(x);
    double total = 0.0;
    for (int s : {-1, +1}) {
        Configuration sx = x.prepended(s);
        total += std::exp(p.eval(sx)) * transfer_pullback(p, f, n - 1, sx);
    }
    return total;
}

// Q_n^{+-} = L^n(f)(+-1^inf) / L^n(1)(+-1^inf), n = 1..n_max.
struct QuotientSequences {
    std::vector<double> q_plus, q_minus;
};

inline QuotientSequences quotient_sequence(const PotentialEval& p, const TabulatedFunction& f, int n_max,
                                           const TransferOptions& opts = {}) {
    if (!is_increasing(f)) throw std::invalid_argument("quotient sequence requires increasing f");
    QuotientSequences out;
    for (int sign : {+1, -1}) {
        BoundaryTail tail = sign > 0 ? BoundaryTail::all_plus() : BoundaryTail::all_minus();
        TabulatedFunction num = f;
        num.completion = tail;
        TabulatedFunction den = TabulatedFunction::constant(1.0, tail);
        std::vector<double>& dst = sign > 0 ? out.q_plus : out.q_minus;
        for (int n = 1; n <= n_max; ++n) {
            num = transfer_apply(p, num, opts);
            den = transfer_apply(p, den, opts);
            double r = den.values[boundary_index(tail, den.depth)];
            for (double& v : num.values) v /= r;
            for (double& v : den.values) v /= r;
            dst.push_back(num.values[boundary_index(tail, num.depth)]);
        }
    }
    return out;
}

// Cesaro averages (1/n) sum_{j<n} lambda^{-j} (L^j phi_B)(z0) per cylinder
// support set B, plus a stability report over the final quartile.
struct CesaroMeasure {
    int sign = +1;
    int depth = 0;
    int iterations = 0;
    std::vector<std::set<int>> supports;
    std::vector<double> values;
    std::vector<double> last_quartile_variation;  // relative, per support
};

inline CesaroMeasure cesaro_measure(const PotentialEval& p, int sign, int n_iters,
                                    const std::vector<std::set<int>>& family, double lambda,
                                    const TransferOptions& opts = {}) {
    if (n_iters < 1) throw std::invalid_argument("cesaro average needs n_iters >= 1");
    if (!(lambda > 0.0)) throw std::invalid_argument("cesaro average needs lambda > 0");
    BoundaryTail tail = sign > 0 ? BoundaryTail::all_plus() : BoundaryTail::all_minus();
    CesaroMeasure out;
    out.sign = sign;
    out.iterations = n_iters;
    for (const auto& B : family) {
        TabulatedFunction f = phi_B_table(B, tail);
        std::vector<double> running;
        double sum = 0.0;
        double value = f.values[boundary_index(tail, f.depth)];
        sum += value;
        running.push_back(sum / 1.0);
        for (int j = 1; j < n_iters; ++j) {
            f = transfer_apply(p, f, opts);
            for (double& v : f.values) v /= lambda;
            value = f.values[boundary_index(tail, f.depth)];
            sum += value;
            running.push_back(sum / static_cast<double>(j + 1));
        }
        double avg = running.back();
        double denom = std::max(std::abs(avg), 1e-300);
        double var = 0.0;
        for (std::size_t m = running.size() - running.size() / 4; m < running.size(); ++m)
            var = std::max(var, std::abs(running[m] - avg) / denom);
        out.supports.push_back(B);
        out.values.push_back(avg);
        out.last_quartile_variation.push_back(var);
        out.depth = f.depth;
    }
    return out;
}

// Per-site magnetization gaps m_i^+ - m_i^- at volume n over a fixed site
// window; the max gap is the order-parameter proxy.
struct UniquenessDiagnostic {
    int n = 0;
    std::vector<int> sites;
    std::vector<double> m_plus, m_minus, gap;
    double max_gap = 0.0;
};

inline UniquenessDiagnostic uniqueness_diagnostic(const PotentialEval& p, int n,
                                                  const std::vector<int>& sites) {
    if (!class_E_check_ising(p))
        throw std::invalid_argument("uniqueness diagnostic requires a class-E certified potential");
    FiniteVolumeMeasure plus = build_measure(p, n, BoundaryTail::all_plus());
    FiniteVolumeMeasure minus = build_measure(p, n, BoundaryTail::all_minus());
    UniquenessDiagnostic d;
    d.n = n;
    d.sites = sites;
    for (int i : sites) {
        double mp = magnetization(plus, i), mm = magnetization(minus, i);
        d.m_plus.push_back(mp);
        d.m_minus.push_back(mm);
        d.gap.push_back(mp - mm);
        d.max_gap = std::max(d.max_gap, mp - mm);
    }
    return d;
}

// sup_w |L^n(1)(w with + tail) - L^n(1)(flip w with - tail)| for mirrored
// potentials; exact mirror symmetry makes this pure roundoff.
struct MirroredResidual {
    double residual = 0.0;
    double scale = 0.0;
};

inline MirroredResidual mirrored_symmetry_residual(const PotentialEval& p, int n,
                                                   const TransferOptions& opts = {}) {
    if (!is_mirrored(p, std::min(12, std::max(1, p.spec.truncation_K))))
        throw std::invalid_argument("mirrored symmetry check requires a mirrored potential");
    TabulatedFunction f_plus = TabulatedFunction::constant(1.0, BoundaryTail::all_plus());
    TabulatedFunction f_minus = TabulatedFunction::constant(1.0, BoundaryTail::all_minus());
    for (int k = 0; k < n; ++k) {
        f_plus = transfer_apply(p, f_plus, opts);
        f_minus = transfer_apply(p, f_minus, opts);
    }
    MirroredResidual r;
    std::size_t mask = f_plus.size() - 1;
    for (std::size_t w = 0; w < f_plus.size(); ++w) {
        r.residual = std::max(r.residual, std::abs(f_plus.values[w] - f_minus.values[~w & mask]));
        r.scale = std::max(r.scale, std::abs(f_plus.values[w]));
    }
    return r;
}

// Explicit eigenpair of the product-type potential: phi = exp(sum alpha_n x_n),
// alpha_n = beta*sc*sum_{j>n, j<=K} a_j, lambda = 2 cosh(alpha_0).
inline std::vector<double> explicit_alphas(const PotentialEval& p) {
    int K = p.spec.truncation_K;
    std::vector<double> alphas(static_cast<std::size_t>(K), 0.0);
    double acc = 0.0;
    for (int n = K - 1; n >= 0; --n) {
        acc += p.a[n];  // a_{n+1}
        alphas[static_cast<std::size_t>(n)] = p.spec.beta * p.spec.spin_scale * acc;
    }
    return alphas;
}

inline double phi_explicit(const std::vector<double>& alphas, const Configuration& c) {
    double e = 0.0;
    for (std::size_t n = alphas.size(); n-- > 0;) e += alphas[n] * c.spin(static_cast<long long>(n));
    return std::exp(e);
}

inline double lambda_explicit(const PotentialEval& p) {
    double s = 0.0;
    for (int j = p.spec.truncation_K; j >= 1; --j) s += p.a[j - 1];
    return 2.0 * std::cosh(p.spec.beta * p.spec.spin_scale * s);
}

// sup over sample configurations of |L(phi) - lambda phi| / sup|phi|.
inline double explicit_eigen_residual(const PotentialEval& p, const std::vector<Configuration>& samples) {
    std::vector<double> alphas = explicit_alphas(p);
    double lambda = lambda_explicit(p);
    double sup_defect = 0.0, sup_phi = 0.0;
    for (const Configuration& x : samples) {
        double lhs = 0.0;
        for (int s : {-1, +1}) {
            Configuration sx = x.prepended(s);
            lhs += std::exp(p.eval(sx)) * phi_explicit(alphas, sx);
        }
        double phi = phi_explicit(alphas, x);
        sup_defect = std::max(sup_defect, std::abs(lhs - lambda * phi));
        sup_phi = std::max(sup_phi, std::abs(phi));
    }
    return sup_defect / sup_phi;
}

// z_n table export: rows (t, z_value[, phi_explicit]) sorted by the [-1,1]
// embedding of each word under the table's completion.
inline void write_zn_csv(const TabulatedFunction& f, const std::string& path,
                         const std::vector<double>* alphas = nullptr) {
    std::vector<std::pair<double, std::size_t>> order(f.size());
    for (std::size_t w = 0; w < f.size(); ++w)
        order[w] = {embedding_t(Configuration(SpinWord(w, f.depth), f.completion)), w};
    std::sort(order.begin(), order.end());
    CsvWriter csv(path);
    if (alphas)
        csv.row({"t", "z_value", "phi_explicit"});
    else
        csv.row({"t", "z_value"});
    for (const auto& [t, w] : order) {
        if (alphas) {
            double phi = phi_explicit(*alphas, Configuration(SpinWord(w, f.depth), f.completion));
            csv.row({fmt_double(t), fmt_double(f.values[w]), fmt_double(phi)});
        } else {
            csv.row({fmt_double(t), fmt_double(f.values[w])});
        }
    }
}

inline nlohmann::ordered_json spectral_json(const SpectralEstimate& est, const std::vector<double>& ratios,
                                            double tail_bound) {
    nlohmann::ordered_json j;
    j["lambda"] = est.lambda;
    j["pressure"] = est.pressure;
    j["n_iters"] = est.iterations;
    j["residual"] = est.residual;
    j["ratio_sequence"] = ratios;
    j["tail_bound"] = tail_bound;
    return j;
}

}  // namespace ruelle
