#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ruelle/gibbs.hpp"
#include "ruelle/kernel.hpp"
#include "ruelle/parallel.hpp"
#include "ruelle/potential.hpp"
#include "ruelle/random.hpp"
#include "ruelle/serialize.hpp"
#include "ruelle/spin_word.hpp"
#include "ruelle/tabulated.hpp"
#include "ruelle/transfer.hpp"

using namespace ruelle;
using nlohmann::ordered_json;

namespace {

struct RunConfig {
    std::string potential;  // inline JSON or path to a JSON file
    double gamma = 3.0;
    double beta = 1.0;
    double field = 0.0;
    int truncation = 32;
    int volume = 12;
    int iters = 0;  // per-command default applied after parsing
    std::string boundary = "plus";
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, RunConfig& cfg, const std::string& default_out, int default_iters) {
    cfg.out = default_out;
    cfg.iters = default_iters;
    cmd->add_option("--potential", cfg.potential,
                    "potential as inline JSON or a path to a JSON file (overrides the flags below)");
    cmd->add_option("--gamma", cfg.gamma, "power-law coupling exponent");
    cmd->add_option("--beta", cfg.beta, "inverse temperature");
    cmd->add_option("--field", cfg.field, "external field");
    cmd->add_option("--truncation", cfg.truncation, "number of coupling terms retained");
    cmd->add_option("--volume", cfg.volume, "volume / table depth / quadrature depth");
    cmd->add_option("--iters", cfg.iters, "iteration or sample count");
    cmd->add_option("--boundary", cfg.boundary, "boundary tail: plus, minus, alt, or word:<+- string>");
    cmd->add_option("--seed", cfg.seed, "root seed for randomized runs");
    cmd->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
    cmd->add_option("--out", cfg.out, "output artifact path");
    cmd->add_option("--format", cfg.format, "artifact format: csv or json");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read potential file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

CouplingSpec build_spec(const RunConfig& cfg) {
    if (!cfg.potential.empty()) {
        std::string text = cfg.potential.front() == '{' ? cfg.potential : read_file(cfg.potential);
        return coupling_spec_from_json(nlohmann::json::parse(text));
    }
    return CouplingSpec::dyson(cfg.gamma, cfg.beta, cfg.field, cfg.truncation);
}

BoundaryTail parse_boundary(const std::string& s) {
    if (s == "plus") return BoundaryTail::all_plus();
    if (s == "minus") return BoundaryTail::all_minus();
    if (s == "alt") return BoundaryTail::alternating(+1);
    if (s.rfind("word:", 0) == 0) return BoundaryTail::periodic(SpinWord::parse(s.substr(5)));
    throw std::invalid_argument("unknown boundary: " + s + " (use plus, minus, alt, word:<+- string>)");
}

void apply_threads(const RunConfig& cfg) {
    if (cfg.threads > 0) set_worker_count(cfg.threads);
}

// out.csv -> out.json (sibling artifact for commands that emit both).
std::string json_sibling(const std::string& out) {
    if (out.size() > 4 && out.compare(out.size() - 4, 4, ".csv") == 0)
        return out.substr(0, out.size() - 4) + ".json";
    return out + ".json";
}

std::string values_bitstring(const TabulatedFunction& f) {
    std::string s;
    s.reserve(f.size());
    for (double v : f.values) s.push_back(v >= 0.5 ? '1' : '0');
    return s;
}

// A monotone indicator is a cylinder function iff its support is the up-set
// of a single mask (phi_B with B = that mask); the constant 1 is phi_empty.
bool is_cylinder_indicator(const TabulatedFunction& f) {
    std::uint64_t mask = 0;
    bool any = false;
    for (std::size_t w = 0; w < f.size(); ++w)
        if (f.values[w] >= 0.5) {
            mask = any ? (mask & w) : w;
            any = true;
        }
    if (!any) return false;
    for (std::size_t w = 0; w < f.size(); ++w)
        if ((f.values[w] >= 0.5) != ((w & mask) == mask)) return false;
    return true;
}

int cmd_fkg_verify(const RunConfig& cfg) {
    PotentialEval p(build_spec(cfg));
    int n_max = std::min(cfg.volume, 4);
    if (n_max < 1) throw std::invalid_argument("fkg-verify needs --volume >= 1");
    const std::vector<std::pair<std::string, BoundaryTail>> tails = {
        {"plus", BoundaryTail::all_plus()},
        {"minus", BoundaryTail::all_minus()},
        {"alt", BoundaryTail::alternating(+1)}};

    CsvWriter csv(cfg.out);
    csv.row({"n", "boundary", "pair_class", "min_covariance", "witness_f", "witness_g"});
    double global_min = 0.0;
    std::size_t pair_count = 0;
    bool violated = false;
    for (int n = 1; n <= n_max; ++n) {
        std::vector<TabulatedFunction> fns = enumerate_monotone_indicators(n);
        std::vector<std::string> cls(fns.size());
        for (std::size_t i = 0; i < fns.size(); ++i)
            cls[i] = is_cylinder_indicator(fns[i]) ? "cylinder" : "monotone";
        for (const auto& [tail_name, tail] : tails) {
            FiniteVolumeMeasure m = build_measure(p, n, tail);
            std::vector<double> ef(fns.size(), 0.0);
            for (std::size_t i = 0; i < fns.size(); ++i)
                for (std::size_t w = 0; w < m.size(); ++w)
                    ef[i] += m.weights[w] * fns[i].values[w];
            struct ClassStat {
                double min_cov = 1e300;
                std::size_t wf = 0, wg = 0;
            };
            std::map<std::string, ClassStat> stats;
            for (std::size_t i = 0; i < fns.size(); ++i)
                for (std::size_t j = i; j < fns.size(); ++j) {
                    double efg = 0.0;
                    for (std::size_t w = 0; w < m.size(); ++w)
                        efg += m.weights[w] * fns[i].values[w] * fns[j].values[w];
                    double cov = efg - ef[i] * ef[j];
                    std::string key = cls[i] <= cls[j] ? cls[i] + "-" + cls[j] : cls[j] + "-" + cls[i];
                    ClassStat& st = stats[key];
                    if (cov < st.min_cov) {
                        st.min_cov = cov;
                        st.wf = i;
                        st.wg = j;
                    }
                    global_min = std::min(global_min, cov);
                    ++pair_count;
                }
            for (const auto& [key, st] : stats) {
                bool bad = st.min_cov < -1e-12;
                violated = violated || bad;
                csv.row({std::to_string(n), tail_name, key, fmt_double(st.min_cov),
                         bad ? values_bitstring(fns[st.wf]) : "",
                         bad ? values_bitstring(fns[st.wg]) : ""});
            }
        }
    }
    std::printf("fkg-verify: %zu pairs checked up to n=%d, min covariance %.17g -> %s\n", pair_count,
                n_max, global_min, violated ? "VIOLATION" : "ok");
    return violated ? 2 : 0;
}

int cmd_eigen_approx(const RunConfig& cfg) {
    if (cfg.iters < 1) throw std::invalid_argument("eigen-approx needs --iters >= 1");
    if (cfg.iters > 12) throw cap_error("iteration cap exceeded: eigen-approx allows --iters <= 12");
    PotentialEval p(build_spec(cfg));
    BoundaryTail z0 = parse_boundary(cfg.boundary);

    PowerIterateResult res = power_iterate(p, cfg.iters, z0);
    TabulatedFunction z_prev = cfg.iters >= 2 ? power_iterate(p, cfg.iters - 1, z0).z_n
                                              : TabulatedFunction::constant(1.0, z0);
    double sup_diff = 0.0;
    for (std::size_t w = 0; w < res.z_n.size(); ++w) {
        double prev = cfg.iters >= 2 ? z_prev.values[w] : 1.0;
        sup_diff = std::max(sup_diff, std::abs(res.z_n.values[w] - prev));
    }

    bool product = p.spec.kind == PotentialKind::ProductType;
    std::vector<double> alphas = product ? explicit_alphas(p) : std::vector<double>{};
    std::vector<std::pair<double, std::size_t>> order(res.z_n.size());
    for (std::size_t w = 0; w < res.z_n.size(); ++w)
        order[w] = {embedding_t(Configuration(SpinWord(w, res.z_n.depth), z0)), w};
    std::sort(order.begin(), order.end());

    CsvWriter csv(cfg.out);
    if (product)
        csv.row({"t", "z_value", "z_prev", "phi_explicit"});
    else
        csv.row({"t", "z_value", "z_prev"});
    for (const auto& [t, w] : order) {
        double prev = cfg.iters >= 2 ? z_prev.values[w] : 1.0;
        if (product) {
            double phi = phi_explicit(alphas, Configuration(SpinWord(w, res.z_n.depth), z0));
            csv.row({fmt_double(t), fmt_double(res.z_n.values[w]), fmt_double(prev), fmt_double(phi)});
        } else {
            csv.row({fmt_double(t), fmt_double(res.z_n.values[w]), fmt_double(prev)});
        }
    }

    ordered_json j = spectral_json(res.estimate, res.ratios, p.tail_bound());
    j["sup_diff_last_two"] = sup_diff;
    j["boundary"] = cfg.boundary;
    j["potential"] = to_json(p.spec);
    write_json_file(j, json_sibling(cfg.out));

    std::printf("eigen-approx: n=%d lambda %.17g pressure %.17g residual %.3g sup|z_n-z_{n-1}| %.3g\n",
                res.estimate.iterations, res.estimate.lambda, res.estimate.pressure,
                res.estimate.residual, sup_diff);
    return 0;
}

int cmd_pressure(const RunConfig& cfg) {
    if (cfg.iters < 1) throw std::invalid_argument("pressure needs --iters >= 1");
    PotentialEval p(build_spec(cfg));
    if (p.spec.rule.kind != CouplingRule::Kind::PowerLaw)
        throw std::invalid_argument("pressure bound requires a power-law potential");
    PowerIterateOptions opts;
    opts.early_stop = true;
    PowerIterateResult res = power_iterate(p, cfg.iters, BoundaryTail::all_plus(), opts);
    PressureBound bound = pressure_upper_bound(p.spec.rule.gamma, p.spec.beta);

    ordered_json j;
    j["pressure_estimate"] = res.estimate.pressure;
    j["upper_bound"] = bound.bound;
    j["margin"] = bound.bound - res.estimate.pressure;
    j["gamma"] = bound.gamma;
    j["beta"] = bound.beta;
    j["K"] = bound.K;
    j["lambda"] = res.estimate.lambda;
    j["iterations"] = res.estimate.iterations;
    j["residual"] = res.estimate.residual;
    j["truncation_K"] = p.spec.truncation_K;
    j["coupling_tail_bound"] = p.tail_bound();
    j["zeta_partial"] = bound.zeta_partial;
    j["zeta_tail_bound"] = bound.zeta_tail_bound;
    write_json_file(j, cfg.out);

    std::printf("pressure: estimate %.17g bound %.17g margin %.17g (%d iterations)\n",
                res.estimate.pressure, bound.bound, bound.bound - res.estimate.pressure,
                res.estimate.iterations);
    return 0;
}

int cmd_phase(const RunConfig& cfg) {
    PotentialEval p(build_spec(cfg));
    int n_max = std::min(cfg.volume, 20);
    if (n_max < 4) throw std::invalid_argument("phase needs --volume >= 4");
    std::vector<int> sites = {0, 1, 2, 3};

    CsvWriter csv(cfg.out);
    csv.row({"n", "site", "m_plus", "m_minus", "gap"});
    bool violated = false;
    double last_max_gap = 0.0;
    std::string trend;
    for (int n = 4; n <= n_max; ++n) {
        UniquenessDiagnostic d = uniqueness_diagnostic(p, n, sites);
        for (std::size_t k = 0; k < sites.size(); ++k) {
            csv.row({std::to_string(n), std::to_string(sites[k]), fmt_double(d.m_plus[k]),
                     fmt_double(d.m_minus[k]), fmt_double(d.gap[k])});
            if (d.gap[k] < -1e-12) violated = true;
        }
        last_max_gap = d.max_gap;
        char tbuf[48];
        std::snprintf(tbuf, sizeof(tbuf), "%s%.6g", trend.empty() ? "" : " ", d.max_gap);
        trend += tbuf;
    }
    std::printf("phase: max gap per n = %s; final max gap %.17g -> %s\n", trend.c_str(), last_max_gap,
                violated ? "DOMINATION VIOLATION" : "ok");
    return violated ? 2 : 0;
}

int cmd_kernel_eigen(const RunConfig& cfg) {
    PotentialEval p(build_spec(cfg));
    KernelSpec kernel = KernelSpec::from(p);
    bool product = p.spec.kind == PotentialKind::ProductType;
    PotentialEval dual = product ? dual_product_potential(p) : p;
    int depth = std::min(cfg.volume, 16);
    if (depth < 2) throw std::invalid_argument("kernel-eigen needs --volume >= 2");
    ExactCylinderQuadrature quad = ExactCylinderQuadrature::build(dual, depth);

    BoundaryTail x_tail = parse_boundary(cfg.boundary);
    const int x_len = 12;
    std::vector<Configuration> xs;
    for (int i = 0; i < 256; ++i) {
        SplitMix64 rng = substream(cfg.seed, static_cast<std::uint64_t>(i));
        xs.emplace_back(SpinWord(rng.next_u64() & ((std::uint64_t{1} << x_len) - 1), x_len), x_tail);
    }

    struct Row {
        double t, phi;
        const char* kind;
        long long scale;
    };
    std::vector<Row> rows;
    for (const Configuration& x : xs)
        rows.push_back({embedding_t(x), kernel_eigenfunction(kernel, x, quad), "exact", depth});
    double mc_vs_exact = 0.0;
    if (product) {
        std::size_t samples = cfg.iters >= 1 ? static_cast<std::size_t>(cfg.iters) : 100000;
        MonteCarloQuadrature mc = MonteCarloQuadrature::build(kernel, samples, cfg.seed);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double v = kernel_eigenfunction(kernel, xs[i], mc);
            mc_vs_exact = std::max(mc_vs_exact, std::abs(v / rows[i].phi - 1.0));
            rows.push_back({rows[i].t, v, "mc", static_cast<long long>(samples)});
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        int ka = std::string_view(a.kind) == "exact" ? 0 : 1;
        int kb = std::string_view(b.kind) == "exact" ? 0 : 1;
        return ka != kb ? ka < kb : a.t < b.t;
    });

    CsvWriter csv(cfg.out);
    csv.row({"t_embedding", "phi_value", "quadrature_kind", "depth_or_samples"});
    for (const Row& r : rows)
        csv.row({fmt_double(r.t), fmt_double(r.phi), r.kind, std::to_string(r.scale)});

    if (product)
        std::printf("kernel-eigen: 256 points, exact depth %d, mc max |ratio-1| %.3g\n", depth,
                    mc_vs_exact);
    else
        std::printf("kernel-eigen: 256 points, exact depth %d\n", depth);
    return 0;
}

int cmd_binary(const RunConfig& cfg) {
    const int grid_n = 2048;
    double c = BinaryModel::c();
    auto lphi = [](double t) { return BinaryModel::apply(BinaryModel::phi, t); };

    CsvWriter csv(cfg.out);
    csv.row({"t", "c_phi", "L_phi"});
    double sup_gap = 0.0;
    for (int i = 0; i < grid_n; ++i) {
        double t = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(grid_n - 1);
        double a = c * BinaryModel::phi(t), b = lphi(t);
        sup_gap = std::max(sup_gap, std::abs(a - b));
        csv.row({fmt_double(t), fmt_double(a), fmt_double(b)});
    }

    std::array<double, 3> taylor = BinaryModel::taylor_at_zero(lphi);
    std::array<double, 3> target = {c * BinaryModel::phi(0.0), 0.0, c * 0.75};
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(taylor[k] - target[k]));
    std::printf(
        "binary: sup|c phi - L phi| %.6g on [-1,1]; taylor at 0 (%.12g, %.3g, %.12g) vs c*(phi "
        "coefficients), max coefficient gap %.3g\n",
        sup_gap, taylor[0], taylor[1], taylor[2], worst);
    return 0;
}

int cmd_class_check(const RunConfig& cfg) {
    PotentialEval p(build_spec(cfg));
    int m = std::min(std::max(cfg.volume, 1), 12);

    ordered_json j;
    j["kind"] = kind_name(p.spec.kind);
    j["depth"] = m;
    bool applicable = p.ising_like();
    j["class_E_applicable"] = applicable;
    j["class_E"] = applicable ? ordered_json(class_E_check_ising(p)) : ordered_json(nullptr);
    ClassFResult f = class_F_check(p, m);
    j["class_F"] = {{"in_class", f.in_class},
                    {"l_one_increasing", f.l_one_increasing},
                    {"l_cylinder_increasing", f.l_cylinder_increasing}};
    if (!f.in_class) {
        j["class_F"]["witness_lo"] = f.witness_lo.to_string();
        j["class_F"]["witness_hi"] = f.witness_hi.to_string();
    }
    j["mirrored"] = is_mirrored(p, m);
    write_json_file(j, cfg.out);

    std::printf("class-check: class_E %s, class_F %s, mirrored %s (depth %d)\n",
                applicable ? (class_E_check_ising(p) ? "true" : "false") : "n/a",
                f.in_class ? "true" : "false", j["mirrored"].get<bool>() ? "true" : "false", m);
    return 0;
}

int cmd_potential_graph(const RunConfig& cfg, double gamma_compare) {
    PotentialEval p(build_spec(cfg));
    bool compare = gamma_compare > 0.0;
    PotentialEval q = compare ? PotentialEval(CouplingSpec::dyson(gamma_compare, p.spec.beta, p.spec.h,
                                                                  p.spec.truncation_K))
                              : p;
    int depth = std::min(cfg.volume, 20);
    BoundaryTail tail = parse_boundary(cfg.boundary);

    std::vector<std::pair<double, std::size_t>> order(std::size_t{1} << depth);
    for (std::size_t w = 0; w < order.size(); ++w)
        order[w] = {embedding_t(Configuration(SpinWord(w, depth), tail)), w};
    std::sort(order.begin(), order.end());

    CsvWriter csv(cfg.out);
    if (compare)
        csv.row({"t", "a_value", "a_value_2"});
    else
        csv.row({"t", "a_value"});
    for (const auto& [t, w] : order) {
        Configuration x(SpinWord(w, depth), tail);
        if (compare)
            csv.row({fmt_double(t), fmt_double(p.eval(x)), fmt_double(q.eval(x))});
        else
            csv.row({fmt_double(t), fmt_double(p.eval(x))});
    }
    std::printf("potential-graph: %zu points at depth %d%s\n", order.size(), depth,
                compare ? " (two exponents)" : "");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-volume Gibbs measures, transfer-operator iteration, and involution-kernel "
                 "eigenfunctions for long-range spin chains"};
    app.require_subcommand(1);

    RunConfig fkg_cfg, eigen_cfg, pressure_cfg, phase_cfg, kernel_cfg, binary_cfg, class_cfg, graph_cfg;
    double gamma_compare = 0.0;

    CLI::App* fkg = app.add_subcommand("fkg-verify", "covariance sign check over all monotone pairs");
    add_common(fkg, fkg_cfg, "fkg_report.csv", 0);
    fkg_cfg.volume = 4;

    CLI::App* eigen = app.add_subcommand("eigen-approx", "transfer iterates z_n and eigenvalue estimate");
    add_common(eigen, eigen_cfg, "zn.csv", 7);

    CLI::App* pressure = app.add_subcommand("pressure", "pressure estimate against the product bound");
    add_common(pressure, pressure_cfg, "pressure.json", 200);

    CLI::App* phase = app.add_subcommand("phase", "boundary magnetization gaps over growing volumes");
    add_common(phase, phase_cfg, "phase.csv", 0);
    phase_cfg.volume = 14;
    phase_cfg.gamma = 2.5;

    CLI::App* kernel = app.add_subcommand("kernel-eigen", "eigenfunction via the involution kernel");
    add_common(kernel, kernel_cfg, "kernel_eigen.csv", 100000);

    CLI::App* binary = app.add_subcommand("binary", "interval operator of the binary potential");
    add_common(binary, binary_cfg, "binary.csv", 0);

    CLI::App* classes = app.add_subcommand("class-check", "membership checks for the potential classes");
    add_common(classes, class_cfg, "class_check.json", 0);

    CLI::App* graph = app.add_subcommand("potential-graph", "potential values over the interval embedding");
    add_common(graph, graph_cfg, "potential.csv", 0);
    graph->add_option("--gamma-compare", gamma_compare, "second power-law exponent as an extra column");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 4;
    }

    try {
        if (fkg->parsed()) {
            apply_threads(fkg_cfg);
            return cmd_fkg_verify(fkg_cfg);
        }
        if (eigen->parsed()) {
            apply_threads(eigen_cfg);
            return cmd_eigen_approx(eigen_cfg);
        }
        if (pressure->parsed()) {
            apply_threads(pressure_cfg);
            return cmd_pressure(pressure_cfg);
        }
        if (phase->parsed()) {
            apply_threads(phase_cfg);
            return cmd_phase(phase_cfg);
        }
        if (kernel->parsed()) {
            apply_threads(kernel_cfg);
            return cmd_kernel_eigen(kernel_cfg);
        }
        if (binary->parsed()) {
            apply_threads(binary_cfg);
            return cmd_binary(binary_cfg);
        }
        if (classes->parsed()) {
            apply_threads(class_cfg);
            return cmd_class_check(class_cfg);
        }
        if (graph->parsed()) {
            apply_threads(graph_cfg);
            return cmd_potential_graph(graph_cfg, gamma_compare);
        }
    } catch (const cap_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 4;
}
