#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "ruelle/spin_word.hpp"
#include "ruelle/tabulated.hpp"

using namespace ruelle;

namespace {

SpinWord word(std::initializer_list<int> spins) {
    SpinWord w(0, static_cast<int>(spins.size()));
    int j = 0;
    for (int s : spins) w = w.with_spin(j++, s);
    return w;
}

// Reference order check over every comparable pair, no flip shortcut.
bool increasing_all_pairs(const TabulatedFunction& f) {
    std::uint64_t size = std::uint64_t{1} << f.depth;
    for (std::uint64_t a = 0; a < size; ++a)
        for (std::uint64_t b = 0; b < size; ++b) {
            bool a_geq_b = (a & b) == b;
            if (a_geq_b && f.values[a] < f.values[b]) return false;
        }
    return true;
}

}  // namespace

TEST_CASE("coordinatewise comparison on equal-length words", "[space]") {
    CHECK(compare(word({+1, +1}), word({+1, -1})) == Ordering::GEQ);
    CHECK(compare(word({+1, -1}), word({-1, +1})) == Ordering::INCOMPARABLE);
    CHECK(compare(word({-1, -1}), word({-1, -1})) == Ordering::EQUAL);
    CHECK(compare(word({-1, -1}), word({+1, -1})) == Ordering::LEQ);
    CHECK_THROWS_MATCHES(compare(word({+1}), word({+1, +1})), std::invalid_argument,
                         Catch::Matchers::Message("incomparable lengths"));
}

TEST_CASE("comparison is a partial order on each fixed length", "[space]") {
    for (int n = 1; n <= 3; ++n) {
        std::uint64_t size = std::uint64_t{1} << n;
        std::vector<SpinWord> all;
        for (std::uint64_t v = 0; v < size; ++v) all.emplace_back(v, n);
        for (const SpinWord& a : all) CHECK(compare(a, a) == Ordering::EQUAL);
        for (const SpinWord& a : all)
            for (const SpinWord& b : all) {
                Ordering ab = compare(a, b), ba = compare(b, a);
                if (ab == Ordering::GEQ) CHECK(ba == Ordering::LEQ);
                if (ab == Ordering::EQUAL) CHECK(a.bits == b.bits);
                for (const SpinWord& c : all) {
                    bool ab_ge = ab == Ordering::GEQ || ab == Ordering::EQUAL;
                    Ordering bc = compare(b, c);
                    bool bc_ge = bc == Ordering::GEQ || bc == Ordering::EQUAL;
                    if (ab_ge && bc_ge) {
                        Ordering ac = compare(a, c);
                        CHECK((ac == Ordering::GEQ || ac == Ordering::EQUAL));
                    }
                }
            }
    }
}

TEST_CASE("cylinder indicator phi_B", "[space]") {
    Configuration x(word({+1, -1}), BoundaryTail::all_minus());
    CHECK(phi_indicator({0}, x) == 1.0);
    CHECK(phi_indicator({0, 1}, x) == 0.0);
    CHECK(phi_indicator({}, x) == 1.0);
    Configuration alt(word({+1, -1}), BoundaryTail::alternating(+1));
    CHECK(phi_indicator({0, 2}, alt) == 1.0);  // tail supplies x_2 = +1
    CHECK(phi_indicator({0, 3}, alt) == 0.0);
}

TEST_CASE("phi_B tables multiply like union of supports", "[space]") {
    BoundaryTail tail = BoundaryTail::all_plus();
    std::set<int> B{0, 2}, C{1, 2}, U{0, 1, 2};
    TabulatedFunction fB = phi_B_table(B, tail), fC = phi_B_table(C, tail), fU = phi_B_table(U, tail);
    int depth = std::max(fB.depth, std::max(fC.depth, fU.depth));
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << depth); ++v) {
        Configuration x(SpinWord(v, depth), tail);
        CHECK(fB.eval(x) * fC.eval(x) == fU.eval(x));
    }
}

TEST_CASE("monotone indicator enumeration matches Dedekind counts", "[space]") {
    const std::size_t expected[] = {3, 6, 20, 168};
    for (int n = 1; n <= 4; ++n) {
        std::vector<TabulatedFunction> fns = enumerate_monotone_indicators(n);
        CHECK(fns.size() == expected[n - 1]);
        bool has_zero = false, has_one = false;
        for (const TabulatedFunction& f : fns) {
            CHECK(is_increasing(f));
            bool all0 = true, all1 = true;
            for (double v : f.values) {
                all0 = all0 && v == 0.0;
                all1 = all1 && v == 1.0;
            }
            has_zero = has_zero || all0;
            has_one = has_one || all1;
        }
        CHECK(has_zero);
        CHECK(has_one);
    }
    CHECK_THROWS_MATCHES(enumerate_monotone_indicators(5), cap_error,
                         Catch::Matchers::Message("enumeration too large"));
}

TEST_CASE("is_increasing on the canonical examples", "[space]") {
    TabulatedFunction phi01 = phi_B_table({0, 1}, BoundaryTail::all_plus());
    CHECK(is_increasing(phi01));

    TabulatedFunction neg_x0(1, BoundaryTail::all_plus());
    for (std::uint64_t v = 0; v < 2; ++v)
        neg_x0.values[v] = -static_cast<double>(SpinWord(v, 1).spin(0));
    CHECK_FALSE(is_increasing(neg_x0));

    TabulatedFunction prod(2, BoundaryTail::all_plus());
    for (std::uint64_t v = 0; v < 4; ++v) {
        SpinWord w(v, 2);
        prod.values[v] = static_cast<double>(w.spin(0) * w.spin(1));
    }
    CHECK_FALSE(is_increasing(prod));  // flip (-1,-1) -> (+1,-1) drops 1 to -1
    MonotonicityWitness wit = is_increasing_witness(prod);
    REQUIRE_FALSE(wit.increasing);
    CHECK(prod.values[wit.hi.bits] < prod.values[wit.lo.bits]);
}

TEST_CASE("flip-based monotonicity test equals the all-pairs definition", "[space]") {
    for (int n = 1; n <= 3; ++n) {
        std::uint64_t size = std::uint64_t{1} << n;
        std::uint64_t masks = std::uint64_t{1} << size;
        for (std::uint64_t mask = 0; mask < masks; ++mask) {
            TabulatedFunction f(n, BoundaryTail::all_plus());
            for (std::uint64_t v = 0; v < size; ++v)
                f.values[v] = (mask >> v) & 1 ? 1.0 : 0.0;
            CHECK(is_increasing(f) == increasing_all_pairs(f));
        }
    }
}

TEST_CASE("products of increasing indicator functions stay increasing", "[space]") {
    std::vector<TabulatedFunction> fns = enumerate_monotone_indicators(3);
    for (const TabulatedFunction& f : fns)
        for (const TabulatedFunction& g : fns) {
            TabulatedFunction h(3, BoundaryTail::all_plus());
            for (std::size_t v = 0; v < h.values.size(); ++v)
                h.values[v] = f.values[v] * g.values[v];
            CHECK(is_increasing(h));
        }
}

TEST_CASE("boundary tails evaluate their defining rules", "[space]") {
    BoundaryTail plus = BoundaryTail::all_plus(), minus = BoundaryTail::all_minus();
    BoundaryTail alt = BoundaryTail::alternating(+1);
    BoundaryTail per = BoundaryTail::periodic(word({+1, -1, -1}));
    for (long long j = 0; j < 12; ++j) {
        CHECK(plus.at(j) == +1);
        CHECK(minus.at(j) == -1);
        CHECK(alt.at(j) == (j % 2 == 0 ? +1 : -1));
        int expect = (j % 3 == 0) ? +1 : -1;
        CHECK(per.at(j) == expect);
    }
    BoundaryTail shifted = per.shifted(2);
    for (long long j = 0; j < 12; ++j) CHECK(shifted.at(j) == per.at(j + 2));
    BoundaryTail alt_shift = alt.shifted(3);
    for (long long j = 0; j < 12; ++j) CHECK(alt_shift.at(j) == alt.at(j + 3));
    BoundaryTail with = plus.with_override(4, -1);
    CHECK(with.at(4) == -1);
    CHECK(with.at(5) == +1);
}

TEST_CASE("configurations shift and prepend consistently", "[space]") {
    Configuration x(word({+1, -1, +1}), BoundaryTail::alternating(-1));
    Configuration shifted = x.shifted_once();
    for (long long j = 0; j < 10; ++j) CHECK(shifted.spin(j) == x.spin(j + 1));
    Configuration pre = x.prepended(-1);
    CHECK(pre.spin(0) == -1);
    for (long long j = 0; j < 10; ++j) CHECK(pre.spin(j + 1) == x.spin(j));
    Configuration flip = x.flipped();
    for (long long j = 0; j < 10; ++j) CHECK(flip.spin(j) == -x.spin(j));
}
