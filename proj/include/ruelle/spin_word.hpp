#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ruelle {

// Resource-limit violation (volume/depth/enumeration caps). Kept as a
// distinct type so callers can map it to a dedicated exit code.
struct cap_error : std::runtime_error {
    explicit cap_error(const std::string& what) : std::runtime_error(what) {}
};

enum class Ordering { GEQ, LEQ, EQUAL, INCOMPARABLE };

// Finite prefix (x_0, ..., x_{n-1}) of +-1 spins, bit-packed: bit j is
// (x_j + 1) / 2, so word enumeration order is ascending integer order.
struct SpinWord {
    std::uint64_t bits = 0;
    int len = 0;

    SpinWord() = default;
    SpinWord(std::uint64_t b, int n) : bits(b), len(n) {
        if (n < 0 || n > 48) throw std::invalid_argument("spin word length out of range");
        if (n < 64) bits &= (std::uint64_t{1} << n) - 1;
    }

    static SpinWord from_spins(const std::vector<int>& spins) {
        SpinWord w(0, static_cast<int>(spins.size()));
        for (std::size_t j = 0; j < spins.size(); ++j) {
            if (spins[j] != 1 && spins[j] != -1) throw std::invalid_argument("spins must be +-1");
            if (spins[j] == 1) w.bits |= std::uint64_t{1} << j;
        }
        return w;
    }

    int spin(int j) const { return (bits >> j) & 1 ? +1 : -1; }

    SpinWord flipped() const { return SpinWord(~bits, len); }

    SpinWord with_spin(int j, int s) const {
        SpinWord w = *this;
        if (s == 1)
            w.bits |= std::uint64_t{1} << j;
        else
            w.bits &= ~(std::uint64_t{1} << j);
        return w;
    }

    SpinWord prepended(int s) const {
        SpinWord w((bits << 1) | (s == 1 ? 1u : 0u), len + 1);
        return w;
    }

    // Compact form, one char per coordinate: '+' or '-'.
    std::string to_string() const {
        std::string out;
        out.reserve(static_cast<std::size_t>(len));
        for (int j = 0; j < len; ++j) out.push_back(spin(j) == 1 ? '+' : '-');
        return out;
    }

    static SpinWord parse(const std::string& s) {
        SpinWord w(0, static_cast<int>(s.size()));
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (s[j] == '+')
                w.bits |= std::uint64_t{1} << j;
            else if (s[j] != '-')
                throw std::invalid_argument("spin string must contain only '+' and '-'");
        }
        return w;
    }

    bool operator==(const SpinWord& o) const { return bits == o.bits && len == o.len; }
};

// Coordinatewise partial order; defined only between words of equal length.
inline Ordering compare(const SpinWord& a, const SpinWord& b) {
    if (a.len != b.len) throw std::invalid_argument("incomparable lengths");
    if (a.bits == b.bits) return Ordering::EQUAL;
    bool geq = (a.bits & b.bits) == b.bits;  // every +1 of b is a +1 of a
    bool leq = (a.bits & b.bits) == a.bits;
    if (geq) return Ordering::GEQ;
    if (leq) return Ordering::LEQ;
    return Ordering::INCOMPARABLE;
}

// Infinite tail y_j, j >= 0, evaluated at absolute indices. Overrides allow
// pointwise surgery ([y|t|y]_n style configurations).
struct BoundaryTail {
    enum class Kind { AllPlus, AllMinus, Alternating, Periodic };

    Kind kind = Kind::AllPlus;
    int alt_sign = +1;           // Alternating: y_j = alt_sign * (-1)^j
    SpinWord period;             // Periodic: y_j = period.spin((j + phase) mod len)
    int phase = 0;
    std::vector<std::pair<long long, int>> overrides;  // (absolute index, spin)

    static BoundaryTail all_plus() { return BoundaryTail{}; }
    static BoundaryTail all_minus() {
        BoundaryTail t;
        t.kind = Kind::AllMinus;
        return t;
    }
    static BoundaryTail alternating(int start_sign = +1) {
        BoundaryTail t;
        t.kind = Kind::Alternating;
        t.alt_sign = start_sign;
        return t;
    }
    static BoundaryTail periodic(SpinWord word) {
        if (word.len < 1) throw std::invalid_argument("periodic tail needs a nonempty word");
        BoundaryTail t;
        t.kind = Kind::Periodic;
        t.period = word;
        return t;
    }

    int base_at(long long j) const {
        switch (kind) {
            case Kind::AllPlus: return +1;
            case Kind::AllMinus: return -1;
            case Kind::Alternating: return (j % 2 == 0) ? alt_sign : -alt_sign;
            case Kind::Periodic: {
                long long p = period.len;
                long long idx = (j + phase) % p;
                if (idx < 0) idx += p;
                return period.spin(static_cast<int>(idx));
            }
        }
        return +1;
    }

    int at(long long j) const {
        for (const auto& ov : overrides)
            if (ov.first == j) return ov.second;
        return base_at(j);
    }

    BoundaryTail with_override(long long j, int spin) const {
        BoundaryTail t = *this;
        t.overrides.emplace_back(j, spin);
        return t;
    }

    // Tail of the shifted configuration: at'(j) = at(j + k). Negative k
    // arises when prepending symbols.
    BoundaryTail shifted(long long k) const {
        BoundaryTail t = *this;
        if (kind == Kind::Alternating && (k % 2 != 0)) t.alt_sign = -t.alt_sign;
        if (kind == Kind::Periodic) {
            long long p = period.len;
            t.phase = static_cast<int>((((phase + k) % p) + p) % p);
        }
        t.overrides.clear();
        for (const auto& ov : overrides)
            if (ov.first - k >= 0) t.overrides.emplace_back(ov.first - k, ov.second);
        return t;
    }

    BoundaryTail flipped() const {
        BoundaryTail t = *this;
        if (kind == Kind::AllPlus)
            t.kind = Kind::AllMinus;
        else if (kind == Kind::AllMinus)
            t.kind = Kind::AllPlus;
        else if (kind == Kind::Alternating)
            t.alt_sign = -alt_sign;
        else
            t.period = period.flipped();
        for (auto& ov : t.overrides) ov.second = -ov.second;
        return t;
    }
};

// [x|y]_n: word prefix plus tail, the tail evaluated at absolute indices
// (coordinate j >= word.len reads y_j, not y_{j - word.len}).
struct Configuration {
    SpinWord word;
    BoundaryTail tail;

    Configuration() = default;
    Configuration(SpinWord w, BoundaryTail t) : word(w), tail(std::move(t)) {}

    static Configuration pure(BoundaryTail t) { return Configuration(SpinWord(), std::move(t)); }

    int spin(long long j) const {
        return j < word.len ? word.spin(static_cast<int>(j)) : tail.at(j);
    }

    Configuration shifted_once() const {
        if (word.len > 0) {
            Configuration c(SpinWord(word.bits >> 1, word.len - 1), tail.shifted(1));
            return c;
        }
        return Configuration(word, tail.shifted(1));
    }

    Configuration prepended(int s) const {
        return Configuration(word.prepended(s), tail.shifted(-1));
    }

    Configuration flipped() const { return Configuration(word.flipped(), tail.flipped()); }
};

}  // namespace ruelle
