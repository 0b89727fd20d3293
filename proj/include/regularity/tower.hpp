#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace reg {

// t_0(x) = x, t_{i+1}(x) = 2^{t_i(x)}. Saturates to +inf on overflow.
inline double tower(int i, double x) {
    if (i < 0) throw std::invalid_argument("tower: negative height");
    double v = x;
    for (int k = 0; k < i; ++k) {
        if (v > 1024.0) return std::numeric_limits<double>::infinity();
        v = std::exp2(v);
    }
    return v;
}

// log* x = 0 if x <= 1, else 1 + log*(log2 x).
inline int iterated_log(double x) {
    int c = 0;
    while (x > 1.0) {
        x = std::log2(x);
        ++c;
        if (c > 1024) throw std::logic_error("iterated_log: runaway");
    }
    return c;
}

// Exact value for the tower/wowzer bookkeeping. Every value in these
// recursions is a power of two, so we store the exponent when it fits and
// fall back to a height descriptor when it does not.
struct TowerValue {
    bool materialized = false;
    std::uint64_t log2 = 0;        // value = 2^log2 when materialized
    std::uint64_t tower_height = 0;  // descriptor otherwise: a tower of this height

    // Exact decimal digits; only for materialized values of moderate size.
    std::string decimal() const {
        if (!materialized || log2 > (1u << 20)) return {};
        std::vector<std::uint32_t> limbs{1};  // base 1e9
        for (std::uint64_t b = 0; b < log2; ++b) {
            std::uint32_t carry = 0;
            for (auto& l : limbs) {
                std::uint64_t v = 2ULL * l + carry;
                l = static_cast<std::uint32_t>(v % 1000000000ULL);
                carry = static_cast<std::uint32_t>(v / 1000000000ULL);
            }
            if (carry) limbs.push_back(carry);
        }
        std::string out = std::to_string(limbs.back());
        for (auto it = limbs.rbegin() + 1; it != limbs.rend(); ++it) {
            std::string part = std::to_string(*it);
            out += std::string(9 - part.size(), '0') + part;
        }
        return out;
    }

    std::string describe() const {
        if (materialized) return "2^" + std::to_string(log2);
        return "tower of height " + std::to_string(tower_height);
    }
};

// T(1) = 2, T(n) = 2^{T(n-1)}.
inline TowerValue tower_int(int n, std::uint64_t log2_cap = (1ULL << 20)) {
    if (n < 1) throw std::invalid_argument("tower_int: n < 1");
    TowerValue v{true, 1, 0};  // T(1) = 2 = 2^1
    for (int k = 2; k <= n; ++k) {
        if (!v.materialized || v.log2 > log2_cap) {
            return TowerValue{false, 0, static_cast<std::uint64_t>(n)};
        }
        // T(k) = 2^{T(k-1)}: the exponent is the previous value
        std::uint64_t prev_value_log2 = v.log2;
        if (prev_value_log2 >= 64) return TowerValue{false, 0, static_cast<std::uint64_t>(n)};
        v.log2 = 1ULL << prev_value_log2;
    }
    return v;
}

// W(1) = 2, W(n) = T(W(n-1)).
inline TowerValue wowzer(int n) {
    if (n < 1) throw std::invalid_argument("wowzer: n < 1");
    TowerValue v{true, 1, 0};  // W(1) = 2
    for (int k = 2; k <= n; ++k) {
        if (!v.materialized || v.log2 >= 63) return TowerValue{false, 0, 0};
        std::uint64_t arg = 1ULL << v.log2;  // W(k-1) as an integer
        if (arg > 1000000) {
            // W(k) = T(huge): a tower of that height
            return TowerValue{false, 0, arg};
        }
        TowerValue t = tower_int(static_cast<int>(arg));
        if (!t.materialized) return TowerValue{false, 0, arg};
        v = t;
    }
    return v;
}

// log* of an exact power of two.
inline int iterated_log(const TowerValue& v) {
    if (!v.materialized) throw std::invalid_argument("iterated_log: value not materialized");
    if (v.log2 == 0) return 0;  // value 1
    // one log yields the exponent, then continue on a plain integer
    int c = 1;
    double x = static_cast<double>(v.log2);
    return c + iterated_log(x);
}

}  // namespace reg
