#pragma once

// Exact arithmetic used throughout the library: arbitrary-precision
// integers and rationals, and certified rational intervals.  No value
// is ever rounded to floating point on a verification path.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <stdexcept>
#include <string>

namespace specmult {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int int_lcm(const Int& a, const Int& b) {
    if (a == 0 || b == 0) return 0;
    return boost::multiprecision::abs(a / boost::multiprecision::gcd(a, b) * b);
}

inline long to_long(const Int& v) {
    return v.convert_to<long>();
}

inline std::string to_string(const Int& v) { return v.str(); }

/// Rational rendered as "p" or "p/q" with q > 0.
inline std::string to_string(const Rat& v) {
    const Int num = boost::multiprecision::numerator(v);
    const Int den = boost::multiprecision::denominator(v);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

inline double to_double(const Rat& v) { return v.convert_to<double>(); }

/// Parse "p" or "p/q".  Throws std::invalid_argument on malformed input.
inline Rat parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(s));
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rat(num, den);
    } catch (const std::runtime_error&) {
        throw std::invalid_argument("malformed rational: " + s);
    }
}

/// Closed rational interval [lo, hi] certified to contain an exact value.
/// `level` records the (C,F) conditioning level the bounds were derived at;
/// -1 means the bounds are unconditional.
struct Interval {
    Rat lo{0};
    Rat hi{0};
    long level = -1;

    Interval() = default;
    Interval(Rat v, long lvl = -1) : lo(v), hi(std::move(v)), level(lvl) {}
    Interval(Rat l, Rat h, long lvl = -1)
        : lo(std::move(l)), hi(std::move(h)), level(lvl) {
        if (lo > hi) throw std::invalid_argument("Interval: lo > hi");
    }

    static Interval point(const Rat& v, long lvl = -1) { return Interval(v, v, lvl); }

    Rat width() const { return hi - lo; }
    Rat mid() const { return (lo + hi) / 2; }
    bool contains(const Rat& v) const { return lo <= v && v <= hi; }
    bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }

    Interval operator+(const Interval& o) const {
        return Interval(lo + o.lo, hi + o.hi, std::min(level, o.level));
    }
    Interval operator-(const Interval& o) const {
        return Interval(lo - o.hi, hi - o.lo, std::min(level, o.level));
    }

    /// Scale by an exact rational (sign-aware).
    Interval scaled(const Rat& f) const {
        if (f >= 0) return Interval(lo * f, hi * f, level);
        return Interval(hi * f, lo * f, level);
    }

    /// Pad symmetrically by a non-negative slack.
    Interval padded(const Rat& slack) const {
        return Interval(lo - slack, hi + slack, level);
    }

    /// Largest distance between a point of *this and a point of `o`.
    Rat worst_case_distance(const Interval& o) const {
        Rat d1 = hi > o.lo ? hi - o.lo : o.lo - hi;
        Rat d2 = o.hi > lo ? o.hi - lo : lo - o.hi;
        return std::max(d1, d2);
    }
};

/// Product of an exact-integer weight with an interval-valued measure,
/// used when a phase sum (an integer) multiplies an uncertain level mass.
inline Interval weight_times(const Int& w, const Interval& m) {
    Rat wr(w);
    return m.scaled(wr);
}

/// Sum of k copies of [m.lo, m.hi] plus an unknown in [-u, u] * m-mass:
/// interval for (w ± u) * m with w, u integers, u >= 0, m.lo >= 0.
inline Interval phase_mass_interval(const Int& w, const Int& u, const Interval& m) {
    Rat a(w - u), b(w + u);
    Rat lo = a >= 0 ? a * m.lo : a * m.hi;
    Rat hi = b >= 0 ? b * m.hi : b * m.lo;
    return Interval(lo, hi, m.level);
}

}  // namespace specmult
