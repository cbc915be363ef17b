#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace virlab {

using Rat = mpq_class;

// Parses "p", "p/q" (arbitrary precision, optional sign). Throws std::invalid_argument.
inline Rat rat_parse(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational");
    Rat r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
    if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
    r.canonicalize();
    return r;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

// mpq_class(p, q) does not reduce; every fraction built from parts must go through here.
inline Rat frac(long num, long den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline double rat_d(const Rat& r) { return r.get_d(); }

// Exact complex rational. std::complex over a non-trivial type is off the table,
// so we carry the pair by hand.
struct RatC {
    Rat re{0}, im{0};

    RatC() = default;
    RatC(Rat r) : re(std::move(r)) {}
    RatC(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}
    RatC(long r) : re(r) {}
    RatC(long r, long i) : re(r), im(i) {}

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    RatC conj() const { return {re, -im}; }
    Rat norm2() const { return re * re + im * im; }  // |z|^2

    std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }

    friend RatC operator+(const RatC& a, const RatC& b) { return {a.re + b.re, a.im + b.im}; }
    friend RatC operator-(const RatC& a, const RatC& b) { return {a.re - b.re, a.im - b.im}; }
    friend RatC operator-(const RatC& a) { return {-a.re, -a.im}; }
    friend RatC operator*(const RatC& a, const RatC& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend RatC operator*(const Rat& s, const RatC& a) { return {s * a.re, s * a.im}; }
    friend RatC operator/(const RatC& a, const RatC& b) {
        Rat n = b.norm2();
        if (n == 0) throw std::domain_error("division by zero");
        RatC p = a * b.conj();
        return {p.re / n, p.im / n};
    }
    RatC& operator+=(const RatC& b) { re += b.re; im += b.im; return *this; }
    RatC& operator-=(const RatC& b) { re -= b.re; im -= b.im; return *this; }
    RatC& operator*=(const RatC& b) { *this = *this * b; return *this; }
    friend bool operator==(const RatC& a, const RatC& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const RatC& a, const RatC& b) { return !(a == b); }
};

inline RatC ratc_i() { return {Rat(0), Rat(1)}; }

// "p/q" or "p/q+r/si" / "p/q-r/si" / "r/si"; also plain "i", "-i".
RatC ratc_parse(const std::string& s);
std::string ratc_str(const RatC& z);

// Deterministic 64-bit stream; used wherever tests/reports need reproducible bytes.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // Uniform in [0, n)
    std::uint64_t below(std::uint64_t n) { return next() % n; }
    // Small random rational with numerator in [-num_max, num_max], denominator in [1, den_max].
    Rat rat(long num_max, long den_max) {
        long p = static_cast<long>(below(2 * num_max + 1)) - num_max;
        long q = static_cast<long>(below(den_max)) + 1;
        Rat r(p, q);
        r.canonicalize();
        return r;
    }
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

}  // namespace virlab
