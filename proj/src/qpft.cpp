#include "virlab/qpft.hpp"

#include <stdexcept>

#include "exact_linalg.hpp"

namespace virlab {

void BiLaurent::add(long a, long b, const Rat& x) {
    if (x == 0) return;
    auto key = std::make_pair(a, b);
    Rat& slot = coef[key];
    slot += x;
    if (slot == 0) coef.erase(key);
}

BiLaurent BiLaurent::operator+(const BiLaurent& o) const {
    BiLaurent out = *this;
    for (const auto& [k, v] : o.coef) out.add(k.first, k.second, v);
    return out;
}

BiLaurent BiLaurent::operator-(const BiLaurent& o) const {
    BiLaurent out = *this;
    for (const auto& [k, v] : o.coef) out.add(k.first, k.second, -v);
    return out;
}

BiLaurent BiLaurent::operator*(const BiLaurent& o) const {
    BiLaurent out;
    for (const auto& [k1, v1] : coef)
        for (const auto& [k2, v2] : o.coef)
            out.add(k1.first + k2.first, k1.second + k2.second, v1 * v2);
    return out;
}

namespace {

Rat int_pow(const Rat& x, long e) {
    if (x == 0) throw std::domain_error("BiLaurent: evaluation at zero");
    Rat base = e >= 0 ? x : Rat(1) / x;
    long n = e >= 0 ? e : -e;
    Rat out(1);
    while (n > 0) {
        if (n & 1) out *= base;
        base *= base;
        n >>= 1;
    }
    return out;
}

}  // namespace

Rat BiLaurent::eval(const Rat& x, const Rat& y) const {
    Rat out(0);
    for (const auto& [k, v] : coef) out += v * int_pow(x, k.first) * int_pow(y, k.second);
    return out;
}

PrimarySolution solve_primary(const Rat& mu, const Rat& h_src, const Rat& h_tgt, long N,
                              long src_cap, long tgt_cap) {
    if (N < 0) throw std::invalid_argument("solve_primary: negative window");
    PrimarySolution sol;
    sol.mu = mu;
    sol.h_src = h_src;
    sol.h_tgt = h_tgt;
    sol.N = N;
    sol.src_cap = src_cap;
    sol.tgt_cap = tgt_cap;
    sol.delta = h_tgt - h_src - mu;

    // cap <= N means the module genuinely ends there; entries past it
    // are zeros, so boundary equations still hold.
    bool tgt_edge = tgt_cap >= 0 && tgt_cap <= N;
    bool src_edge = src_cap >= 0 && src_cap <= N;
    long mt = tgt_edge ? tgt_cap : N;
    long ms = src_edge ? src_cap : N;

    long rows_m = mt + 1, cols_n = ms + 1;
    long nvars = rows_m * cols_n;
    auto idx = [cols_n](long m, long n) { return m * cols_n + n; };

    detail::RatMat eqs;
    const Rat& d = sol.delta;
    // mode +1: (m+1)(2h_tgt+m) c[m+1][n] - n(2h_src+n-1) c[m][n-1]
    //          = (delta+m-n+2mu) c[m][n]
    for (long m = 0; m <= mt; ++m) {
        if (m + 1 > mt && !tgt_edge) continue;
        for (long n = 0; n <= ms; ++n) {
            detail::RatVec row(nvars, Rat(0));
            if (m + 1 <= mt) row[idx(m + 1, n)] += Rat(m + 1) * (2 * h_tgt + m);
            if (n - 1 >= 0) row[idx(m, n - 1)] -= Rat(n) * (2 * h_src + (n - 1));
            row[idx(m, n)] -= d + (m - n) + 2 * mu;
            eqs.push_back(std::move(row));
        }
    }
    // mode -1: c[m-1][n] - c[m][n+1] = (delta+m-n) c[m][n]
    for (long m = 0; m <= mt; ++m) {
        for (long n = 0; n <= ms; ++n) {
            if (n + 1 > ms && !src_edge) continue;
            detail::RatVec row(nvars, Rat(0));
            if (m - 1 >= 0) row[idx(m - 1, n)] += 1;
            if (n + 1 <= ms) row[idx(m, n + 1)] -= 1;
            row[idx(m, n)] -= d + (m - n);
            eqs.push_back(std::move(row));
        }
    }

    for (auto& v : detail::nullspace(std::move(eqs), static_cast<int>(nvars))) {
        RatMat c(rows_m, std::vector<Rat>(cols_n));
        for (long m = 0; m <= mt; ++m)
            for (long n = 0; n <= ms; ++n) c[m][n] = v[idx(m, n)];
        sol.basis.push_back(std::move(c));
    }
    return sol;
}

Rat q_r_parameter(const Rat& h) {
    if (h == frac(1, 2)) throw std::domain_error("q_r_parameter: pole at h = 1/2");
    return Rat(1) / (2 * h - 1);
}

}  // namespace virlab
