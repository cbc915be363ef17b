#include "virlab/circle_algebra.hpp"

#include <cstdlib>
#include <stdexcept>

namespace virlab {

void TrigField::add(long k, const RatC& v) {
    auto it = modes.find(k);
    if (it == modes.end()) {
        if (!v.is_zero()) modes.emplace(k, v);
        return;
    }
    it->second += v;
    if (it->second.is_zero()) modes.erase(it);
}

RatC TrigField::at(long k) const {
    auto it = modes.find(k);
    return it == modes.end() ? RatC() : it->second;
}

long TrigField::degree() const {
    long d = 0;
    for (auto& [k, v] : modes) d = std::max(d, std::labs(k));
    return d;
}

bool TrigField::is_real() const {
    for (auto& [k, v] : modes)
        if (at(-k) != v.conj()) return false;
    return true;
}

TrigField operator+(const TrigField& u, const TrigField& v) {
    TrigField w = u;
    for (auto& [k, x] : v.modes) w.add(k, x);
    return w;
}

TrigField operator-(const TrigField& u, const TrigField& v) {
    TrigField w = u;
    for (auto& [k, x] : v.modes) w.add(k, -x);
    return w;
}

TrigField operator*(const RatC& s, const TrigField& u) {
    TrigField w;
    if (s.is_zero()) return w;
    for (auto& [k, x] : u.modes) w.modes.emplace(k, s * x);
    return w;
}

TrigField e_field(long k) {
    TrigField u;
    u.add(k, ratc_i());
    return u;
}

TrigField h_field() {
    TrigField u;
    u.add(0, RatC(1));
    return u;
}

TrigField s_field(long n) {
    if (n < 1) throw std::invalid_argument("s_n needs n >= 1");
    TrigField u;  // (e^{int} − e^{−int})/(2i)
    u.add(n, RatC(Rat(0), frac(-1, 2)));
    u.add(-n, RatC(Rat(0), frac(1, 2)));
    return u;
}

TrigField c_field(long n) {
    if (n < 1) throw std::invalid_argument("c_n needs n >= 1");
    TrigField u;
    u.add(n, RatC(frac(1, 2)));
    u.add(-n, RatC(frac(1, 2)));
    return u;
}

TrigField bracket(const TrigField& u, const TrigField& v) {
    TrigField w;
    for (auto& [j, uj] : u.modes)
        for (auto& [k, vk] : v.modes)
            w.add(j + k, RatC(Rat(0), Rat(k - j)) * uj * vk);  // i(k−j)·u_j·v_k
    return w;
}

RatC virasoro_cocycle(const TrigField& u, const TrigField& v) {
    RatC acc;
    for (auto& [j, uj] : u.modes) {
        RatC vmj = v.at(-j);
        if (vmj.is_zero()) continue;
        Rat w = frac(j * j * j - j, 12);
        acc -= RatC(w) * uj * vmj;
    }
    return acc;
}

VirasoroElement operator+(const VirasoroElement& x, const VirasoroElement& y) {
    return {x.field + y.field, x.central + y.central};
}

VirasoroElement operator-(const VirasoroElement& x, const VirasoroElement& y) {
    return {x.field - y.field, x.central - y.central};
}

VirasoroElement virasoro_bracket(const VirasoroElement& x, const VirasoroElement& y) {
    return {bracket(x.field, y.field), virasoro_cocycle(x.field, y.field)};
}

VirasoroElement jacobi_check(const VirasoroElement& x, const VirasoroElement& y,
                             const VirasoroElement& z) {
    return virasoro_bracket(x, virasoro_bracket(y, z)) +
           virasoro_bracket(y, virasoro_bracket(z, x)) +
           virasoro_bracket(z, virasoro_bracket(x, y));
}

CocycleValue gf_cocycle2(const TrigField& u, const TrigField& v) {
    // ∫ v′u″: only the zero mode of v′u″ survives; term (−i k³)·u_{−k}·v_k in 2π units
    RatC acc;
    for (auto& [k, vk] : v.modes) {
        RatC umk = u.at(-k);
        if (umk.is_zero()) continue;
        acc += RatC(Rat(0), Rat(-k * k * k)) * umk * vk;
    }
    return {acc};
}

CocycleValue gf_cocycle3(const TrigField& u, const TrigField& v, const TrigField& w) {
    RatC acc;
    for (auto& [j, uj] : u.modes)
        for (auto& [k, vk] : v.modes) {
            RatC wl = w.at(-j - k);
            if (wl.is_zero()) continue;
            long l = -j - k;
            Rat coeff = Rat(-j * k * l) * Rat((k - j)) * Rat((l - j)) * Rat((l - k));
            acc += RatC(coeff) * uj * vk * wl;
        }
    return {acc};
}

Sl2Triple sl2_embedding(long n) {
    if (n < 1) throw std::invalid_argument("sl2 embedding needs n >= 1");
    return {{h_field()}, {s_field(n)}, {c_field(n)}};
}

std::array<RatC, 3> sl2_span_coords(const TrigField& u, long n) {
    RatC a = u.at(0);
    RatC b = ratc_i() * (u.at(n) - u.at(-n));
    RatC c = u.at(n) + u.at(-n);
    TrigField rec = a * h_field() + b * s_field(n) + c * c_field(n);
    if (!(rec == u)) throw std::domain_error("field outside span{h, s_n, c_n}");
    return {a, b, c};
}

std::array<std::array<Rat, 3>, 3> killing_matrix(long n) {
    Sl2Triple t = sl2_embedding(n);
    const TrigField* basis[3] = {&t.h.field, &t.s.field, &t.c.field};
    // ad matrices: ad(x) column j = coords of [x, basis_j]
    RatC ad[3][3][3];
    for (int x = 0; x < 3; ++x)
        for (int j = 0; j < 3; ++j) {
            auto co = sl2_span_coords(bracket(*basis[x], *basis[j]), n);
            for (int i = 0; i < 3; ++i) ad[x][i][j] = co[i];
        }
    std::array<std::array<Rat, 3>, 3> k{};
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y) {
            RatC tr;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) tr += ad[x][i][j] * ad[y][j][i];
            if (!tr.is_real()) throw std::domain_error("killing form not real");
            k[x][y] = tr.re;
        }
    return k;
}

Signature killing_signature(long n) {
    auto m = killing_matrix(n);
    // symmetric congruence diagonalization over the rationals
    Signature sig{0, 0, 0};
    int rows[3] = {0, 1, 2};
    (void)rows;
    for (int step = 0; step < 3; ++step) {
        // find a nonzero diagonal pivot at or after `step`, swapping symmetrically
        int p = -1;
        for (int i = step; i < 3; ++i)
            if (m[i][i] != 0) { p = i; break; }
        if (p < 0) {
            // all remaining diagonal zero; if any off-diagonal nonzero, add rows to create one
            bool fixed = false;
            for (int i = step; i < 3 && !fixed; ++i)
                for (int j = i + 1; j < 3 && !fixed; ++j)
                    if (m[i][j] != 0) {
                        for (int t2 = 0; t2 < 3; ++t2) m[i][t2] += m[j][t2];
                        for (int t2 = 0; t2 < 3; ++t2) m[t2][i] += m[t2][j];
                        fixed = true;
                    }
            if (!fixed) {
                sig.zero += 3 - step;
                break;
            }
            --step;
            continue;
        }
        if (p != step) {
            for (int t2 = 0; t2 < 3; ++t2) std::swap(m[p][t2], m[step][t2]);
            for (int t2 = 0; t2 < 3; ++t2) std::swap(m[t2][p], m[t2][step]);
        }
        Rat d = m[step][step];
        if (d > 0) ++sig.positive; else ++sig.negative;
        for (int i = step + 1; i < 3; ++i) {
            Rat f = m[i][step] / d;
            if (f == 0) continue;
            for (int t2 = 0; t2 < 3; ++t2) m[i][t2] -= f * m[step][t2];
            for (int t2 = 0; t2 < 3; ++t2) m[t2][i] -= f * m[t2][step];
        }
    }
    return sig;
}

}  // namespace virlab
