#include "virlab/mobius.hpp"

#include <cmath>
#include <stdexcept>

namespace virlab {

namespace {

MobiusMap canonical(RatC a, RatC b, RatC c, RatC d) {
    const RatC* lead = nullptr;
    for (const RatC* x : {&a, &b, &c, &d}) {
        if (!x->is_zero()) { lead = x; break; }
    }
    RatC s = *lead;
    return MobiusMap{a / s, b / s, c / s, d / s};
}

}  // namespace

MobiusMap MobiusMap::make(RatC a, RatC b, RatC c, RatC d) {
    if ((a * d - b * c).is_zero()) throw std::invalid_argument("degenerate mobius map");
    return canonical(std::move(a), std::move(b), std::move(c), std::move(d));
}

MobiusMap MobiusMap::identity() { return make(RatC(1), RatC(0), RatC(0), RatC(1)); }

MobiusMap MobiusMap::scaling(const Rat& r) { return make(RatC(r), RatC(0), RatC(0), RatC(1)); }

MobiusMap MobiusMap::rotation(const RatC& u) { return make(u, RatC(0), RatC(0), RatC(1)); }

RatC MobiusMap::apply(const RatC& z) const {
    RatC den = c * z + d;
    if (den.is_zero()) throw std::domain_error("evaluation at the pole");
    return (a * z + b) / den;
}

std::complex<double> MobiusMap::apply(std::complex<double> z) const {
    return (a.to_complex() * z + b.to_complex()) / (c.to_complex() * z + d.to_complex());
}

MobiusMap compose(const MobiusMap& f, const MobiusMap& g) {
    return MobiusMap::make(f.a * g.a + f.b * g.c, f.a * g.b + f.b * g.d,
                           f.c * g.a + f.d * g.c, f.c * g.b + f.d * g.d);
}

MobiusMap inverse(const MobiusMap& f) { return MobiusMap::make(f.d, -f.b, -f.c, f.a); }

namespace {

// min over |z|=1 of (|cz+d|² − |az+b|²) is A − 2|B|; encode A ≥ 2|B| (and the
// strict variant) without taking the square root.
bool boundary_contracts(const MobiusMap& f, bool strict) {
    Rat A = f.c.norm2() + f.d.norm2() - f.a.norm2() - f.b.norm2();
    RatC B = f.c * f.d.conj() - f.a * f.b.conj();
    Rat B2 = B.norm2();
    if (strict) return A > 0 && A * A > 4 * B2;
    return A >= 0 && A * A >= 4 * B2;
}

bool pole_outside_closed_disk(const MobiusMap& f) {
    return f.c.is_zero() || f.d.norm2() > f.c.norm2();
}

}  // namespace

bool in_mantle(const MobiusMap& f) {
    return pole_outside_closed_disk(f) && boundary_contracts(f, false);
}

bool strictly_in_mantle(const MobiusMap& f) {
    return pole_outside_closed_disk(f) && boundary_contracts(f, true);
}

double ExactCircle::radius() const { return std::sqrt(radius_sq.get_d()); }

ExactCircle unit_circle_image(const MobiusMap& f) {
    Rat den = f.d.norm2() - f.c.norm2();
    if (den == 0) throw std::domain_error("image of the unit circle is a line");
    RatC center = (f.b * f.d.conj() - f.a * f.c.conj()) / RatC(den);
    Rat r2 = center.norm2() - (f.b.norm2() - f.a.norm2()) / den;
    return ExactCircle{center, r2};
}

bool AnnulusDomain::valid() const {
    return strictly_in_mantle(compose(inverse(outer_param), inner_param));
}

AnnulusDomain annulus_form(const MobiusMap& f) {
    if (!in_mantle(f)) throw std::invalid_argument("not a disk-contracting map");
    if (!strictly_in_mantle(f)) throw std::domain_error("degenerate annulus: boundaries touch");
    return AnnulusDomain{MobiusMap::identity(), f};
}

NormalizedDomain normalize_domain(const AnnulusDomain& k) {
    if (!k.valid()) throw std::invalid_argument("invalid annulus domain");
    MobiusMap t = inverse(k.outer_param);
    return NormalizedDomain{t, compose(t, k.inner_param)};
}

AnnulusDomain glue(const AnnulusDomain& k1, const AnnulusDomain& k2) {
    if (!k1.valid() || !k2.valid()) throw std::invalid_argument("invalid annulus domain");
    AnnulusDomain out{k1.outer_param,
                      compose(k1.inner_param, compose(inverse(k2.outer_param), k2.inner_param))};
    if (!out.valid()) throw std::domain_error("degenerate glueing: boundaries touch");
    return out;
}

}  // namespace virlab
