#pragma once

#include "virlab/rational.hpp"

#include <complex>

namespace virlab {

// z ↦ (az+b)/(cz+d) over the Gaussian rationals, ad−bc ≠ 0.
// Canonical form: the first nonzero coefficient of (a,b,c,d) equals 1, so two
// parameter tuples represent the same map iff the structs compare equal.
struct MobiusMap {
    RatC a, b, c, d;

    static MobiusMap make(RatC a, RatC b, RatC c, RatC d);  // throws on ad−bc = 0
    static MobiusMap identity();
    static MobiusMap scaling(const Rat& r);   // z ↦ rz
    static MobiusMap rotation(const RatC& u); // z ↦ uz, |u| arbitrary but meant unimodular

    RatC det() const { return a * d - b * c; }
    RatC apply(const RatC& z) const;  // throws std::domain_error at the pole
    std::complex<double> apply(std::complex<double> z) const;

    friend bool operator==(const MobiusMap& f, const MobiusMap& g) {
        return f.a == g.a && f.b == g.b && f.c == g.c && f.d == g.d;
    }
};

MobiusMap compose(const MobiusMap& f, const MobiusMap& g);  // f∘g
MobiusMap inverse(const MobiusMap& f);

// Closed-disk containment f(D̄) ⊆ D̄ (the group of disk automorphisms qualifies);
// `strictly_in_mantle` asks for f(D̄) ⊂ D (open), i.e. max_{|z|=1} |f| < 1.
// Both decided exactly: on |z|=1, |cz+d|²−|az+b|² = A + 2Re(Bz) with
// A = |c|²+|d|²−|a|²−|b|², B = c·conj(d)−a·conj(b), whose boundary minimum is A−2|B|.
bool in_mantle(const MobiusMap& f);
bool strictly_in_mantle(const MobiusMap& f);

struct ExactCircle {
    RatC center;
    Rat radius_sq;
    double radius() const;
};

// Image of the unit circle; throws std::domain_error when the image is a line (|c|=|d|).
ExactCircle unit_circle_image(const MobiusMap& f);

// Doubly connected region bounded by outer_param(S¹) and inner_param(S¹), with the
// outer parametrization outgoing and the inner one ingoing.  Valid iff the inner
// circle sits strictly inside the outer one, i.e. strictly_in_mantle(P⁻¹∘Q).
struct AnnulusDomain {
    MobiusMap outer_param, inner_param;

    bool valid() const;
    ExactCircle outer_circle() const { return unit_circle_image(outer_param); }
    ExactCircle inner_circle() const { return unit_circle_image(inner_param); }
};

// Annulus between S¹ (standard parametrization) and f(S¹) (parametrized by f).
// Requires strictly_in_mantle(f); throws std::domain_error on a touching boundary.
AnnulusDomain annulus_form(const MobiusMap& f);

struct NormalizedDomain {
    MobiusMap transport;  // carries the domain to outer = unit circle, standard param
    MobiusMap f;          // the disk-contracting map read off the transported inner param
};

NormalizedDomain normalize_domain(const AnnulusDomain& k);  // throws on invalid domain

// Semigroup product: glue k1's inner boundary to k2's outer boundary along the
// parametrizations.  Throws std::domain_error on degenerate glueing.
AnnulusDomain glue(const AnnulusDomain& k1, const AnnulusDomain& k2);

}  // namespace virlab
