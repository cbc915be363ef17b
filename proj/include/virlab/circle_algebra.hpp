#pragma once

#include "virlab/rational.hpp"

#include <array>
#include <complex>
#include <map>

namespace virlab {

// Finitely supported Fourier expansion Σ_k modes[k]·e^{ikt}·d/dt.
// Real fields have conjugate-symmetric coefficients.
struct TrigField {
    std::map<long, RatC> modes;

    void add(long k, const RatC& v);
    RatC at(long k) const;
    bool is_zero() const { return modes.empty(); }
    long degree() const;  // max |k| over the support, 0 if empty
    bool is_real() const;

    friend TrigField operator+(const TrigField& u, const TrigField& v);
    friend TrigField operator-(const TrigField& u, const TrigField& v);
    friend TrigField operator*(const RatC& s, const TrigField& u);
    friend bool operator==(const TrigField& u, const TrigField& v) { return u.modes == v.modes; }
};

TrigField e_field(long k);  // i·e^{ikt}·d/dt
TrigField h_field();        // d/dt
TrigField s_field(long n);  // sin(nt)·d/dt, n ≥ 1
TrigField c_field(long n);  // cos(nt)·d/dt, n ≥ 1

// [u·d/dt, v·d/dt] = (uv′ − u′v)·d/dt
TrigField bracket(const TrigField& u, const TrigField& v);

struct VirasoroElement {
    TrigField field;
    RatC central{Rat(0)};

    friend VirasoroElement operator+(const VirasoroElement& x, const VirasoroElement& y);
    friend VirasoroElement operator-(const VirasoroElement& x, const VirasoroElement& y);
    friend bool operator==(const VirasoroElement& x, const VirasoroElement& y) {
        return x.field == y.field && x.central == y.central;
    }
    bool is_zero() const { return field.is_zero() && central.is_zero(); }
};

// Central term normalized so that [e_j, e_{−j}] picks up (j³−j)/12 · c.
RatC virasoro_cocycle(const TrigField& u, const TrigField& v);
VirasoroElement virasoro_bracket(const VirasoroElement& x, const VirasoroElement& y);

// [x,[y,z]] + [y,[z,x]] + [z,[x,y]], expected exactly zero.
VirasoroElement jacobi_check(const VirasoroElement& x, const VirasoroElement& y,
                             const VirasoroElement& z);

// Exact multiple of 2π (the integrals below are over one period).
struct CocycleValue {
    RatC two_pi_units;  // value = 2π · two_pi_units

    std::complex<double> value() const {
        return 2.0 * 3.14159265358979323846 * two_pi_units.to_complex();
    }
    // for purely imaginary results: value / (2πi), exact
    RatC two_pi_i_units() const { return two_pi_units / ratc_i(); }
    bool is_zero() const { return two_pi_units.is_zero(); }
};

// ∫ v′(t) du′(t) = ∫ v′ u″ dt
CocycleValue gf_cocycle2(const TrigField& u, const TrigField& v);

// ∫ det(rows u′..u‴, v′..v‴, w′..w‴) dt
CocycleValue gf_cocycle3(const TrigField& u, const TrigField& v, const TrigField& w);

// Relation between the two 2-cocycle normalizations, in 2πi units:
// virasoro_cocycle(e_j,e_{−j}) = kGf2Scale · (gf2 in 2πi units) + kCoboundaryCoeff · δb,
// where δb(u,v) = b([u,v]) with b(e_0) = 1.  Both solved for in the tests.
inline const Rat kGf2Scale = frac(-1, 12);
inline const Rat kCoboundaryCoeff = frac(-1, 24);

struct Sl2Triple {
    VirasoroElement h, s, c;  // closure: [s,c]=−n·h, [h,s]=n·c, [h,c]=−n·s
};
Sl2Triple sl2_embedding(long n);  // n ≥ 1

// Decompose a field lying in span{h, s_n, c_n}; throws std::domain_error otherwise.
std::array<RatC, 3> sl2_span_coords(const TrigField& u, long n);

// tr(ad x · ad y) within span{h, s_n, c_n}
std::array<std::array<Rat, 3>, 3> killing_matrix(long n);
struct Signature {
    int positive, negative, zero;
};
Signature killing_signature(long n);

}  // namespace virlab
