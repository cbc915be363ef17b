#pragma once

#include "virlab/mobius.hpp"

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace virlab {

using Cpx = std::complex<double>;

// A boundary solve that cannot reach the requested residual; the message
// carries the residual reached and the cutoffs that were tried.
struct WeldNumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid geometry: a boundary curve self-intersects or has the wrong
// winding, the two curves touch, or the hole misses the origin.
struct WeldGeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Analytic map of the unit circle stored by its Fourier modes: coef[k + M]
// multiplies z^k, k = −M..M.  `margin` estimates how far the map continues
// inward, on the log-radius scale, from the decay of the negative modes.
// `orientation` records the winding of the image curve.
struct CircleDiffeo {
    int M = 0;
    std::vector<Cpx> coef;
    bool orientation = true;
    double margin = 0.0;

    Cpx operator()(Cpx z) const;
    Cpx derivative(Cpx z) const;

    static CircleDiffeo identity(int M);
    static CircleDiffeo rotation(double alpha, int M);
};

// Solver knobs.  `modes` is the cutoff M carried by every produced diffeo,
// `grid` the collocation sample count per boundary (a power of two, at
// least 8·modes recommended).  `force_splits` pins the number of pieces the
// scaling factor is cut into during a product (0 = automatic).
// `margin_safety` is the fraction of a map's analyticity margin one step may
// consume: continuing binary64 Fourier data inward loses the fraction
// dt/margin of the available digits, so small steps keep the boundary
// samples at the solver tolerance.
struct WeldingConfig {
    int modes = 64;
    int grid = 512;
    double residual_tol = 1e-10;
    int max_iter = 60;
    double separation = 1e-6;
    double margin_safety = 0.15;
    int max_splits = 64;
    int force_splits = 0;
};

// Fourier fit from samples on the uniform grid z_j = exp(2πij/n); n must be
// a power of two.  Winding and margin are filled in from the data.
CircleDiffeo fit_circle_map(const std::vector<Cpx>& samples, int M);
std::vector<Cpx> sample_circle_map(const CircleDiffeo& g, int n);

CircleDiffeo compose(const CircleDiffeo& f, const CircleDiffeo& g, int M);

// Inverse of a genuine circle diffeomorphism (|g| = 1, winding +1), found by
// Newton inversion of the boundary angle map.  Throws WeldGeometryError when
// the derivative vanishes along the circle.
CircleDiffeo invert(const CircleDiffeo& g, int M,
                    const WeldingConfig& cfg = {});

struct DiffeoCheck {
    double max_radial_error;   // sup | |g| − 1 | on the circle
    double min_angular_speed;  // inf of d(arg g)/dθ; a fold shows up as a sign change
    long winding;
    bool pass;
};

DiffeoCheck check_diffeo(const CircleDiffeo& g, int n = 2048);

double coeff_distance(const CircleDiffeo& f, const CircleDiffeo& g);

// Normal form p·A(t)·q with A(t)z = e^{−t}z, p(1) = 1 and t > 0.  As a map
// it sends z to p(e^{−t} q(z)); the image annulus lies between the unit
// circle and the image of the inner boundary.
struct NeretinElement {
    CircleDiffeo p;
    double t = 0.0;
    CircleDiffeo q;
};

// Validates the factors (circle diffeos, winding +1, t above the separation
// threshold) and renormalizes by the rotation that moves p(1) to 1.
NeretinElement neretin(const CircleDiffeo& p, double t, const CircleDiffeo& q,
                       const WeldingConfig& cfg = {});

NeretinElement scaling_element(double t, int M = 64);

// Conformal map of the region between two Jordan curves around the origin
// onto a round annulus e^{−t} ≤ |z| ≤ 1, outer boundary to the unit circle.
// The hole is first centered by the transport τ (a disk automorphism when
// the outer curve allows it, a shift otherwise) so the Laurent ansatz
// τ·exp(φ(τ) + i·rot) converges even for strongly off-center holes; the
// negative modes of φ are stored against the scaled basis (inner_scale/ζ)^k
// and the positive ones against (ζ/outer_scale)^k, which keeps the
// collocation columns bounded.  `residual` is the sup of the log-radial
// boundary error.
struct AnnulusMap {
    int K = 0;
    std::vector<Cpx> phi;  // phi[k + K] against the scaled basis
    double outer_scale = 1.0;
    double inner_scale = 1.0;
    double scale = 1.0;            // input normalization z ↦ z/scale
    Cpx center = Cpx(0, 0);        // hole-centering parameter of τ
    bool mobius_centering = false;
    double rot = 0.0;
    double t = 0.0;
    double residual = 0.0;

    Cpx transported(Cpx z) const;  // τ(z)
    Cpx log_factor(Cpx z) const;   // φ(τ(z))
    Cpx map(Cpx z) const;          // τ(z)·exp(φ(τ(z)) + i·rot)
    Cpx dlog(Cpx z) const;         // (log ∘ map)′(z)
};

// Boundary samples on uniform parameter grids (outer and inner may differ in
// length, both powers of two).  The rotation is normalized so the first
// outer sample keeps its argument.  Throws WeldGeometryError on bad curves
// and WeldNumericError when the residual target is out of reach.
AnnulusMap annulus_map(const std::vector<Cpx>& outer,
                       const std::vector<Cpx>& inner,
                       const WeldingConfig& cfg = {});

// Modulus of the annulus between the unit circle and the circle |z−m| = r,
// through the pair of points symmetric for both boundaries.
double circle_annulus_modulus(Cpx m, double r);

struct MultiplyReport {
    double residual = 0.0;
    int splits = 1;
    int phi_modes = 0;
};

// Semigroup product.  The middle word A(t_a)·(q_a∘p_b)·A(t_b) is reduced to
// p′·A(t′)·q′ by mapping the region between the unit circle and the image of
// the scaled middle map onto a round annulus; when the analyticity margin of
// the middle map cannot absorb the scaling in one step, the right factor is
// cut into pieces and the reduction is repeated.
NeretinElement multiply(const NeretinElement& a, const NeretinElement& b,
                        const WeldingConfig& cfg = {},
                        MultiplyReport* report = nullptr);

// Annular region with parametrized boundary: `outgoing` maps the circle onto
// the outer curve, `ingoing` onto the inner one; the origin sits in the hole.
struct AnnularTriple {
    CircleDiffeo outgoing;
    CircleDiffeo ingoing;
};

// The canonical triple of a normal form: the region e^{−t} ≤ |z| ≤ 1 with
// the outer boundary parametrized by p and the inner one by e^{−t}·q^{−1}.
AnnularTriple to_triple(const NeretinElement& e, const WeldingConfig& cfg = {});

// Normal form of a triple: transport the region onto a round annulus and
// read the boundary parametrizations off the transported curves.  Triples
// that differ by a rotation of the region produce the same element.
NeretinElement from_triple(const AnnularTriple& T, const WeldingConfig& cfg = {});

// A strictly disk-contracting Möbius map as a welding element.  The region
// between the unit circle and the image circle is taken to a round annulus
// by the Möbius map fixing the common symmetric pair, so the factors come
// out in closed form up to the Fourier fit.
NeretinElement mobius_element(const MobiusMap& f, int M = 64);

}  // namespace virlab
