#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "virlab/welding.hpp"

#include <cmath>
#include <complex>
#include <vector>

using namespace virlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<Cpx> circle_samples(double r, int n, Cpx center = Cpx(0, 0)) {
    std::vector<Cpx> s(n);
    for (int j = 0; j < n; ++j) s[j] = center + std::polar(r, 2 * kPi * j / n);
    return s;
}

// genuine analytic circle diffeomorphism e^{i(θ + f(θ))} with a random
// trigonometric polynomial f whose harmonics decay like 2^{−k}
CircleDiffeo random_diffeo(SplitMix64& rng, int M, double eps = 0.05, int kmax = 8) {
    std::vector<double> a(kmax + 1), b(kmax + 1);
    for (int k = 1; k <= kmax; ++k) {
        a[k] = eps * std::pow(0.5, k) * (2 * rng.unit() - 1);
        b[k] = eps * std::pow(0.5, k) * (2 * rng.unit() - 1);
    }
    const int n = 512;
    std::vector<Cpx> s(n);
    for (int j = 0; j < n; ++j) {
        double th = 2 * kPi * j / n, f = 0;
        for (int k = 1; k <= kmax; ++k) f += a[k] * std::cos(k * th) + b[k] * std::sin(k * th);
        s[j] = std::polar(1.0, th + f);
    }
    return fit_circle_map(s, M);
}

NeretinElement random_element(SplitMix64& rng, int M, double eps = 0.05) {
    double t = 0.4 + 0.5 * rng.unit();
    return neretin(random_diffeo(rng, M, eps), t, random_diffeo(rng, M, eps));
}

double elem_distance(const NeretinElement& a, const NeretinElement& b) {
    return std::max({coeff_distance(a.p, b.p), coeff_distance(a.q, b.q), std::abs(a.t - b.t)});
}

// p(e^{−t} q(z)), the map the normal form represents on the circle
Cpx apply_element(const NeretinElement& e, Cpx z) {
    return e.p(std::exp(-e.t) * e.q(z));
}

}  // namespace

TEST_CASE("pure scalings compose additively") {
    NeretinElement e1 = scaling_element(0.37), e2 = scaling_element(0.85);
    MultiplyReport rep;
    NeretinElement m = multiply(e1, e2, {}, &rep);
    CHECK(std::abs(m.t - 1.22) <= 1e-10);
    CHECK(coeff_distance(m.p, CircleDiffeo::identity(64)) <= 1e-10);
    CHECK(coeff_distance(m.q, CircleDiffeo::identity(64)) <= 1e-10);
    CHECK(rep.residual <= 1e-10);

    NeretinElement chain = multiply(m, scaling_element(0.08));
    CHECK(std::abs(chain.t - 1.30) <= 1e-10);
}

TEST_CASE("the annulus map of a round annulus is the identity") {
    const int n = 256;
    auto outer = circle_samples(1.0, n);
    auto inner = circle_samples(0.55, n);
    AnnulusMap am = annulus_map(outer, inner);
    CHECK(std::abs(am.t + std::log(0.55)) <= 1e-12);
    CHECK(am.residual <= 1e-12);
    for (int j = 0; j < n; j += 17) {
        CHECK(std::abs(am.map(outer[j]) - outer[j]) <= 1e-11);
        CHECK(std::abs(am.map(inner[j]) - inner[j]) <= 1e-11);
    }
}

TEST_CASE("the annulus modulus is a conformal invariant") {
    MobiusMap f = MobiusMap::make(RatC(1), RatC(frac(1, 2)), RatC(0), RatC(2));
    REQUIRE(strictly_in_mantle(f));
    ExactCircle c = unit_circle_image(f);
    double oracle = circle_annulus_modulus(c.center.to_complex(), c.radius());

    const int n = 512;
    auto outer = circle_samples(1.0, n);
    std::vector<Cpx> inner(n);
    for (int j = 0; j < n; ++j) inner[j] = f.apply(std::polar(1.0, 2 * kPi * j / n));
    AnnulusMap am = annulus_map(outer, inner);
    CHECK(std::abs(am.t - oracle) <= 1e-9);

    // transport the whole annulus by a disk automorphism: same modulus
    MobiusMap g = MobiusMap::make(RatC(5), RatC(3), RatC(3), RatC(5));
    WeldingConfig cfg;
    cfg.grid = 1024;
    const int n2 = 1024;
    std::vector<Cpx> outer2(n2), inner2(n2);
    MobiusMap gf = compose(g, f);
    for (int j = 0; j < n2; ++j) {
        Cpx z = std::polar(1.0, 2 * kPi * j / n2);
        outer2[j] = g.apply(z);
        inner2[j] = gf.apply(z);
    }
    AnnulusMap am2 = annulus_map(outer2, inner2, cfg);
    CHECK(std::abs(am2.t - oracle) <= 1e-9);

    // a strongly off-center hole, modulus against the symmetric-pair form
    AnnulusMap am3 = annulus_map(outer, circle_samples(0.1, n, Cpx(0.5, 0)));
    CHECK(std::abs(am3.t - circle_annulus_modulus(Cpx(0.5, 0), 0.1)) <= 1e-9);

    CHECK(circle_annulus_modulus(Cpx(0, 0), 0.25) == doctest::Approx(std::log(4.0)).epsilon(1e-14));
}

TEST_CASE("a perturbed annulus moves the modulus at the perturbation scale") {
    const int n = 512;
    const double eps = 1e-3, r = 0.5;
    auto outer = circle_samples(1.0, n);
    std::vector<Cpx> inner(n);
    for (int j = 0; j < n; ++j) {
        double th = 2 * kPi * j / n;
        inner[j] = std::polar(r * (1 + eps * std::cos(3 * th)), th);
    }
    AnnulusMap am = annulus_map(outer, inner);
    CHECK(std::abs(am.t + std::log(r)) <= 5 * eps);
    CHECK(am.t > 0);
}

TEST_CASE("a contracting Möbius map welds in closed form") {
    MobiusMap f = MobiusMap::make(RatC(1), RatC(frac(1, 2)), RatC(0), RatC(2));
    NeretinElement e = mobius_element(f, 64);
    CHECK(std::abs(e.p(Cpx(1, 0)) - Cpx(1, 0)) <= 1e-12);
    CHECK(check_diffeo(e.p).pass);
    CHECK(check_diffeo(e.q).pass);
    CHECK(e.t > 0);

    for (int j = 0; j < 16; ++j) {
        Cpx z = std::polar(1.0, 2 * kPi * j / 16);
        CHECK(std::abs(apply_element(e, z) - f.apply(z)) <= 1e-9);
    }
}

TEST_CASE("Möbius welding is a homomorphism into the semigroup") {
    MobiusMap f1 = MobiusMap::make(RatC(1), RatC(frac(1, 2)), RatC(0), RatC(2));
    MobiusMap f2 = MobiusMap::make(RatC(1), RatC(frac(-1, 2), frac(1, 4)), RatC(0), RatC(3));
    REQUIRE(strictly_in_mantle(f1));
    REQUIRE(strictly_in_mantle(f2));

    NeretinElement ea = mobius_element(f1, 64);
    NeretinElement eb = mobius_element(f2, 64);
    NeretinElement prod = multiply(ea, eb);
    NeretinElement direct = mobius_element(compose(f1, f2), 64);
    CHECK(elem_distance(prod, direct) <= 1e-8);

    // a rational scaling enters the same way
    MobiusMap s = MobiusMap::scaling(frac(1, 2));
    NeretinElement es = mobius_element(s, 64);
    CHECK(std::abs(es.t - std::log(2.0)) <= 1e-12);
    NeretinElement prod2 = multiply(es, ea);
    NeretinElement direct2 = mobius_element(compose(s, f1), 64);
    CHECK(elem_distance(prod2, direct2) <= 1e-8);
}

TEST_CASE("the welding product is associative") {
    SplitMix64 rng(2026);
    NeretinElement a = random_element(rng, 64);
    NeretinElement b = random_element(rng, 64);
    NeretinElement c = random_element(rng, 64);
    NeretinElement left = multiply(multiply(a, b), c);
    NeretinElement right = multiply(a, multiply(b, c));
    CHECK(elem_distance(left, right) <= 1e-6);
    CHECK(left.t > 0);
}

TEST_CASE("the product does not depend on the splitting depth") {
    SplitMix64 rng(99);
    NeretinElement a = random_element(rng, 64);
    NeretinElement b = random_element(rng, 64);
    WeldingConfig c1, c2;
    c1.force_splits = 4;
    c2.force_splits = 8;
    MultiplyReport r1, r2;
    NeretinElement m1 = multiply(a, b, c1, &r1);
    NeretinElement m2 = multiply(a, b, c2, &r2);
    CHECK(r1.splits == 4);
    CHECK(r2.splits == 8);
    CHECK(elem_distance(m1, m2) <= 1e-7);

    NeretinElement m0 = multiply(a, b);
    CHECK(elem_distance(m0, m1) <= 1e-7);
}

TEST_CASE("normal forms round trip through annular triples") {
    SplitMix64 rng(7);
    NeretinElement e = random_element(rng, 64);
    AnnularTriple T = to_triple(e);
    CHECK(check_diffeo(T.outgoing).pass);

    NeretinElement back = from_triple(T);
    CHECK(elem_distance(e, back) <= 1e-8);

    // rotating the whole region does not change the normal form
    AnnularTriple rotated = T;
    for (Cpx& c : rotated.outgoing.coef) c *= std::polar(1.0, 0.7);
    for (Cpx& c : rotated.ingoing.coef) c *= std::polar(1.0, 0.7);
    NeretinElement back2 = from_triple(rotated);
    CHECK(elem_distance(e, back2) <= 1e-8);
}

TEST_CASE("a Möbius element round trips through its triple") {
    MobiusMap f = MobiusMap::make(RatC(1), RatC(frac(1, 2)), RatC(0), RatC(2));
    NeretinElement e = mobius_element(f, 64);
    NeretinElement back = from_triple(to_triple(e));
    CHECK(elem_distance(e, back) <= 1e-8);
}

TEST_CASE("degenerate geometry is rejected") {
    const int n = 256;
    auto outer = circle_samples(1.0, n);

    CHECK_THROWS_AS(annulus_map(outer, circle_samples(1.0 - 1e-8, n)), WeldGeometryError);
    CHECK_THROWS_AS(annulus_map(outer, circle_samples(0.2, n, Cpx(1.5, 0))), WeldGeometryError);

    // limaçon with an inner loop: not a Jordan curve
    std::vector<Cpx> loop(n);
    for (int j = 0; j < n; ++j) {
        double th = 2 * kPi * j / n;
        loop[j] = std::polar(0.15 + 0.4 * std::cos(th), th) + Cpx(0.25, 0);
    }
    CHECK_THROWS_AS(annulus_map(outer, loop), WeldGeometryError);

    CHECK_THROWS_AS(scaling_element(0.0), WeldGeometryError);
    CHECK_THROWS_AS(scaling_element(-1.0), WeldGeometryError);

    MobiusMap autf = MobiusMap::make(RatC(5), RatC(3), RatC(3), RatC(5));
    CHECK_THROWS_AS(mobius_element(autf, 32), WeldGeometryError);
    CHECK_THROWS_AS(circle_annulus_modulus(Cpx(0.6, 0), 0.5), WeldGeometryError);
}

TEST_CASE("numeric failure reports carry diagnostics") {
    const int n = 256;
    auto outer = circle_samples(1.0, n);
    auto inner = circle_samples(0.5, n);
    WeldingConfig cfg;
    cfg.residual_tol = 1e-30;
    try {
        annulus_map(outer, inner, cfg);
        CHECK(false);
    } catch (const WeldNumericError& err) {
        CHECK(std::string(err.what()).find("residual") != std::string::npos);
    }
}

TEST_CASE("circle maps are validated") {
    SplitMix64 rng(11);
    CircleDiffeo good = random_diffeo(rng, 64);
    DiffeoCheck ck = check_diffeo(good);
    CHECK(ck.pass);
    CHECK(ck.winding == 1);
    CHECK(good.orientation);
    CHECK(good.margin > 0.3);

    // a fold: e^{i(θ + 1.2 sin θ)} covers part of the circle three times
    const int n = 512;
    std::vector<Cpx> s(n);
    for (int j = 0; j < n; ++j) {
        double th = 2 * kPi * j / n;
        s[j] = std::polar(1.0, th + 1.2 * std::sin(th));
    }
    CircleDiffeo fold = fit_circle_map(s, 64);
    CHECK_FALSE(check_diffeo(fold).pass);
    CHECK_THROWS_AS(invert(fold, 64), WeldGeometryError);

    // off the circle entirely
    std::vector<Cpx> off(n);
    for (int j = 0; j < n; ++j) off[j] = 1.05 * std::polar(1.0, 2 * kPi * j / n);
    CircleDiffeo inflated = fit_circle_map(off, 64);
    CHECK_THROWS_AS(neretin(inflated, 0.5, CircleDiffeo::identity(64)), WeldGeometryError);

    // reversed orientation
    std::vector<Cpx> rev(n);
    for (int j = 0; j < n; ++j) rev[j] = std::polar(1.0, -2 * kPi * j / n);
    CircleDiffeo reversed = fit_circle_map(rev, 64);
    CHECK_FALSE(reversed.orientation);
    CHECK_FALSE(check_diffeo(reversed).pass);

    CHECK_THROWS_AS(fit_circle_map(std::vector<Cpx>(100, Cpx(1, 0)), 8), std::invalid_argument);
    CHECK_THROWS_AS(fit_circle_map(std::vector<Cpx>(16, Cpx(1, 0)), 16), std::invalid_argument);
}

TEST_CASE("composition and inversion act on the circle") {
    SplitMix64 rng(5);
    CircleDiffeo g = random_diffeo(rng, 64);
    CircleDiffeo gi = invert(g, 64);
    CircleDiffeo round = compose(g, gi, 64);
    CHECK(coeff_distance(round, CircleDiffeo::identity(64)) <= 1e-12);

    CircleDiffeo rot = CircleDiffeo::rotation(1.1, 64);
    CircleDiffeo moved = compose(rot, g, 64);
    for (int j = 0; j < 8; ++j) {
        Cpx z = std::polar(1.0, 2 * kPi * j / 8 + 0.3);
        CHECK(std::abs(moved(z) - std::polar(1.0, 1.1) * g(z)) <= 1e-13);
    }
}
