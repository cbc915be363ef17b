#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "virlab/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace virlab;

namespace {

TrainMorphism word(std::initializer_list<TrainLayer> layers) {
    TrainMorphism m;
    bool first = true;
    for (const TrainLayer& l : layers) {
        m = first ? layer_morphism(l) : sew(m, layer_morphism(l));
        first = false;
    }
    return m;
}

bool all_zero(const RatMat& A) {
    for (const auto& row : A)
        for (const Rat& x : row)
            if (x != 0) return false;
    return true;
}

double sup_abs(const RatMat& A) {
    double s = 0;
    for (const auto& row : A)
        for (const Rat& x : row) s = std::max(s, std::abs(rat_d(x)));
    return s;
}

RatMat kron_ref(const RatMat& A, const RatMat& B) {
    size_t ra = A.size(), ca = A[0].size(), rb = B.size(), cb = B[0].size();
    RatMat C(ra * rb, std::vector<Rat>(ca * cb, Rat(0)));
    for (size_t i = 0; i < ra; ++i)
        for (size_t j = 0; j < ca; ++j)
            for (size_t p = 0; p < rb; ++p)
                for (size_t q = 0; q < cb; ++q) C[i * rb + p][j * cb + q] = A[i][j] * B[p][q];
    return C;
}

RatMat normalize_ref(RatMat A) {
    Rat best(0), pick(0);
    for (const auto& row : A)
        for (const Rat& x : row)
            if (abs(x) > best) {
                best = abs(x);
                pick = x;
            }
    if (pick != 0)
        for (auto& row : A)
            for (Rat& x : row) x /= pick;
    return A;
}

// small contracting maps fixing the origin: |a| <= 3/4, |c| <= 1/8
std::string random_origin_id(SplitMix64& rng) {
    Rat a = frac(1 + static_cast<long>(rng.below(3)), 4 + static_cast<long>(rng.below(3)));
    if (rng.below(2)) a = -a;
    Rat c = frac(1, 8 + static_cast<long>(rng.below(8)));
    if (rng.below(2)) c = -c;
    return mobius_id(a, Rat(0), c);
}

// Independent genus bookkeeping: sew the seam circles one at a time and count
// a handle whenever a circle joins a component to itself.
struct HandleOracle {
    std::vector<long> parent, handles;

    long add() {
        parent.push_back(static_cast<long>(parent.size()));
        handles.push_back(0);
        return parent.back();
    }
    long find(long x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void sew_circle(long a, long b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            handles[a] += 1;
        } else {
            parent[a] = b;
            handles[b] += handles[a];
        }
    }
    long genus() {
        long g = 0;
        for (size_t i = 0; i < parent.size(); ++i)
            if (find(static_cast<long>(i)) == static_cast<long>(i)) g += handles[i];
        return g;
    }
    long components() {
        long c = 0;
        for (size_t i = 0; i < parent.size(); ++i)
            c += find(static_cast<long>(i)) == static_cast<long>(i);
        return c;
    }
};

}  // namespace

TEST_CASE("letters carry their boundary data") {
    CHECK(annulus_letter().n_in() == 1);
    CHECK(annulus_letter().n_out() == 1);
    CHECK(trinion_letter().n_in() == 2);
    CHECK(trinion_letter().n_out() == 1);
    CHECK(antitrinion_letter().n_in() == 1);
    CHECK(antitrinion_letter().n_out() == 2);
    CHECK(perm_letter({2, 0, 1}).n_in() == 3);

    CHECK_THROWS_AS(perm_letter({0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(perm_letter({1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(layer_morphism({}), std::invalid_argument);

    TrainMorphism t = single(trinion_letter());
    CHECK(domain(t).size == 2);
    CHECK(codomain(t).size == 1);
    CHECK(t.genus() == 0);
    CHECK(t.components() == 1);

    TrainMorphism p = single(perm_letter({1, 0}));
    CHECK(p.components() == 2);
    CHECK(p.genus() == 0);
    CHECK(p.out_comp == std::vector<long>{1, 0});
}

TEST_CASE("sewing follows the euler characteristic bookkeeping") {
    TrainMorphism ann = single(annulus_letter());

    TrainMorphism two = sew(ann, ann);
    CHECK(two.genus() == 0);
    CHECK(two.components() == 1);
    CHECK(two.layers.size() == 2);

    // one ingoing and one outgoing circle, sewn along two circles: a handle
    TrainMorphism veil = sew(single(antitrinion_letter()), single(trinion_letter()));
    CHECK(veil.nin == 1);
    CHECK(veil.nout == 1);
    CHECK(veil.genus() == 1);
    CHECK(veil.components() == 1);
    CHECK_FALSE(genus_additive(single(antitrinion_letter()), single(trinion_letter())));

    // the same surface with an explicit identity permutation in the middle
    TrainMorphism veil2 =
        sew(sew(single(antitrinion_letter()), single(perm_letter({0, 1}))), single(trinion_letter()));
    CHECK(veil2.genus() == 1);
    CHECK(veil2.components() == 1);

    // endomorphisms of the one point object compose with additive genus
    TrainMorphism g2 = sew(veil, veil);
    CHECK(g2.genus() == 2);
    CHECK(genus_additive(veil, veil));

    TrainMorphism pair = disjoint_union(veil, ann);
    CHECK(pair.genus() == 1);
    CHECK(pair.components() == 2);
    CHECK(pair.nin == 2);
    CHECK(disjoint_union(veil, veil).genus() == 2);

    CHECK_THROWS_AS(sew(single(trinion_letter()), single(trinion_letter())),
                    std::invalid_argument);
}

TEST_CASE("random words match the handle counting oracle") {
    SplitMix64 rng(314159);
    for (int trial = 0; trial < 200; ++trial) {
        long w = 1 + static_cast<long>(rng.below(3));
        long depth = 1 + static_cast<long>(rng.below(6));

        TrainMorphism acc;
        bool started = false;
        HandleOracle oracle;
        std::vector<long> cur;  // oracle component per free outgoing circle

        for (long step = 0; step < depth; ++step) {
            TrainLayer layer;
            std::vector<long> lin, lout;
            if (w >= 2 && rng.below(5) == 0) {
                std::vector<long> p(w);
                std::iota(p.begin(), p.end(), 0);
                for (long i = w - 1; i > 0; --i)
                    std::swap(p[i], p[rng.below(i + 1)]);
                layer.push_back(perm_letter(p));
                std::vector<long> strands(w);
                for (long s = 0; s < w; ++s) strands[s] = oracle.add();
                lin = strands;
                lout.assign(w, -1);
                for (long s = 0; s < w; ++s) lout[p[s]] = strands[s];
            } else {
                long slot = 0;
                while (slot < w) {
                    long r = rng.below(4);
                    if (r == 0 && w - slot >= 2) {
                        long c = oracle.add();
                        layer.push_back(trinion_letter());
                        lin.push_back(c);
                        lin.push_back(c);
                        lout.push_back(c);
                        slot += 2;
                    } else if (r == 1 && w < 5) {
                        long c = oracle.add();
                        layer.push_back(antitrinion_letter());
                        lin.push_back(c);
                        lout.push_back(c);
                        lout.push_back(c);
                        slot += 1;
                    } else {
                        long c = oracle.add();
                        layer.push_back(annulus_letter());
                        lin.push_back(c);
                        lout.push_back(c);
                        slot += 1;
                    }
                }
            }
            if (started)
                for (long i = 0; i < w; ++i) oracle.sew_circle(cur[i], lin[i]);
            cur = lout;
            w = static_cast<long>(lout.size());

            acc = started ? sew(acc, layer_morphism(layer)) : layer_morphism(layer);
            started = true;
        }

        CHECK(acc.genus() == oracle.genus());
        CHECK(acc.components() == oracle.components());
        CHECK(acc.nout == w);

        if (trial % 10 == 0 && acc.layers.size() >= 3) {
            size_t cut1 = acc.layers.size() / 3 + 1, cut2 = 2 * acc.layers.size() / 3 + 1;
            cut2 = std::min(cut2, acc.layers.size() - 1);
            if (cut1 < cut2) {
                auto part = [&](size_t from, size_t to) {
                    TrainMorphism m = layer_morphism(acc.layers[from]);
                    for (size_t k = from + 1; k < to; ++k) m = sew(m, layer_morphism(acc.layers[k]));
                    return m;
                };
                TrainMorphism a = part(0, cut1), b = part(cut1, cut2),
                              c = part(cut2, acc.layers.size());
                CHECK(sew(sew(a, b), c) == sew(a, sew(b, c)));
                CHECK(sew(sew(a, b), c) == acc);
            }
        }
    }
}

TEST_CASE("evaluation is a kronecker product on disjoint unions") {
    FunctorData F = mobius_functor(Rat(1), 4);
    SplitMix64 rng(7070);

    TrainMorphism f1 = word({{annulus_letter(random_origin_id(rng))},
                             {annulus_letter(random_origin_id(rng))}});
    TrainMorphism f2 = sew(single(trinion_letter()), single(annulus_letter(random_origin_id(rng))));

    TrainEval e1 = evaluate(F, f1);
    TrainEval e2 = evaluate(F, f2);
    TrainEval edu = evaluate(F, disjoint_union(f1, f2));
    CHECK(edu.op == normalize_ref(kron_ref(e1.op, e2.op)));

    TrainEval esw = evaluate(F, disjoint_union(f2, f1));
    CHECK(esw.op == normalize_ref(kron_ref(e2.op, e1.op)));
}

TEST_CASE("plain words evaluate to their generator operators") {
    FunctorData F = mobius_functor(Rat(1), 4);

    TrainEval id = evaluate(F, single(annulus_letter()));
    CHECK(id.scale == 1);
    for (long i = 0; i < F.dim; ++i)
        for (long j = 0; j < F.dim; ++j) CHECK(id.op[i][j] == (i == j ? 1 : 0));

    CHECK(evaluate(F, single(trinion_letter())).op == F.trinion_op);
    CHECK(evaluate(F, single(antitrinion_letter())).op == F.antitrinion_op);

    TrainMorphism cycle = sew(single(perm_letter({1, 0})), single(perm_letter({1, 0})));
    TrainEval ee = evaluate(F, cycle);
    for (long i = 0; i < F.dim * F.dim; ++i)
        for (long j = 0; j < F.dim * F.dim; ++j) CHECK(ee.op[i][j] == (i == j ? 1 : 0));
}

TEST_CASE("origin fixing annulus words have exactly zero defect") {
    SplitMix64 rng(2718);
    for (Rat h : {Rat(1), frac(3, 2)}) {
        FunctorData F = mobius_functor(h, h == 1 ? 6 : 4);
        for (int trial = 0; trial < 10; ++trial) {
            TrainMorphism f1 = word({{annulus_letter(random_origin_id(rng))},
                                     {annulus_letter(random_origin_id(rng))}});
            TrainMorphism f2 = single(annulus_letter(trial % 3 ? random_origin_id(rng) : ""));
            TailProfile d = defect(F, f1, f2);
            CHECK(all_zero(d.op));
            CHECK(d.total == 0);
        }
        // two legs in parallel, fused leg by leg across the seam
        TrainMorphism p1 = layer_morphism(
            {annulus_letter(random_origin_id(rng)), annulus_letter(random_origin_id(rng))});
        TrainMorphism p2 = layer_morphism(
            {annulus_letter(random_origin_id(rng)), annulus_letter(random_origin_id(rng))});
        CHECK(all_zero(defect(F, p1, p2).op));
    }
}

TEST_CASE("general annulus seams pick up a shrinking truncation tail") {
    std::string u = mobius_id(frac(1, 2), frac(1, 8), frac(1, 16));
    std::string v = mobius_id(frac(2, 5), frac(-1, 7), frac(1, 9));

    std::vector<double> plain, dressed;
    for (long N : {4L, 6L, 8L}) {
        FunctorData F = mobius_functor(Rat(1), N);
        TrainMorphism f1 = single(annulus_letter(u));
        TrainMorphism f2 = single(annulus_letter(v));
        CHECK(genus_additive(f1, f2));
        TailProfile d = defect(F, f1, f2);
        plain.push_back(d.right_tail[N / 2]);

        // a genus one element ending in an annulus, sewn onto an annulus
        TrainMorphism g1 = word({{antitrinion_letter()},
                                 {annulus_letter(u), annulus_letter()},
                                 {trinion_letter()},
                                 {annulus_letter(u)}});
        CHECK(g1.genus() == 1);
        CHECK(genus_additive(g1, f2));
        TailProfile dd = defect(F, g1, f2);
        dressed.push_back(dd.right_tail[N / 2]);

        for (size_t L = 0; L + 1 < dd.right_tail.size(); ++L) {
            CHECK(dd.right_tail[L + 1] <= dd.right_tail[L]);
            CHECK(dd.left_tail[L + 1] <= dd.left_tail[L]);
        }
    }
    CAPTURE(plain[0]);
    CAPTURE(plain[1]);
    CAPTURE(plain[2]);
    CAPTURE(dressed[0]);
    CAPTURE(dressed[1]);
    CAPTURE(dressed[2]);
    CHECK(plain[0] > 0);
    CHECK(plain[0] > plain[1]);
    CHECK(plain[1] > plain[2]);
    CHECK(dressed[0] > 0);
    CHECK(dressed[0] > dressed[1]);
    CHECK(dressed[1] > dressed[2]);
}

TEST_CASE("two words for one three holed sphere stay within the truncation defect") {
    std::vector<double> gap;
    for (long N : {4L, 6L}) {
        FunctorData F = mobius_functor(Rat(1), N);
        TrainMorphism left = sew(layer_morphism({trinion_letter(), annulus_letter()}),
                                 single(trinion_letter()));
        TrainMorphism right = sew(layer_morphism({annulus_letter(), trinion_letter()}),
                                  single(trinion_letter()));
        CHECK(left.genus() == 0);
        CHECK(right.genus() == 0);
        RatMat d = evaluate(F, left).op;
        RatMat r = evaluate(F, right).op;
        for (size_t i = 0; i < d.size(); ++i)
            for (size_t j = 0; j < d[i].size(); ++j) d[i][j] -= r[i][j];
        gap.push_back(sup_abs(d));
    }
    CAPTURE(gap[0]);
    CAPTURE(gap[1]);
    CHECK(gap[0] < 1.0);
    CHECK(gap[1] <= gap[0]);
}

TEST_CASE("substitution profiles separate finite rank from the identity") {
    FunctorData F = mobius_functor(Rat(1), 6);
    SplitMix64 rng(424242);

    RatMat fin(F.dim, std::vector<Rat>(F.dim * F.dim, Rat(0)));
    for (long m = 0; m <= 2; ++m)
        for (long d = 0; d <= 2; ++d)
            for (long q = 0; d + q <= 2; ++q) fin[m][d * F.dim + q] = frac(1, 1 + m + d + q);
    PolycompactReport rep = polycompact_score(F, fin, 2, 1, 3, rng);
    CHECK(rep.score == 0);
    CHECK(rep.decaying);
    for (const TailProfile& p : rep.input_slots)
        for (size_t L = 2; L < p.right_tail.size(); ++L) CHECK(p.right_tail[L] == 0);

    RatMat eye(F.dim, std::vector<Rat>(F.dim, Rat(0)));
    for (long i = 0; i < F.dim; ++i) eye[i][i] = 1;
    PolycompactReport rid = polycompact_score(F, eye, 1, 1, 2, rng);
    CHECK_FALSE(rid.decaying);
    CHECK(rid.score == doctest::Approx(std::sqrt(3.0 / 6.0)).epsilon(1e-12));

    PolycompactReport rtr = polycompact_score(F, F.trinion_op, 2, 1, 3, rng);
    CHECK(rtr.input_slots.size() == 2);
    CHECK(rtr.output_slots.size() == 1);
    for (const TailProfile& p : rtr.input_slots) {
        CHECK(p.right_tail.size() == 7);
        for (size_t L = 0; L + 1 < p.right_tail.size(); ++L)
            CHECK(p.right_tail[L + 1] <= p.right_tail[L]);
    }
}

TEST_CASE("bad inputs are rejected") {
    CHECK_THROWS_AS(mobius_functor(Rat(0), 4), std::domain_error);
    CHECK_THROWS_AS(mobius_functor(Rat(-2), 4), std::domain_error);

    FunctorData F = mobius_functor(Rat(1), 4);
    CHECK_THROWS_AS(evaluate(F, single(annulus_letter("1,2"))), std::invalid_argument);
    CHECK_THROWS_AS(evaluate(F, single(annulus_letter("2,0,0"))), std::domain_error);

    FunctorData empty;
    CHECK_THROWS_AS(evaluate(empty, single(annulus_letter())), std::invalid_argument);

    TrainMorphism wide = single(annulus_letter());
    for (int i = 0; i < 5; ++i) wide = disjoint_union(wide, single(annulus_letter()));
    CHECK_THROWS_AS(evaluate(F, wide), std::runtime_error);

    CHECK_THROWS_AS(tail_profile(F, RatMat(2, std::vector<Rat>(2, Rat(0))), 1, 1),
                    std::invalid_argument);
}
