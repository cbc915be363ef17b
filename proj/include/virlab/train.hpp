#pragma once

#include "virlab/qpft.hpp"
#include "virlab/rational.hpp"

#include <functional>
#include <string>
#include <vector>

namespace virlab {

// Objects are finite ordered sets; only the size matters, labels run 0..size-1.
struct TrainObject {
    long size = 0;

    friend bool operator==(const TrainObject& a, const TrainObject& b) { return a.size == b.size; }
};

// One surface letter of a sewing word.  Annulus 1->1, trinion 2->1,
// antitrinion 1->2, all of genus zero; a permutation letter is a bundle of
// wires (strand i exits at slot perm[i]).  Annulus letters carry a parameter
// key resolved by the functor data at evaluation time.
struct TrainLetter {
    enum Kind { Annulus, Trinion, Antitrinion, Perm };

    Kind kind = Annulus;
    std::string id;
    std::vector<long> perm;

    long n_in() const;
    long n_out() const;

    friend bool operator==(const TrainLetter& a, const TrainLetter& b) {
        return a.kind == b.kind && a.id == b.id && a.perm == b.perm;
    }
};

TrainLetter annulus_letter(const std::string& id = "");
TrainLetter trinion_letter();
TrainLetter antitrinion_letter();
TrainLetter perm_letter(const std::vector<long>& p);  // throws if p is no permutation

// Letters placed side by side; the widths add up.
using TrainLayer = std::vector<TrainLetter>;

// A composition word, first layer applied first, plus cached topology.
// Boundary circle i of the domain (codomain) lies on component in_comp[i]
// (out_comp[i]); comp_chi holds the Euler characteristic per component.
// Every component keeps at least one free boundary circle on each side, so
// its genus is (2 - chi - boundary) / 2.
struct TrainMorphism {
    std::vector<TrainLayer> layers;
    long nin = 0;
    long nout = 0;
    std::vector<long> in_comp, out_comp;
    std::vector<long> comp_chi;

    long components() const { return static_cast<long>(comp_chi.size()); }
    long genus_of(long comp) const;
    long genus() const;  // sum over components

    friend bool operator==(const TrainMorphism& a, const TrainMorphism& b) {
        return a.layers == b.layers && a.nin == b.nin && a.nout == b.nout &&
               a.in_comp == b.in_comp && a.out_comp == b.out_comp && a.comp_chi == b.comp_chi;
    }
};

TrainObject domain(const TrainMorphism& m);
TrainObject codomain(const TrainMorphism& m);

TrainMorphism single(const TrainLetter& l);
TrainMorphism layer_morphism(const TrainLayer& l);

// Word concatenation f1 then f2, sewing all circles between the codomain of
// f1 and the domain of f2.  Component bookkeeping is merged with a union-find
// and the per-component Euler characteristics add.  Throws
// std::invalid_argument on a boundary mismatch.
TrainMorphism sew(const TrainMorphism& f1, const TrainMorphism& f2);

// Side by side placement; the shorter word is padded with wire layers.
TrainMorphism disjoint_union(const TrainMorphism& a, const TrainMorphism& b);

// Whether g(f1 then f2) = g(f1) + g(f2), i.e. the seam creates no handle.
bool genus_additive(const TrainMorphism& f1, const TrainMorphism& f2);

// Generator operators over the truncated space V (dimension dim, level
// grading `level`).  Annulus operators are produced on demand from the
// letter key; `fuse` composes two keys across a seam (first argument sewn
// first) and may be left empty to disable fusion.  All operators are exact
// rational matrices, so every functor identity that holds does so exactly.
struct FunctorData {
    long dim = 0;
    std::vector<long> level;
    std::function<RatMat(const std::string&)> annulus_op;
    std::function<std::string(const std::string&, const std::string&)> fuse;
    RatMat trinion_op;      // dim x dim^2, tensor index i1*dim + i2
    RatMat antitrinion_op;  // dim^2 x dim
};

// The weight-h module of monomials z^n, n <= N, acted on by contracting maps
// f(z) = (az+b)/(cz+1) through psi(z) -> (cz+1)^(-2h) psi(f(z)); annulus keys
// are "a,b,c" strings of exact rationals.  Maps with b = 0 fix the origin,
// act lower-triangularly and compose exactly at any truncation; general keys
// pick up a truncation tail.  The trinion operator is the two-argument
// intertwiner at insertion 1/2, the antitrinion its transpose.
FunctorData mobius_functor(const Rat& h, long N);
std::string mobius_id(const Rat& a, const Rat& b, const Rat& c);

// Contraction of the generator operators along the word, after fusing
// annulus letters across pure-annulus seams.  The result is normalized by
// its entry of largest magnitude (first in row major order on ties); `scale`
// is that entry, zero for the zero operator.
struct TrainEval {
    RatMat op;
    Rat scale;
};

TrainEval evaluate(const FunctorData& F, const TrainMorphism& m);

// Frobenius tail norms of an operator on tensor powers of V: right_tail[L]
// keeps the columns of total level > L, left_tail[L] the rows.  Both are
// non-increasing in L by construction.  `total` is the full Frobenius norm.
struct TailProfile {
    RatMat op;
    std::vector<double> right_tail;
    std::vector<double> left_tail;
    double total = 0;
};

TailProfile tail_profile(const FunctorData& F, const RatMat& A, long width_in, long width_out);

// D = evaluate(sew(f1,f2)) - evaluate(f2) . evaluate(f1), both sides
// projectively normalized.  Zero exactly when the annulus keys fused across
// the seam represent the contraction exactly.
TailProfile defect(const FunctorData& F, const TrainMorphism& f1, const TrainMorphism& f2);

// Substitution fingerprints of a multi-input operator: for each input slot,
// random product vectors fill the other slots and the tail profile of the
// resulting one-input operator is recorded (entrywise worst case over the
// samples); output slots are paired down the same way.  `score` is the worst
// relative mid-level right tail; an operator scoring near 1 behaves like the
// identity, near 0 like a finite-rank one.
struct PolycompactReport {
    std::vector<TailProfile> input_slots;
    std::vector<TailProfile> output_slots;
    double score = 0;
    bool decaying = false;  // score < 1/2
};

PolycompactReport polycompact_score(const FunctorData& F, const RatMat& A, long width_in,
                                    long width_out, long samples, SplitMix64& rng);

}  // namespace virlab
