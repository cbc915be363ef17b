#pragma once

#include "virlab/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace virlab {

using RatMat = std::vector<std::vector<Rat>>;

// Laurent polynomial in two variables over Q, sparse on (x-exponent,
// y-exponent) pairs.
struct BiLaurent {
    std::map<std::pair<long, long>, Rat> coef;

    void add(long a, long b, const Rat& x);
    BiLaurent operator+(const BiLaurent& o) const;
    BiLaurent operator-(const BiLaurent& o) const;
    BiLaurent operator*(const BiLaurent& o) const;
    bool is_zero() const { return coef.empty(); }
    Rat eval(const Rat& x, const Rat& y) const;  // x, y nonzero
    bool operator==(const BiLaurent& o) const { return coef == o.coef; }
};

// Matrix elements of a weight-mu field between truncated sl2 highest
// weight modules: entry [m][n] multiplies u^(delta + m - n), with both
// levels cut at N.  A cap of 0 declares the module exactly one
// dimensional (levels above the cap are genuine zeros, not unknowns);
// cap -1 is plain truncation.  `basis` spans all solutions of the
// mode-(-1,0,1) covariance equations restricted to the window.
struct PrimarySolution {
    Rat mu;
    Rat h_src;
    Rat h_tgt;
    long N = 0;
    long src_cap = -1;
    long tgt_cap = -1;
    Rat delta;
    std::vector<RatMat> basis;
};

PrimarySolution solve_primary(const Rat& mu, const Rat& h_src, const Rat& h_tgt, long N,
                              long src_cap = -1, long tgt_cap = -1);

// The graded space V_0 + V_1 + ... + V_S with V_0 one dimensional and
// V_n the weight-n sl2 module truncated at level N.  Fields of the top
// vectors e_i act by blocks alpha^k_{ij} * Pi^k_{ij}(x) : V_j -> V_k,
// where Pi is the normalized primary (entry [0][0] = 1) and the alpha
// are fixed by the composition identities in the pole window.
class GradedModel {
public:
    long S = 0;
    long N = 0;
    Rat h;    // weight tag of the construction
    Rat q_r;  // 1 / (2h - 1)

    long dim(long spin) const { return spin == 0 ? 1 : N + 1; }
    bool block_exists(long k, long i, long j) const;
    // Normalized block Pi^k_{ij}; throws when the block is structurally
    // absent.
    const RatMat& pi(long k, long i, long j) const;
    Rat alpha(long k, long i, long j) const;

    // Mode kappa of the spin-2 field restricted to V_s -> V_s, read off
    // T(u) = sum_k L_k u^(k-2) on the diagonal blocks.
    RatMat t_mode(long s, long kappa) const;
    // Every (target spin, source spin) block of the same mode.
    std::map<std::pair<long, long>, RatMat> t_mode_blocks(long kappa) const;
    // Central term measured from ([T_2, T_-2] - 4 T_0) on the lowest
    // vector of V_s, all summand routes included.  Reported, never
    // asserted.
    Rat measured_central_charge(long s) const;

    // storage (filled by build_V)
    std::map<std::tuple<long, long, long>, RatMat> blocks;
    std::map<std::tuple<long, long, long>, Rat> alphas;
};

struct BuildReport {
    bool success = false;
    long equations = 0;
    long verified = 0;
    std::vector<std::string> notes;
};

// Solve for the alpha structure constants of the spin-(0..S) model at
// truncation N, tagged by the rational weight h (h != 1/2).  Throws
// std::domain_error for h = 1/2, std::invalid_argument for S < 2, and
// std::runtime_error when no consistent exact assignment is found;
// diagnostics always filled when given.
GradedModel build_V(const Rat& h, long S, long N, BuildReport* report = nullptr);

struct CleanCheck {
    long monomials = 0;
    long points = 0;
    Rat max_abs_error;  // exact; zero on pass
    bool pass = false;
};

// Composition identity l_x(e_i) l_y(e_j) = l_y(l_{x-y}(e_i) e_j) between
// V_s and V_f, compared coefficient-wise on the monomials that are fully
// inside the spin/level window, then evaluated at random rational points.
CleanCheck check_ope(const GradedModel& model, long i, long j, long f, long s, long points,
                     SplitMix64& rng);

// Same identity contracted with random vectors through the descendant
// rule instead of read off entry by entry.
CleanCheck smeared_associativity(const GradedModel& model, long i, long j, long f, long s,
                                 long points, SplitMix64& rng);

// Right insertions r_u(e_j) a = l_{-u}(a) e_j at a fixed rational u:
// block (k, s) holds the matrix V_s -> V_k with source level d and
// target level d', numeric at the given u.
struct RightField {
    long j = 0;
    Rat u;
    std::map<std::pair<long, long>, RatMat> blocks;
};
RightField right_field(const GradedModel& model, long j, const Rat& u);

// Left fields against right insertions; their commutator must vanish on
// the clean window.
CleanCheck commutant_check(const GradedModel& model, long i, long j, long f, long s, long points,
                           SplitMix64& rng);

// l_x(e_i) applied to the vacuum is the translate exp(x L_{-1}) e_i and
// the derivative rule holds on every stored block: exact.
bool translation_check(const GradedModel& model, long i);

// Intertwiners tau : V_{h1} (x) V_{h2} -> V_{h3} for the three-holed
// sphere with the insertion frozen at rational x != 0, all modules
// truncated at level N.  tau is flattened as tau[m][d * (N+1) + q] with
// d the V_{h1} level and q the V_{h2} level.  dim counts the solution
// space of the in-window equivariance constraints.
struct TrinionResult {
    long dim = 0;
    std::vector<RatMat> basis;
};
TrinionResult trinion_intertwiner(const Rat& h1, const Rat& h2, const Rat& h3, long N,
                                  const Rat& x);

// Cross-check: the multiplication m_x(a, b) = l_x(a) b of the model,
// restricted to V_i (x) V_j -> V_k, spans the same line as the
// trinion solution at weights (i, j, k).
bool trinion_matches_model(const GradedModel& model, long i, long j, long k, const Rat& x);

// V extended by one sl2 module of weight h (unitarizable, h != 1/2):
// V-fields act on V_h through beta_i * Pi^h_i, products of two V_h
// vectors vanish, and fields of V_h vectors on V come from skew
// symmetry.  The extension is exact on the abelian, unit, covariance
// and leading cells; the remaining composition cells are only
// asymptotic and are excluded from exact checks.
struct ExtendedModel {
    GradedModel base;
    Rat h;
    std::vector<Rat> beta;   // beta[i], i = 0..S
    std::vector<RatMat> pih; // Pi^h_i : V_h -> V_h of weight i (index 0 unused identity)
    Rat q_r;                 // 1 / (2h - 1)
};

ExtendedModel extend_V(const GradedModel& model, const Rat& h, BuildReport* report = nullptr);

// Exact subset of the composition identities on the extension summand:
// unit cells, abelian cells, covariance of the beta blocks, and the
// leading cells that determine beta.
CleanCheck check_ope_extended(const ExtendedModel& ext, long i, long j, long points,
                              SplitMix64& rng);

// 1 / (2h - 1); the reparametrization degenerates at h = 1/2.
Rat q_r_parameter(const Rat& h);

}  // namespace virlab
