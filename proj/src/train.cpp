#include "virlab/train.hpp"

#include "virlab/mobius.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace virlab {

namespace {

long ipow(long b, long e) {
    long r = 1;
    for (long t = 0; t < e; ++t) r *= b;
    return r;
}

RatMat zeros(long rows, long cols) { return RatMat(rows, std::vector<Rat>(cols, Rat(0))); }

RatMat matmul(const RatMat& A, const RatMat& B) {
    long n = static_cast<long>(A.size());
    long k = static_cast<long>(B.size());
    long m = static_cast<long>(B[0].size());
    if (static_cast<long>(A[0].size()) != k)
        throw std::invalid_argument("matmul: inner dimensions disagree");
    RatMat C = zeros(n, m);
    for (long i = 0; i < n; ++i)
        for (long t = 0; t < k; ++t) {
            const Rat& a = A[i][t];
            if (a == 0) continue;
            for (long j = 0; j < m; ++j)
                if (B[t][j] != 0) C[i][j] += a * B[t][j];
        }
    return C;
}

RatMat kron(const RatMat& A, const RatMat& B) {
    long ra = static_cast<long>(A.size()), ca = static_cast<long>(A[0].size());
    long rb = static_cast<long>(B.size()), cb = static_cast<long>(B[0].size());
    RatMat C = zeros(ra * rb, ca * cb);
    for (long i = 0; i < ra; ++i)
        for (long j = 0; j < ca; ++j) {
            if (A[i][j] == 0) continue;
            for (long p = 0; p < rb; ++p)
                for (long q = 0; q < cb; ++q)
                    if (B[p][q] != 0) C[i * rb + p][j * cb + q] = A[i][j] * B[p][q];
        }
    return C;
}

struct UnionFind {
    std::vector<long> parent;

    explicit UnionFind(long n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    long find(long x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(long a, long b) { parent[find(a)] = find(b); }
};

long layer_in(const TrainLayer& l) {
    long s = 0;
    for (const TrainLetter& t : l) s += t.n_in();
    return s;
}

long layer_out(const TrainLayer& l) {
    long s = 0;
    for (const TrainLetter& t : l) s += t.n_out();
    return s;
}

bool pure_annulus(const TrainLayer& l) {
    for (const TrainLetter& t : l)
        if (t.kind != TrainLetter::Annulus) return false;
    return true;
}

// Generalized binomial coefficient C(alpha, q) over Q.
Rat binom_rat(const Rat& alpha, long q) {
    Rat r(1);
    for (long t = 0; t < q; ++t) {
        r *= alpha - t;
        r /= t + 1;
    }
    return r;
}

std::array<Rat, 3> parse_mobius_id(const std::string& id) {
    if (id.empty()) return {Rat(1), Rat(0), Rat(0)};
    size_t p = id.find(',');
    size_t q = id.find(',', p == std::string::npos ? p : p + 1);
    if (p == std::string::npos || q == std::string::npos)
        throw std::invalid_argument("annulus key '" + id + "' is not of the form a,b,c");
    return {rat_parse(id.substr(0, p)), rat_parse(id.substr(p + 1, q - p - 1)),
            rat_parse(id.substr(q + 1))};
}

TrainEval normalize_op(RatMat A) {
    Rat best(0);
    long bi = -1, bj = -1;
    for (long i = 0; i < static_cast<long>(A.size()); ++i)
        for (long j = 0; j < static_cast<long>(A[i].size()); ++j) {
            Rat a = abs(A[i][j]);
            if (a > best) {
                best = a;
                bi = i;
                bj = j;
            }
        }
    if (bi < 0) return {A, Rat(0)};
    Rat s = A[bi][bj];
    for (auto& row : A)
        for (Rat& x : row) x /= s;
    return {std::move(A), s};
}

}  // namespace

long TrainLetter::n_in() const {
    switch (kind) {
        case Trinion: return 2;
        case Perm: return static_cast<long>(perm.size());
        default: return 1;
    }
}

long TrainLetter::n_out() const {
    switch (kind) {
        case Antitrinion: return 2;
        case Perm: return static_cast<long>(perm.size());
        default: return 1;
    }
}

TrainLetter annulus_letter(const std::string& id) { return {TrainLetter::Annulus, id, {}}; }
TrainLetter trinion_letter() { return {TrainLetter::Trinion, "", {}}; }
TrainLetter antitrinion_letter() { return {TrainLetter::Antitrinion, "", {}}; }

TrainLetter perm_letter(const std::vector<long>& p) {
    std::vector<bool> seen(p.size(), false);
    for (long x : p) {
        if (x < 0 || x >= static_cast<long>(p.size()) || seen[x])
            throw std::invalid_argument("perm_letter: not a permutation");
        seen[x] = true;
    }
    return {TrainLetter::Perm, "", p};
}

long TrainMorphism::genus_of(long comp) const {
    long b = 0;
    for (long c : in_comp) b += c == comp;
    for (long c : out_comp) b += c == comp;
    long twice = 2 - comp_chi[comp] - b;
    if (twice < 0 || twice % 2 != 0) throw std::logic_error("genus_of: inconsistent topology");
    return twice / 2;
}

long TrainMorphism::genus() const {
    long g = 0;
    for (long c = 0; c < components(); ++c) g += genus_of(c);
    return g;
}

TrainObject domain(const TrainMorphism& m) { return {m.nin}; }
TrainObject codomain(const TrainMorphism& m) { return {m.nout}; }

TrainMorphism layer_morphism(const TrainLayer& l) {
    if (l.empty()) throw std::invalid_argument("layer_morphism: empty layer");
    TrainMorphism m;
    m.layers = {l};
    for (const TrainLetter& t : l) {
        long comp = m.components();
        if (t.kind == TrainLetter::Perm) {
            // a bundle of wires, one component per strand
            for (long s = 0; s < static_cast<long>(t.perm.size()); ++s) {
                m.in_comp.push_back(comp + s);
                m.comp_chi.push_back(0);
            }
            m.out_comp.resize(m.nout + t.perm.size(), -1);
            for (long s = 0; s < static_cast<long>(t.perm.size()); ++s)
                m.out_comp[m.nout + t.perm[s]] = comp + s;
        } else {
            for (long s = 0; s < t.n_in(); ++s) m.in_comp.push_back(comp);
            for (long s = 0; s < t.n_out(); ++s) m.out_comp.push_back(comp);
            m.comp_chi.push_back(t.kind == TrainLetter::Annulus ? 0 : -1);
        }
        m.nin += t.n_in();
        m.nout += t.n_out();
    }
    return m;
}

TrainMorphism single(const TrainLetter& l) { return layer_morphism({l}); }

TrainMorphism sew(const TrainMorphism& f1, const TrainMorphism& f2) {
    if (f1.nout != f2.nin)
        throw std::invalid_argument("sew: codomain size " + std::to_string(f1.nout) +
                                    " does not match domain size " + std::to_string(f2.nin));
    long c1 = f1.components(), c2 = f2.components();
    UnionFind uf(c1 + c2);
    for (long i = 0; i < f1.nout; ++i) uf.unite(f1.out_comp[i], c1 + f2.in_comp[i]);

    std::vector<long> chi(c1 + c2, 0);
    for (long c = 0; c < c1; ++c) chi[uf.find(c)] += f1.comp_chi[c];
    for (long c = 0; c < c2; ++c) chi[uf.find(c1 + c)] += f2.comp_chi[c];

    TrainMorphism r;
    r.layers = f1.layers;
    r.layers.insert(r.layers.end(), f2.layers.begin(), f2.layers.end());
    r.nin = f1.nin;
    r.nout = f2.nout;
    std::map<long, long> label;
    auto id_of = [&](long root) {
        auto it = label.find(root);
        if (it != label.end()) return it->second;
        long next = static_cast<long>(label.size());
        label[root] = next;
        r.comp_chi.push_back(chi[root]);
        return next;
    };
    for (long i = 0; i < f1.nin; ++i) r.in_comp.push_back(id_of(uf.find(f1.in_comp[i])));
    for (long j = 0; j < f2.nout; ++j) r.out_comp.push_back(id_of(uf.find(c1 + f2.out_comp[j])));
    for (long c = 0; c < c1 + c2; ++c)
        if (uf.find(c) == c) id_of(c);
    return r;
}

TrainMorphism disjoint_union(const TrainMorphism& a, const TrainMorphism& b) {
    TrainMorphism A = a, B = b;
    auto pad = [](TrainMorphism m, size_t len) {
        while (m.layers.size() < len) {
            std::vector<long> idp(m.nout);
            std::iota(idp.begin(), idp.end(), 0);
            m = sew(m, layer_morphism({perm_letter(idp)}));
        }
        return m;
    };
    A = pad(std::move(A), B.layers.size());
    B = pad(std::move(B), A.layers.size());

    TrainMorphism r;
    for (size_t k = 0; k < A.layers.size(); ++k) {
        TrainLayer l = A.layers[k];
        l.insert(l.end(), B.layers[k].begin(), B.layers[k].end());
        r.layers.push_back(std::move(l));
    }
    r.nin = A.nin + B.nin;
    r.nout = A.nout + B.nout;
    long off = A.components();
    r.in_comp = A.in_comp;
    r.out_comp = A.out_comp;
    for (long c : B.in_comp) r.in_comp.push_back(c + off);
    for (long c : B.out_comp) r.out_comp.push_back(c + off);
    r.comp_chi = A.comp_chi;
    r.comp_chi.insert(r.comp_chi.end(), B.comp_chi.begin(), B.comp_chi.end());
    return r;
}

bool genus_additive(const TrainMorphism& f1, const TrainMorphism& f2) {
    return sew(f1, f2).genus() == f1.genus() + f2.genus();
}

std::string mobius_id(const Rat& a, const Rat& b, const Rat& c) {
    return rat_str(a) + "," + rat_str(b) + "," + rat_str(c);
}

FunctorData mobius_functor(const Rat& h, long N) {
    if (h <= 0) throw std::domain_error("mobius_functor: weight must be positive");
    if (N < 0) throw std::invalid_argument("mobius_functor: negative truncation");
    FunctorData F;
    F.dim = N + 1;
    F.level.resize(N + 1);
    std::iota(F.level.begin(), F.level.end(), 0);

    F.annulus_op = [h, N](const std::string& id) {
        auto [a, b, c] = parse_mobius_id(id);
        MobiusMap f = MobiusMap::make(RatC(a), RatC(b), RatC(c), RatC(Rat(1)));
        if (!in_mantle(f))
            throw std::domain_error("annulus key " + (id.empty() ? "<identity>" : id) +
                                    " is not a contracting map");
        // column n of psi -> (cz+1)^(-2h) psi((az+b)/(cz+1)):
        // coefficients of (az+b)^n (cz+1)^(-(2h+n)) up to degree N
        RatMat op = zeros(N + 1, N + 1);
        for (long n = 0; n <= N; ++n) {
            std::vector<Rat> pw(N + 1, Rat(0));
            Rat bin(1);
            for (long p = 0; p <= std::min(n, N); ++p) {
                Rat ap(1), bq(1);
                for (long t = 0; t < p; ++t) ap *= a;
                for (long t = 0; t < n - p; ++t) bq *= b;
                pw[p] = bin * ap * bq;
                bin *= n - p;
                bin /= p + 1;
            }
            Rat alpha = -(2 * h + n);
            std::vector<Rat> sq(N + 1, Rat(0));
            Rat cq(1);
            for (long q = 0; q <= N; ++q) {
                sq[q] = binom_rat(alpha, q) * cq;
                cq *= c;
            }
            for (long m = 0; m <= N; ++m)
                for (long p = 0; p <= m; ++p)
                    if (pw[p] != 0 && sq[m - p] != 0) op[m][n] += pw[p] * sq[m - p];
        }
        return op;
    };

    F.fuse = [](const std::string& u, const std::string& v) {
        auto [a1, b1, c1] = parse_mobius_id(u);
        auto [a2, b2, c2] = parse_mobius_id(v);
        // u sewn first, then v; the fused map is u after v in the chart d = 1
        Rat A = a1 * a2 + b1 * c2, B = a1 * b2 + b1;
        Rat C = c1 * a2 + c2, D = c1 * b2 + 1;
        if (D == 0) throw std::domain_error("fuse: composite leaves the chart");
        return mobius_id(A / D, B / D, C / D);
    };

    TrinionResult tr = trinion_intertwiner(h, h, h, N, frac(1, 2));
    if (tr.dim < 1)
        throw std::runtime_error("mobius_functor: no trinion intertwiner at this weight");
    F.trinion_op = normalize_op(tr.basis[0]).op;
    F.antitrinion_op = zeros(F.dim * F.dim, F.dim);
    for (long i = 0; i < F.dim; ++i)
        for (long j = 0; j < F.dim * F.dim; ++j) F.antitrinion_op[j][i] = F.trinion_op[i][j];
    return F;
}

namespace {

RatMat perm_op(long D, const std::vector<long>& perm) {
    long n = static_cast<long>(perm.size());
    long dim = ipow(D, n);
    RatMat P = zeros(dim, dim);
    for (long col = 0; col < dim; ++col) {
        long rest = col, row = 0;
        for (long s = n - 1; s >= 0; --s) {
            long digit = rest % D;
            rest /= D;
            row += digit * ipow(D, n - 1 - perm[s]);
        }
        P[row][col] = 1;
    }
    return P;
}

RatMat letter_op(const FunctorData& F, const TrainLetter& t) {
    switch (t.kind) {
        case TrainLetter::Annulus:
            if (!F.annulus_op)
                throw std::invalid_argument("evaluate: functor has no annulus operators");
            return F.annulus_op(t.id);
        case TrainLetter::Trinion:
            if (F.trinion_op.empty())
                throw std::invalid_argument("evaluate: functor has no trinion operator");
            return F.trinion_op;
        case TrainLetter::Antitrinion:
            if (F.antitrinion_op.empty())
                throw std::invalid_argument("evaluate: functor has no antitrinion operator");
            return F.antitrinion_op;
        default: return perm_op(F.dim, t.perm);
    }
}

}  // namespace

TrainEval evaluate(const FunctorData& F, const TrainMorphism& m) {
    if (F.dim <= 0) throw std::invalid_argument("evaluate: functor has no space");
    long width = m.nin;
    for (const TrainLayer& l : m.layers) {
        if (layer_in(l) != width)
            throw std::invalid_argument("evaluate: layer widths do not chain");
        width = layer_out(l);
        if (ipow(F.dim, std::max(layer_in(l), width)) > 1024)
            throw std::runtime_error("evaluate: truncated tensor space too large");
    }
    if (width != m.nout) throw std::invalid_argument("evaluate: layer widths do not chain");

    std::vector<TrainLayer> layers = m.layers;
    if (F.fuse) {
        size_t k = 0;
        while (k + 1 < layers.size()) {
            if (pure_annulus(layers[k]) && pure_annulus(layers[k + 1])) {
                TrainLayer merged;
                for (size_t j = 0; j < layers[k].size(); ++j)
                    merged.push_back(annulus_letter(F.fuse(layers[k][j].id, layers[k + 1][j].id)));
                layers[k] = std::move(merged);
                layers.erase(layers.begin() + k + 1);
            } else {
                ++k;
            }
        }
    }

    RatMat cur;
    if (layers.empty()) {
        cur = zeros(ipow(F.dim, m.nin), ipow(F.dim, m.nin));
        for (long i = 0; i < static_cast<long>(cur.size()); ++i) cur[i][i] = 1;
    } else {
        for (size_t k = 0; k < layers.size(); ++k) {
            RatMat op = letter_op(F, layers[k][0]);
            for (size_t j = 1; j < layers[k].size(); ++j) op = kron(op, letter_op(F, layers[k][j]));
            cur = k == 0 ? std::move(op) : matmul(op, cur);
        }
    }
    return normalize_op(std::move(cur));
}

TailProfile tail_profile(const FunctorData& F, const RatMat& A, long width_in, long width_out) {
    long D = F.dim;
    long cols = ipow(D, width_in), rows = ipow(D, width_out);
    if (static_cast<long>(A.size()) != rows || static_cast<long>(A[0].size()) != cols)
        throw std::invalid_argument("tail_profile: operator does not fit the tensor widths");
    auto tensor_level = [&](long idx, long w) {
        long s = 0;
        for (long t = 0; t < w; ++t) {
            s += F.level[idx % D];
            idx /= D;
        }
        return s;
    };
    long lmax = *std::max_element(F.level.begin(), F.level.end());

    std::vector<double> colsq(cols, 0), rowsq(rows, 0);
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j) {
            double x = rat_d(A[i][j]);
            colsq[j] += x * x;
            rowsq[i] += x * x;
        }
    TailProfile p;
    p.op = A;
    p.right_tail.assign(lmax + 1, 0);
    p.left_tail.assign(lmax + 1, 0);
    for (long L = 0; L <= lmax; ++L) {
        double r = 0, l = 0;
        for (long j = 0; j < cols; ++j)
            if (tensor_level(j, width_in) > L) r += colsq[j];
        for (long i = 0; i < rows; ++i)
            if (tensor_level(i, width_out) > L) l += rowsq[i];
        p.right_tail[L] = std::sqrt(r);
        p.left_tail[L] = std::sqrt(l);
    }
    double tot = 0;
    for (double x : colsq) tot += x;
    p.total = std::sqrt(tot);
    return p;
}

TailProfile defect(const FunctorData& F, const TrainMorphism& f1, const TrainMorphism& f2) {
    TrainEval whole = evaluate(F, sew(f1, f2));
    TrainEval e1 = evaluate(F, f1);
    TrainEval e2 = evaluate(F, f2);
    TrainEval prod = normalize_op(matmul(e2.op, e1.op));
    RatMat D = whole.op;
    for (size_t i = 0; i < D.size(); ++i)
        for (size_t j = 0; j < D[i].size(); ++j) D[i][j] -= prod.op[i][j];
    return tail_profile(F, D, f1.nin, f2.nout);
}

PolycompactReport polycompact_score(const FunctorData& F, const RatMat& A, long width_in,
                                    long width_out, long samples, SplitMix64& rng) {
    long D = F.dim;
    long cols = ipow(D, width_in), rows = ipow(D, width_out);
    if (static_cast<long>(A.size()) != rows || static_cast<long>(A[0].size()) != cols)
        throw std::invalid_argument("polycompact_score: operator does not fit the tensor widths");
    long lmax = *std::max_element(F.level.begin(), F.level.end());
    long mid = lmax / 2;

    auto rand_vec = [&] {
        std::vector<Rat> v(D);
        bool any = false;
        for (Rat& x : v) {
            x = rng.rat(4, 4);
            any = any || x != 0;
        }
        if (!any) v[0] = 1;
        return v;
    };
    auto worst = [](TailProfile& acc, const TailProfile& p) {
        if (acc.right_tail.empty()) {
            acc = p;
            return;
        }
        for (size_t i = 0; i < acc.right_tail.size(); ++i) {
            acc.right_tail[i] = std::max(acc.right_tail[i], p.right_tail[i]);
            acc.left_tail[i] = std::max(acc.left_tail[i], p.left_tail[i]);
        }
        acc.total = std::max(acc.total, p.total);
        acc.op = p.op;
    };

    PolycompactReport rep;
    for (long slot = 0; slot < width_in; ++slot) {
        TailProfile acc;
        for (long s = 0; s < samples; ++s) {
            std::vector<std::vector<Rat>> x(width_in);
            for (long t = 0; t < width_in; ++t)
                if (t != slot) x[t] = rand_vec();
            RatMat B = zeros(rows, D);
            for (long j = 0; j < cols; ++j) {
                long rest = j;
                Rat w(1);
                long digit_slot = 0;
                for (long t = width_in - 1; t >= 0; --t) {
                    long digit = rest % D;
                    rest /= D;
                    if (t == slot)
                        digit_slot = digit;
                    else
                        w *= x[t][digit];
                }
                if (w == 0) continue;
                for (long i = 0; i < rows; ++i)
                    if (A[i][j] != 0) B[i][digit_slot] += A[i][j] * w;
            }
            worst(acc, tail_profile(F, B, 1, width_out));
        }
        rep.input_slots.push_back(std::move(acc));
    }
    for (long slot = 0; slot < width_out; ++slot) {
        TailProfile acc;
        for (long s = 0; s < samples; ++s) {
            std::vector<std::vector<Rat>> y(width_out);
            for (long t = 0; t < width_out; ++t)
                if (t != slot) y[t] = rand_vec();
            RatMat B = zeros(D, cols);
            for (long i = 0; i < rows; ++i) {
                long rest = i;
                Rat w(1);
                long digit_slot = 0;
                for (long t = width_out - 1; t >= 0; --t) {
                    long digit = rest % D;
                    rest /= D;
                    if (t == slot)
                        digit_slot = digit;
                    else
                        w *= y[t][digit];
                }
                if (w == 0) continue;
                for (long j = 0; j < cols; ++j)
                    if (A[i][j] != 0) B[digit_slot][j] += A[i][j] * w;
            }
            worst(acc, tail_profile(F, B, width_in, 1));
        }
        rep.output_slots.push_back(std::move(acc));
    }

    rep.score = 0;
    for (const auto* group : {&rep.input_slots, &rep.output_slots})
        for (const TailProfile& p : *group)
            if (!p.right_tail.empty() && p.right_tail[0] > 0)
                rep.score = std::max(rep.score, p.right_tail[mid] / p.right_tail[0]);
    rep.decaying = rep.score < 0.5;
    return rep;
}

}  // namespace virlab
