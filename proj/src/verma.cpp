#include "virlab/verma.hpp"

#include <algorithm>
#include <stdexcept>

#include "exact_linalg.hpp"

namespace virlab {

long partition_level(const Partition& p) {
    long s = 0;
    for (long x : p) s += x;
    return s;
}

namespace {

void gen_parts(long d, long max_part, Partition& cur, std::vector<Partition>& out) {
    if (d == 0) {
        out.push_back(cur);
        return;
    }
    for (long p = std::min(d, max_part); p >= 1; --p) {
        cur.push_back(p);
        gen_parts(d - p, p, cur, out);
        cur.pop_back();
    }
}

}  // namespace

std::vector<Partition> partitions_of(long d) {
    if (d < 0) return {};
    std::vector<Partition> out;
    Partition cur;
    gen_parts(d, d, cur, out);
    std::sort(out.begin(), out.end());
    return out;
}

void Sl2Vector::add(long level, const Rat& x) {
    if (x == 0) return;
    Rat& slot = comp[level];
    slot += x;
    if (slot == 0) comp.erase(level);
}

void VirVector::add(const Partition& p, const Rat& x) {
    if (x == 0) return;
    Rat& slot = comp[p];
    slot += x;
    if (slot == 0) comp.erase(p);
}

Sl2Vector vacuum(const Sl2Verma&) {
    Sl2Vector v;
    v.comp[0] = 1;
    return v;
}

VirVector vacuum(const VirVerma&) {
    VirVector v;
    v.comp[Partition{}] = 1;
    return v;
}

Sl2Vector basis_vector(const Sl2Verma& m, long level) {
    if (level < 0 || level > m.max_level)
        throw std::invalid_argument("basis_vector: level outside module window");
    Sl2Vector v;
    v.comp[level] = 1;
    return v;
}

VirVector basis_vector(const VirVerma& m, const Partition& p) {
    if (!std::is_sorted(p.begin(), p.end(), std::greater<long>()))
        throw std::invalid_argument("basis_vector: parts must be weakly decreasing");
    for (long x : p)
        if (x < 1) throw std::invalid_argument("basis_vector: parts must be positive");
    if (partition_level(p) > m.max_level)
        throw std::invalid_argument("basis_vector: level outside module window");
    VirVector v;
    v.comp[p] = 1;
    return v;
}

Sl2Vector act(const Sl2Verma& m, long k, const Sl2Vector& v) {
    if (k < -1 || k > 1) throw std::invalid_argument("sl2 act: mode must be -1, 0 or 1");
    Sl2Vector out;
    out.truncated = v.truncated;
    for (const auto& [lvl, x] : v.comp) {
        if (k == 0) {
            out.add(lvl, (m.h + lvl) * x);
        } else if (k == 1) {
            if (lvl >= 1) out.add(lvl - 1, Rat(lvl) * (2 * m.h + (lvl - 1)) * x);
        } else {
            if (lvl + 1 > m.max_level)
                out.truncated = true;
            else
                out.add(lvl + 1, x);
        }
    }
    return out;
}

namespace {

VirVector vir_apply(const VirVerma& m, long j, const VirVector& v);
const VirVector& vir_act_basis(const VirVerma& m, long j, const Partition& lam);

// Straightening results are cached per (module, mode, partition); the
// recursion revisits the same monomials heavily.
using BasisKey = std::tuple<Rat, Rat, long, long, Partition>;
thread_local std::map<BasisKey, VirVector> basis_cache;

VirVector vir_act_basis_raw(const VirVerma& m, long j, const Partition& lam) {
    VirVector out;
    if (lam.empty()) {
        if (j >= 1) return out;
        if (j == 0) {
            out.add(Partition{}, m.h);
            return out;
        }
        if (-j > m.max_level) {
            out.truncated = true;
            return out;
        }
        out.add(Partition{-j}, Rat(1));
        return out;
    }
    long lead = -lam[0];
    if (j <= lead) {
        if (partition_level(lam) - j > m.max_level) {
            out.truncated = true;
            return out;
        }
        Partition p;
        p.reserve(lam.size() + 1);
        p.push_back(-j);
        p.insert(p.end(), lam.begin(), lam.end());
        out.add(p, Rat(1));
        return out;
    }
    Partition mu(lam.begin() + 1, lam.end());
    const VirVector& inner = vir_act_basis(m, j, mu);
    out = vir_apply(m, lead, inner);
    const VirVector& swapped = vir_act_basis(m, j + lead, mu);
    out.truncated = out.truncated || swapped.truncated;
    for (const auto& [p, x] : swapped.comp) out.add(p, Rat(j - lead) * x);
    if (j + lead == 0) {
        Rat central = m.c * frac(j * j * j - j, 12);
        out.add(mu, central);
    }
    return out;
}

const VirVector& vir_act_basis(const VirVerma& m, long j, const Partition& lam) {
    BasisKey key{m.h, m.c, m.max_level, j, lam};
    auto it = basis_cache.find(key);
    if (it != basis_cache.end()) return it->second;
    VirVector out = vir_act_basis_raw(m, j, lam);
    return basis_cache.emplace(std::move(key), std::move(out)).first->second;
}

VirVector vir_apply(const VirVerma& m, long j, const VirVector& v) {
    VirVector out;
    out.truncated = v.truncated;
    for (const auto& [p, x] : v.comp) {
        const VirVector& t = vir_act_basis(m, j, p);
        out.truncated = out.truncated || t.truncated;
        for (const auto& [q, y] : t.comp) out.add(q, x * y);
    }
    return out;
}

}  // namespace

VirVector act(const VirVerma& m, long k, const VirVector& v) { return vir_apply(m, k, v); }

std::vector<std::vector<Rat>> shapovalov_gram(const Sl2Verma& m, long level) {
    if (level < 0 || level > m.max_level)
        throw std::invalid_argument("shapovalov_gram: level outside module window");
    Sl2Vector x = basis_vector(m, level);
    for (long i = 0; i < level; ++i) x = act(m, 1, x);
    auto it = x.comp.find(0);
    Rat g = (it == x.comp.end()) ? Rat(0) : it->second;
    return {{g}};
}

std::vector<std::vector<Rat>> shapovalov_gram(const VirVerma& m, long level) {
    if (level < 0 || level > m.max_level)
        throw std::invalid_argument("shapovalov_gram: level outside module window");
    auto parts = partitions_of(level);
    std::size_t n = parts.size();
    detail::RatMat g(n, detail::RatVec(n, Rat(0)));
    for (std::size_t col = 0; col < n; ++col) {
        VirVector x = basis_vector(m, parts[col]);
        for (std::size_t row = 0; row < n; ++row) {
            VirVector y = x;
            for (long part : parts[row]) y = act(m, part, y);
            auto it = y.comp.find(Partition{});
            g[row][col] = (it == y.comp.end()) ? Rat(0) : it->second;
        }
    }
    return g;
}

namespace {

template <class Module>
UnitarityReport unitarity_impl(const Module& m, long up_to) {
    UnitarityReport rep;
    for (long d = 1; d <= up_to; ++d) {
        detail::RatMat g = shapovalov_gram(m, d);
        int n = static_cast<int>(g.size());
        for (int k = 1; k <= n; ++k) {
            detail::RatMat sub(k, detail::RatVec(k));
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) sub[i][j] = g[i][j];
            if (detail::det(sub) > 0) continue;
            rep.unitarizable = false;
            rep.level = d;
            detail::RatVec x(n, Rat(0));
            if (k == 1) {
                x[0] = 1;
            } else {
                detail::RatMat a(k - 1, detail::RatVec(k - 1));
                detail::RatVec b(k - 1);
                for (int i = 0; i < k - 1; ++i) {
                    b[i] = g[i][k - 1];
                    for (int j = 0; j < k - 1; ++j) a[i][j] = g[i][j];
                }
                auto y = detail::solve(a, b);
                if (!y) throw std::logic_error("unitarity witness: leading block singular");
                for (int i = 0; i < k - 1; ++i) x[i] = -(*y)[i];
                x[k - 1] = 1;
            }
            Rat norm(0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) norm += x[i] * g[i][j] * x[j];
            rep.witness = x;
            rep.witness_norm = norm;
            return rep;
        }
    }
    return rep;
}

}  // namespace

UnitarityReport is_unitarizable(const Sl2Verma& m, long up_to) { return unitarity_impl(m, up_to); }
UnitarityReport is_unitarizable(const VirVerma& m, long up_to) { return unitarity_impl(m, up_to); }

Sl2Verma truncate(const Sl2Verma& m, long new_max) {
    if (new_max < 0 || new_max > m.max_level)
        throw std::invalid_argument("truncate: window can only shrink");
    return {m.h, new_max};
}

VirVerma truncate(const VirVerma& m, long new_max) {
    if (new_max < 0 || new_max > m.max_level)
        throw std::invalid_argument("truncate: window can only shrink");
    return {m.h, m.c, new_max};
}

Sl2Vector truncate(const Sl2Vector& v, long new_max) {
    Sl2Vector out;
    out.truncated = v.truncated;
    for (const auto& [lvl, x] : v.comp) {
        if (lvl > new_max)
            out.truncated = true;
        else
            out.add(lvl, x);
    }
    return out;
}

VirVector truncate(const VirVector& v, long new_max) {
    VirVector out;
    out.truncated = v.truncated;
    for (const auto& [p, x] : v.comp) {
        if (partition_level(p) > new_max)
            out.truncated = true;
        else
            out.add(p, x);
    }
    return out;
}

}  // namespace virlab
