#pragma once

#include "virlab/rational.hpp"

#include <map>
#include <vector>

namespace virlab {

// Weakly decreasing positive parts; the basis vector L_{-p0} L_{-p1} ... v.
using Partition = std::vector<long>;

long partition_level(const Partition& p);

// All partitions of d, lexicographically ascending: (1,1) < (2).
std::vector<Partition> partitions_of(long d);

// Highest-weight module descriptors, graded by level and cut off above
// max_level.  Actions that would leave the window drop the overflow and
// mark the result as truncated.
struct Sl2Verma {
    Rat h;
    long max_level = 0;
};

struct VirVerma {
    Rat h;
    Rat c;
    long max_level = 0;
};

struct Sl2Vector {
    std::map<long, Rat> comp;  // level -> coefficient
    bool truncated = false;

    void add(long level, const Rat& x);
    bool is_zero() const { return comp.empty(); }
    bool operator==(const Sl2Vector& o) const { return comp == o.comp; }
    bool operator!=(const Sl2Vector& o) const { return !(*this == o); }
};

struct VirVector {
    std::map<Partition, Rat> comp;
    bool truncated = false;

    void add(const Partition& p, const Rat& x);
    bool is_zero() const { return comp.empty(); }
    bool operator==(const VirVector& o) const { return comp == o.comp; }
    bool operator!=(const VirVector& o) const { return !(*this == o); }
};

Sl2Vector vacuum(const Sl2Verma& m);
VirVector vacuum(const VirVerma& m);
Sl2Vector basis_vector(const Sl2Verma& m, long level);
VirVector basis_vector(const VirVerma& m, const Partition& p);

// Generator action.  sl2 modes are restricted to {-1, 0, 1}; Virasoro
// accepts any mode and straightens products back to the partition basis,
// picking up the central term c (j^3 - j)/12 on the way.
Sl2Vector act(const Sl2Verma& m, long k, const Sl2Vector& v);
VirVector act(const VirVerma& m, long k, const VirVector& v);

// Gram matrix of the contravariant form on the given level, in the
// partitions_of ordering.  Level must fit inside the module window.
std::vector<std::vector<Rat>> shapovalov_gram(const Sl2Verma& m, long level);
std::vector<std::vector<Rat>> shapovalov_gram(const VirVerma& m, long level);

// Strict positive definiteness of every level Gram up to the bound.  On
// failure, `witness` holds coefficients (basis_vector order on `level`)
// of a vector with <x, x> = witness_norm <= 0.
struct UnitarityReport {
    bool unitarizable = true;
    long level = 0;
    std::vector<Rat> witness;
    Rat witness_norm = Rat(0);
};

UnitarityReport is_unitarizable(const Sl2Verma& m, long up_to);
UnitarityReport is_unitarizable(const VirVerma& m, long up_to);

// Shrink the level window.
Sl2Verma truncate(const Sl2Verma& m, long new_max);
VirVerma truncate(const VirVerma& m, long new_max);
Sl2Vector truncate(const Sl2Vector& v, long new_max);
VirVector truncate(const VirVector& v, long new_max);

}  // namespace virlab
