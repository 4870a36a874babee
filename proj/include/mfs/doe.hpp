#pragma once

#include "mfs/types.hpp"

namespace mfs {

// Axis-aligned box domain for the simulator inputs.
struct BoxDomain {
    Vector lower;
    Vector upper;

    BoxDomain() = default;
    BoxDomain(Vector lo, Vector hi);

    Index dim() const { return lower.size(); }
    bool contains(const Vector& u, double tol = 0.0) const;
};

// Two-level nested design: every row of u1 appears verbatim in u2.
struct NestedDoe {
    Matrix u1;  // n1 x d
    Matrix u2;  // n2 x d, contains u1 rows
    std::uint64_t seed = 0;
};

// Latin hypercube sample: n rows in the box, one sample per stratum and
// dimension (uniform marginal stratification).
Matrix lhs(Index n, const BoxDomain& domain, std::uint64_t seed);

// Nested LHS: u1 = lhs(n1); a second LHS of n2 points is drawn and, for each
// row of u1, its nearest remaining point (Euclidean, lowest index on ties) is
// removed; u2 is the union of u1 with the survivors, so |u2| = n2 exactly.
// When n2 == n1 the second draw is skipped and u2 == u1.
NestedDoe nested_lhs(Index n1, Index n2, const BoxDomain& domain, std::uint64_t seed);

}  // namespace mfs
