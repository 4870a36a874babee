#include "mfs/doe.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace mfs {

BoxDomain::BoxDomain(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size())
        throw Error("BoxDomain: lower/upper size mismatch");
    for (Index k = 0; k < lower.size(); ++k)
        if (!(lower[k] < upper[k]))
            throw Error("BoxDomain: lower must be < upper in every dimension");
}

bool BoxDomain::contains(const Vector& u, double tol) const {
    if (u.size() != dim()) return false;
    for (Index k = 0; k < dim(); ++k)
        if (u[k] < lower[k] - tol || u[k] > upper[k] + tol) return false;
    return true;
}

Matrix lhs(Index n, const BoxDomain& domain, std::uint64_t seed) {
    if (n < 1) throw Error("lhs: n must be >= 1");
    const Index d = domain.dim();
    Rng rng(seed);
    Matrix out(n, d);
    std::vector<Index> perm(static_cast<std::size_t>(n));
    for (Index k = 0; k < d; ++k) {
        std::iota(perm.begin(), perm.end(), Index{0});
        // Fisher-Yates with our own uniform ints for reproducibility
        for (Index i = n - 1; i > 0; --i) {
            const Index j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i) + 1));
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        }
        const double w = domain.upper[k] - domain.lower[k];
        for (Index i = 0; i < n; ++i) {
            const double u01 = (static_cast<double>(perm[static_cast<std::size_t>(i)]) + rng.uniform()) /
                               static_cast<double>(n);
            out(i, k) = domain.lower[k] + w * u01;
        }
    }
    return out;
}

NestedDoe nested_lhs(Index n1, Index n2, const BoxDomain& domain, std::uint64_t seed) {
    if (n1 < 1) throw Error("nested_lhs: n1 must be >= 1");
    if (n2 < n1) throw Error("nested_lhs: n2 must be >= n1");

    NestedDoe doe;
    doe.seed = seed;
    doe.u1 = lhs(n1, domain, derive_seed(seed, 1));
    if (n2 == n1) {
        doe.u2 = doe.u1;
        return doe;
    }

    const Matrix cand = lhs(n2, domain, derive_seed(seed, 2));
    std::vector<Index> alive(static_cast<std::size_t>(n2));
    std::iota(alive.begin(), alive.end(), Index{0});

    // Remove, for each u1 row, its nearest remaining candidate (lowest index wins ties).
    for (Index i = 0; i < n1; ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_pos = 0;
        for (std::size_t p = 0; p < alive.size(); ++p) {
            const double dist = (cand.row(alive[p]) - doe.u1.row(i)).squaredNorm();
            if (dist < best) {
                best = dist;
                best_pos = p;
            }
        }
        alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(best_pos));
    }

    doe.u2.resize(n2, domain.dim());
    doe.u2.topRows(n1) = doe.u1;
    for (std::size_t p = 0; p < alive.size(); ++p)
        doe.u2.row(n1 + static_cast<Index>(p)) = cand.row(alive[p]);
    return doe;
}

}  // namespace mfs
