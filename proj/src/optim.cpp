#include "mfs/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace mfs {

NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                             const NelderMeadOptions& opt) {
    const Index d = x0.size();
    const int max_evals = opt.max_evals > 0 ? opt.max_evals : 80 * static_cast<int>(d);
    int evals = 0;
    auto eval = [&](const Vector& x) {
        ++evals;
        const double v = f(x);
        return std::isfinite(v) ? v : 1e300;
    };

    std::vector<Vector> xs(static_cast<std::size_t>(d) + 1, x0);
    std::vector<double> fs(static_cast<std::size_t>(d) + 1);
    fs[0] = eval(xs[0]);
    for (Index i = 0; i < d; ++i) {
        xs[static_cast<std::size_t>(i) + 1][i] += opt.initial_step;
        fs[static_cast<std::size_t>(i) + 1] = eval(xs[static_cast<std::size_t>(i) + 1]);
    }

    std::vector<std::size_t> ord(xs.size());
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

    while (evals < max_evals) {
        std::iota(ord.begin(), ord.end(), std::size_t{0});
        std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        const std::size_t best = ord.front(), worst = ord.back(), second = ord[ord.size() - 2];

        if (std::abs(fs[worst] - fs[best]) <= opt.ftol_abs + opt.ftol_rel * std::abs(fs[best]))
            break;

        Vector centroid = Vector::Zero(d);
        for (std::size_t k = 0; k + 1 < ord.size(); ++k) centroid += xs[ord[k]];
        centroid /= static_cast<double>(d);

        const Vector xr = centroid + alpha * (centroid - xs[worst]);
        const double fr = eval(xr);
        if (fr < fs[best]) {
            const Vector xe = centroid + gamma * (centroid - xs[worst]);
            const double fe = eval(xe);
            if (fe < fr) { xs[worst] = xe; fs[worst] = fe; }
            else { xs[worst] = xr; fs[worst] = fr; }
        } else if (fr < fs[second]) {
            xs[worst] = xr;
            fs[worst] = fr;
        } else {
            const Vector xc = centroid + rho * (xs[worst] - centroid);
            const double fc = eval(xc);
            if (fc < fs[worst]) {
                xs[worst] = xc;
                fs[worst] = fc;
            } else {
                for (std::size_t k = 1; k < ord.size(); ++k) {
                    xs[ord[k]] = xs[best] + sigma * (xs[ord[k]] - xs[best]);
                    fs[ord[k]] = eval(xs[ord[k]]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t k = 1; k < fs.size(); ++k)
        if (fs[k] < fs[best]) best = k;
    return {xs[best], fs[best], evals};
}

}  // namespace mfs
