#include "hamctl/series.hpp"
#include "hamctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hamctl {

double FactorialCoef::operator()(int n) const {
    if (scale == 0.0) return 0.0;
    return scale * std::exp(-std::lgamma(n + shift + 1.0));
}

double FactorialCoef::log_abs(int n) const {
    if (scale == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(std::abs(scale)) - std::lgamma(n + shift + 1.0);
}

GrowthBound growth(const WaveObservable& g, const WaveObservable& x) {
    double sgx = 0.0, sgg = 0.0;
    for (const auto& [a, ca] : g.terms()) {
        for (const auto& [b, cb] : x.terms()) sgx = std::max(sgx, std::abs(symplectic(a, b)));
        for (const auto& [b, cb] : g.terms()) sgg = std::max(sgg, std::abs(symplectic(a, b)));
    }
    const double k = l1_norm(g);
    return {k * sgx, k * sgg};
}

GrowthBound growth(const MatrixObservable& g, const MatrixObservable&) {
    return {2.0 * frobenius_norm(g), 0.0};
}

double series_tail(const FactorialCoef& c, int N, double t, GrowthBound gb) {
    if (t == 0.0 || c.scale == 0.0) return 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    double logterm = std::log(t);
    double total = 0.0;
    for (int i = 1; i < 1000000; ++i) {
        const double beta = gb.base + (i - 1) * gb.slope;
        if (beta == 0.0) return total;
        logterm += std::log(beta);
        const double contrib = std::exp(c.log_abs(N + i) + logterm);
        if (!std::isfinite(contrib)) return inf;
        total += contrib;
        const double next = std::exp(c.log_abs(N + i + 1) - c.log_abs(N + i)) * (gb.base + i * gb.slope);
        const double q = std::max(next, gb.slope);
        if (q < 1.0) {
            const double rest = contrib * q / (1.0 - q);
            if (rest <= 1e-3 * total || contrib == 0.0) return total + rest;
        } else if (gb.slope >= 1.0) {
            return inf;
        }
    }
    return inf;
}

template <class Obs>
SeriesResult<Obs> lie_series(const Obs& G, const Obs& A, FactorialCoef a, const Obs& B,
                             FactorialCoef b, int n0, const SeriesPolicy& policy) {
    if (policy.maxOrder < 1) throw ValidationError("maxOrder must be >= 1");
    if (!(policy.tailTol > 0.0)) throw ValidationError("tailTol must be positive");
    if (n0 < 0) throw ValidationError("negative starting order");

    const double scale = (a.scale != 0.0 ? tail_norm(A) : 0.0) + (b.scale != 0.0 ? tail_norm(B) : 0.0);
    const double target = policy.relativeTail ? policy.tailTol * scale : policy.tailTol;

    SeriesResult<Obs> res{zero_like(A), n0, 0.0, {}, {}};
    Obs x = a.scale != 0.0 ? A : zero_like(A);
    Obs y = b.scale != 0.0 ? B : zero_like(B);
    double lastTail = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= std::max(policy.maxOrder, n0); ++n) {
        const double nx = tail_norm(x), ny = tail_norm(y);
        if (n >= n0) {
            Obs term = a(n) * x + b(n) * y;
            res.termNorms.push_back(tail_norm(term));
            res.sum = res.sum + term;
            res.terms.push_back(std::move(term));
            res.order = n;
            lastTail = series_tail(a, n, nx, growth(G, x)) + series_tail(b, n, ny, growth(G, y));
            if (lastTail <= target) {
                res.tail = lastTail;
                return res;
            }
        }
        if (nx != 0.0) x = lie(G, x);
        if (ny != 0.0) y = lie(G, y);
    }
    throw TailFailure("series tail " + std::to_string(lastTail) + " above target " + std::to_string(target) +
                      " at order " + std::to_string(policy.maxOrder));
}

template SeriesResult<WaveObservable> lie_series(const WaveObservable&, const WaveObservable&, FactorialCoef,
                                                 const WaveObservable&, FactorialCoef, int,
                                                 const SeriesPolicy&);
template SeriesResult<MatrixObservable> lie_series(const MatrixObservable&, const MatrixObservable&,
                                                   FactorialCoef, const MatrixObservable&, FactorialCoef,
                                                   int, const SeriesPolicy&);

} // namespace hamctl
