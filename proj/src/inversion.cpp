#include "hamctl/inversion.hpp"
#include "hamctl/errors.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <string>

namespace hamctl {

double gamma_root() {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (std::exp(mid) * (mid + 1.0) < 2.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

template <class Obs>
InversionReport<Obs> invert_fixed_point(const HamiltonianModel& H, const Obs& V, const SeriesPolicy& policy,
                                        double tol, int maxIter) {
    require_kind(H, V);
    if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
    const double b = policy.gammaBound;
    const double nv = norm(H, V);
    const double g = gamma_root();
    if (b > 0.0 && !(b * nv / (2.0 - std::exp(g)) < g))
        throw PreconditionError("b||V||/(2 - e^g) = " + std::to_string(b * nv / (2.0 - std::exp(g))) +
                                " is not below g = " + std::to_string(g));

    InversionReport<Obs> rep;
    rep.method = "fixed-point";
    rep.normV = nv;
    Obs W = V;
    for (int k = 0; k <= maxIter; ++k) {
        const Obs next = V - control_term(H, W, policy).f;
        const double step = norm(H, next - W);
        rep.stepNorms.push_back(step);
        if (step <= tol) {
            rep.W = W;
            rep.iterations = k;
            rep.residual = step;
            rep.normW = norm(H, W);
            rep.ratio = nv > 0.0 ? rep.normW / nv : 1.0;
            rep.contractionBound = std::exp(b * rep.normW) * (b * rep.normW + 1.0) - 1.0;
            return rep;
        }
        W = next;
    }
    throw ConvergenceError("fixed point not reached in " + std::to_string(maxIter) + " iterations; last step " +
                           std::to_string(rep.stepNorms.back()));
}

template InversionReport<WaveObservable> invert_fixed_point(const HamiltonianModel&, const WaveObservable&,
                                                            const SeriesPolicy&, double, int);
template InversionReport<MatrixObservable> invert_fixed_point(const HamiltonianModel&, const MatrixObservable&,
                                                              const SeriesPolicy&, double, int);

namespace {

InverseRatioCertificate certify(double b, double normV, double measured) {
    InverseRatioCertificate c;
    const double g = gamma_root();
    c.bound = b;
    c.normV = normV;
    c.threshold = 1.0 / (5.0 * b);
    c.withinThreshold = normV <= c.threshold;
    c.sharpLow = std::exp(-g);
    c.sharpHigh = 1.0 / (2.0 - std::exp(g));
    c.measuredRatio = measured;
    c.passes = measured >= c.ratioLow && measured <= c.ratioHigh;
    c.sharpPasses = measured >= c.sharpLow && measured <= c.sharpHigh;
    return c;
}

} // namespace

InverseRatioCertificate inverse_ratio_certificate(const HamiltonianModel& H, const MatrixObservable& V,
                                         const WeightFunction& g, const SeriesPolicy& policy) {
    const double b = gamma_opnorm_bound(H, g);
    if (!(b > 0.0)) throw ValidationError("operator bound vanishes: a single spectral class");
    SeriesPolicy p = policy;
    p.gammaBound = b;
    const double nv = norm(H, V, g);
    if (nv == 0.0) return certify(b, 0.0, 1.0);
    const auto inv = invert_fixed_point(H, V, p, 1e-14 * nv);
    return certify(b, nv, norm(H, inv.W, g) / nv);
}

InverseRatioCertificate inverse_ratio_certificate(const HamiltonianModel& H, const WaveObservable& V,
                                         const WaveBand& band, const SeriesPolicy& policy) {
    const double b = gamma_opnorm_bound(H, band);
    SeriesPolicy p = policy;
    p.gammaBound = b;
    const double nv = norm(H, V);
    if (nv == 0.0) return certify(b, 0.0, 1.0);
    const auto inv = invert_fixed_point(H, V, p, 1e-14 * nv);
    return certify(b, nv, inv.ratio);
}

double lambda_coefficient(int n) {
    if (n < 0) throw ValidationError("negative index");
    return std::exp((n - 1) * std::log(n + 1.0) - std::lgamma(n + 1.0));
}

namespace {

using big = boost::multiprecision::cpp_bin_float_50;

double lambda_newton(const big& x) {
    big w = 1;
    for (int i = 0; i < 1000; ++i) {
        const big e = exp(x * w);
        const big step = (w - e) / (1 - x * e);
        w -= step;
        if (abs(step) < big("1e-40")) break;
    }
    return static_cast<double>(w);
}

double log_term(int n, double ax) {
    return (n - 1) * std::log(n + 1.0) - std::lgamma(n + 1.0) + n * std::log(ax);
}

// sum_{m > M} m^{-s} by Euler-Maclaurin
double zeta_tail(double s, double M) {
    return std::pow(M, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(M, -s) + s / 12.0 * std::pow(M, -s - 1.0) -
           s * (s + 1.0) * (s + 2.0) / 720.0 * std::pow(M, -s - 3.0);
}

} // namespace

LambdaReport lambda_demo(double x) {
    const double inv_e = std::exp(-1.0);
    const double edge = 4.0 * std::numeric_limits<double>::epsilon() * inv_e;
    if (!std::isfinite(x) || std::abs(x) > inv_e + edge)
        throw ValidationError("lambda series needs |x| <= 1/e");
    const bool boundary = std::abs(std::abs(x) - inv_e) <= edge;

    LambdaReport r;
    r.x = x;
    const big bx = boundary ? big(x > 0 ? 1 : -1) * exp(big(-1)) : big(x);
    r.newtonValue = lambda_newton(bx);

    if (x == 0.0) {
        r.seriesValue = 1.0;
        r.termsUsed = 1;
        return r;
    }
    const double sgn = x < 0 ? -1.0 : 1.0;
    if (!boundary) {
        const double q = std::abs(x) * std::exp(1.0);
        double sum = 1.0;
        int n = 1;
        for (;; ++n) {
            const double t = std::exp(log_term(n, std::abs(x)));
            sum += (n % 2 && sgn < 0 ? -t : t);
            if (t * q / (1.0 - q) <= 1e-17 * std::abs(sum) || n > 100000) break;
        }
        r.seriesValue = sum;
        r.termsUsed = n + 1;
        return r;
    }

    // boundary |x| = 1/e: with m = n + 1 the term is e (2 pi)^{-1/2} m^{-3/2} e^{-mu(m)}
    const int M = 2000;
    if (sgn > 0) {
        double sum = 0.0;
        for (int n = M - 1; n >= 0; --n) sum += std::exp(log_term(n, inv_e));
        const double c[4] = {1.0, -1.0 / 12.0, 1.0 / 288.0, 1.0 / 360.0 - 1.0 / 10368.0};
        double tail = 0.0;
        for (int j = 0; j < 4; ++j) tail += c[j] * zeta_tail(1.5 + j, M);
        r.seriesValue = sum + std::exp(1.0) / std::sqrt(2.0 * M_PI) * tail;
        r.termsUsed = M;
        return r;
    }
    // alternating boundary: repeated averaging of consecutive partial sums
    const int K = 30;
    std::vector<double> partial;
    double sum = 0.0;
    for (int n = 0; n < M + K; ++n) {
        const double t = std::exp(log_term(n, inv_e));
        sum += (n % 2 ? -t : t);
        if (n >= M - 1) partial.push_back(sum);
    }
    while (partial.size() > 1) {
        for (std::size_t i = 0; i + 1 < partial.size(); ++i) partial[i] = 0.5 * (partial[i] + partial[i + 1]);
        partial.pop_back();
    }
    r.seriesValue = partial[0];
    r.termsUsed = M + K;
    return r;
}

} // namespace hamctl
