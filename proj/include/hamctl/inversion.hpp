#pragma once

#include "hamctl/control.hpp"

#include <string>
#include <vector>

namespace hamctl {

template <class Obs>
struct InversionReport {
    Obs W;
    std::string method;         // "fixed-point" or "series"
    int iterations = 0;         // fixed point: iterations; series: highest order
    double residual = 0.0;      // ||F(W) - V||
    double normV = 0.0;
    double normW = 0.0;
    double ratio = 1.0;         // ||W|| / ||V||
    double contractionBound = 0.0; // e^{b||W||}(b||W|| + 1) - 1
    std::vector<double> stepNorms;
    std::vector<Obs> terms;     // series: W_1, W_2, ...
};

/// Root of e^g (g + 1) = 2.
double gamma_root();

/// W_{k+1} = V - f(W_k) from W_0 = V until ||W_{k+1} - W_k|| <= tol, which is the
/// residual ||F(W_k) - V||. With policy.gammaBound = b > 0 requires b||V||/(2 - e^g) < g.
template <class Obs>
InversionReport<Obs> invert_fixed_point(const HamiltonianModel& H, const Obs& V, const SeriesPolicy& policy,
                                        double tol, int maxIter = 200);

struct TreeIndex {
    int N = 1;
    std::vector<int> nu;
};

inline constexpr int kTreeIndexLimit = 12;

/// nu in {0, 2, 3, ...}^N with nu_0 = 0, partial sums |nu|_k <= k and |nu|_{N-1} = N - 1,
/// in lexicographic order.
std::vector<TreeIndex> tree_indices(int N, int limit = kTreeIndexLimit);

/// Symmetric multilinear Taylor coefficient of W -> V - f(W) of degree n >= 2.
template <class Obs>
Obs taylor_coefficient(const HamiltonianModel& H, const std::vector<Obs>& args);

/// Order-M homogeneous part of the inverse, summed over tree indices.
template <class Obs>
Obs lagrange_term(const HamiltonianModel& H, const Obs& V, int M);

/// The same term through the composition-indexed rearrangement.
template <class Obs>
Obs lagrange_term_rearranged(const HamiltonianModel& H, const Obs& V, int M);

template <class Obs>
InversionReport<Obs> invert_series(const HamiltonianModel& H, const Obs& V, int Mmax, const SeriesPolicy& policy);

struct InverseRatioCertificate {
    double bound = 0.0;       // operator bound b
    double normV = 0.0;
    double threshold = 0.0;   // 1/(5b)
    bool withinThreshold = false;
    double ratioLow = 24.0 / 35.0;
    double ratioHigh = 24.0 / 13.0;
    double sharpLow = 0.0;    // e^{-g}
    double sharpHigh = 0.0;   // 1/(2 - e^g)
    double measuredRatio = 0.0;
    bool passes = false;      // measured ratio inside [ratioLow, ratioHigh]
    bool sharpPasses = false;
};

/// Quantum: bound from the spectrum and weight, ratio measured in the weighted norm.
InverseRatioCertificate inverse_ratio_certificate(const HamiltonianModel& H, const MatrixObservable& V,
                                         const WeightFunction& g, const SeriesPolicy& policy);
/// Classical: bound over the given band.
InverseRatioCertificate inverse_ratio_certificate(const HamiltonianModel& H, const WaveObservable& V,
                                         const WaveBand& band, const SeriesPolicy& policy);

struct LambdaReport {
    double x = 0.0;
    double seriesValue = 0.0;
    double newtonValue = 0.0;
    int termsUsed = 0;
};

/// (n+1)^{n-1}/n!.
double lambda_coefficient(int n);

/// Sum of the tree series against a Newton solve of w = e^{xw}; |x| <= 1/e.
LambdaReport lambda_demo(double x);

} // namespace hamctl
