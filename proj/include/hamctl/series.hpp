#pragma once

#include "hamctl/hamops.hpp"

#include <vector>

namespace hamctl {

struct SeriesPolicy {
    int maxOrder = 400;
    double tailTol = 1e-15;
    double gammaBound = 0.0; // bilinear bound b, used only for reported a-priori bounds
    bool relativeTail = true; // tailTol scales with the input norm
};

/// ||{G}^{l+1} X|| <= (base + l*slope) ||{G}^l X|| for every l >= 0.
struct GrowthBound {
    double base = 0.0;
    double slope = 0.0;
};

/// Waves: sup |sigma| grows by at most sup over pairs inside supp G per bracket.
GrowthBound growth(const WaveObservable& g, const WaveObservable& x);
/// Matrices: ||[G, X]||_F <= 2 ||G||_F ||X||_F.
GrowthBound growth(const MatrixObservable& g, const MatrixObservable& x);

/// Coefficient scale/(n + shift)!; scale 0 switches the sequence off.
struct FactorialCoef {
    double scale = 1.0;
    int shift = 0;
    double operator()(int n) const;
    double log_abs(int n) const;
};

/// Certified bound on sum_{i>=1} |c(N+i)| ||{G}^{N+i} X|| given t = ||{G}^N X||.
/// Returns +inf when the bound diverges.
double series_tail(const FactorialCoef& c, int N, double t, GrowthBound gb);

template <class Obs>
struct SeriesResult {
    Obs sum;
    int order = 0;          // last order included
    double tail = 0.0;      // certified bound on the omitted orders
    std::vector<Obs> terms; // per-order contributions n0..order
    std::vector<double> termNorms;
};

/// sum_{n >= n0} a(n) {G}^n A + b(n) {G}^n B, truncated at the first order whose
/// certified tail is within tolerance. Throws TailFailure when maxOrder is reached first.
template <class Obs>
SeriesResult<Obs> lie_series(const Obs& G, const Obs& A, FactorialCoef a, const Obs& B,
                             FactorialCoef b, int n0, const SeriesPolicy& policy);

} // namespace hamctl
