#pragma once

#include "hamctl/series.hpp"

#include <vector>

namespace hamctl {

/// sum_n {S}^n X / n!; for matrices this is e^{iS} X e^{-iS}.
template <class Obs>
SeriesResult<Obs> exp_lie_series(const Obs& S, const Obs& X, const SeriesPolicy& policy);
template <class Obs>
Obs exp_lie(const Obs& S, const Obs& X, const SeriesPolicy& policy) {
    return exp_lie_series(S, X, policy).sum;
}

/// F(W) = e^{-{GW}} RW + sum_n {-GW}^n/(n+1)! NW.
template <class Obs>
SeriesResult<Obs> F_series(const HamiltonianModel& H, const Obs& W, const SeriesPolicy& policy);
template <class Obs>
Obs F_apply(const HamiltonianModel& H, const Obs& W, const SeriesPolicy& policy) {
    return F_series(H, W, policy).sum;
}

template <class Obs>
struct ControlReport {
    Obs f;
    Obs F;
    int ordersUsed = 0;
    double tailBound = 0.0;
    double fBound = 0.0;       // (e^{b||V||} - 1)||V|| with b = policy.gammaBound
    std::vector<Obs> terms;    // f_2, f_3, ...
    std::vector<double> termNorms;
    SeriesPolicy policy;
};

/// f(V) = sum_{n>=1} {-GV}^n (nR + 1)/(n+1)! V, grouped so that the s-th term is
/// {-GV}^{s-1}(RV/(s-1)! + NV/s!).
template <class Obs>
ControlReport<Obs> control_term(const HamiltonianModel& H, const Obs& V, const SeriesPolicy& policy);

/// ||H + F(W) - e^{-{GW}}(H + RW)||. Matrices use exact exponentials; waves expand
/// the H part through {H}GW and sum with a tightened policy.
double conjugation_residual(const HamiltonianModel& H, const MatrixObservable& W, const SeriesPolicy& policy);
double conjugation_residual(const HamiltonianModel& H, const WaveObservable& W, const SeriesPolicy& policy);

struct SmallnessReport {
    double threshold = 0.0;        // 1/(5 bound)
    bool passes = false;           // ||V|| <= threshold
    double controlRatioBound = 0.0; // e^{1/5} - 1
};

SmallnessReport smallness_report(double gammaBound, double normV);

} // namespace hamctl
