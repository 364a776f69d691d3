#pragma once

#include "hamctl/inversion.hpp"

#include <vector>

namespace hamctl {

/// Samples of a matrix observable on an increasing (possibly non-uniform) grid.
struct TimeSampledObservable {
    std::vector<double> times;
    std::vector<MatrixObservable> values;

    void validate() const;
};

/// Second-order three-point derivative: centered inside, one-sided at the ends.
std::vector<CMatrix> time_derivative(const std::vector<double>& times, const std::vector<CMatrix>& values);

/// Largest difference between the full-grid derivative and the one from every
/// other sample, at the shared points, scaled to the second-order error.
double derivative_error_estimate(const std::vector<double>& times, const std::vector<CMatrix>& values);

struct AdiabaticOptions {
    double derivativeRelTol = 1e-2; // estimate / sup ||derivative|| allowed
    double invTol = 1e-13;          // relative fixed-point tolerance
};

struct AdiabaticStepResult {
    std::vector<double> times;
    std::vector<MatrixObservable> W;
    std::vector<MatrixObservable> H1shift; // RW
    TimeSampledObservable V1;
    std::vector<double> normV, normW, normVdot, normGammaWdot, normV1;
    double derivativeError = 0.0;
    std::vector<HamiltonianModel> models;     // H_k per time used for this step
    std::vector<HamiltonianModel> nextModels; // H_k + R_k W_k, re-diagonalized within classes
};

/// W = F^{-1}(V) per time and V1 = -sum_n {GW}^n/(n+1)! d/dt(GW).
AdiabaticStepResult adiabatic_step(const HamiltonianModel& H, const TimeSampledObservable& Vt,
                                   const SeriesPolicy& policy, const AdiabaticOptions& opt = {});
/// Same with a time-dependent model list (one per sample).
AdiabaticStepResult adiabatic_step(const std::vector<HamiltonianModel>& models, const TimeSampledObservable& Vt,
                                   const SeriesPolicy& policy, const AdiabaticOptions& opt = {});

/// H + RW, diagonalized inside each spectral class. Throws SpectralCollapse when
/// classes merge.
HamiltonianModel shifted_model(const HamiltonianModel& H, const MatrixObservable& RW);

struct AdiabaticChain {
    std::vector<AdiabaticStepResult> levels;
    bool stoppedEarly = false;
    int optimalLevel = 0; // index of the level with the smallest sup ||V_k||, V_0 = input
    std::vector<double> supNorms; // sup_t ||V_k|| for k = 0..levels
};

AdiabaticChain adiabatic_iterate(const HamiltonianModel& H, const TimeSampledObservable& Vt, int depth,
                                 const SeriesPolicy& policy, const AdiabaticOptions& opt = {});

} // namespace hamctl
