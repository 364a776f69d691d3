#pragma once

#include "hamctl/inversion.hpp"

#include <vector>

namespace hamctl {

struct Trajectory {
    std::vector<double> times;
    std::vector<PhasePoint> points;
    double integratorTol = 0.0;
};

/// Flow of Omega.E + U with qdot = dU/dp, pdot = -dU/dq, Edot = -dU/dtau and
/// tau = tau0 + Omega t imposed exactly. Points are reported at the requested times,
/// which must start at 0 and be monotone (either direction).
Trajectory integrate_classical(const HamiltonianModel& H, const WaveObservable& U, const PhasePoint& x0,
                               const std::vector<double>& times, double tol);

/// Time-s flow of S through x with tau frozen; s = +1 or -1 for the canonical maps.
PhasePoint lie_point_transform(const WaveObservable& S, const PhasePoint& x, double s, double tol);

/// Distance in (q, p).
double phase_distance(const PhasePoint& a, const PhasePoint& b);

struct ConjugationOptions {
    double T = 50.0;
    double tol = 1e-8;
    int gridPoints = 51;
    bool includeControl = true;  // integrate H + V + f rather than H + V
    bool includeRVFlow = true;   // compose with the resonant flow
};

struct ConjugationReport {
    double maxDeviation = 0.0;
    std::vector<double> perSample; // max over the time grid for each initial point
    std::vector<double> times;
};

/// Controlled trajectory against phi^{GV}_{+1} o phi^{RV}_t o T_t o phi^{GV}_{-1}.
ConjugationReport verify_conjugation_classical(const HamiltonianModel& H, const WaveObservable& V,
                                               const WaveObservable& f, const std::vector<PhasePoint>& samples,
                                               const ConjugationOptions& opt);

struct MomentumDriftReport {
    double drift = 0.0;
    double nearTerm = 0.0;  // sum_{n>=1} {-GV}^{n-1} Y/n! at x
    double farTerm = 0.0;   // e^{-{GV}} of the tau-shifted correction at x
    double bound = 0.0;     // 2 sum ||{GV}^{n-1} Y||/n! plus tails
};

/// p_j(t) - p_j(0) along the controlled flow from closed series, with Y = d/dq_j of GV.
/// Requires RV = 0.
MomentumDriftReport momentum_drift(const HamiltonianModel& H, const WaveObservable& V, double t,
                                   const PhasePoint& x, const SeriesPolicy& policy, std::size_t component = 0);

/// Multiplies each wave by e^{i k.Omega t}: the free flow acting on an observable.
WaveObservable tau_shift(const HamiltonianModel& H, const WaveObservable& v, double t);

struct QuantumConjugationReport {
    MatrixObservable W;
    double generator = 0.0;          // ||H + V - e^{-iGW}(H + RW)e^{iGW}||_F
    std::vector<double> times;
    std::vector<double> flow;        // ||e^{it(H+V)} - e^{-iGW}e^{it(H+RW)}e^{iGW}||_F
    double commutator = 0.0;         // ||[H, RW]||_F
};

QuantumConjugationReport verify_conjugation_quantum(const HamiltonianModel& H, const MatrixObservable& V,
                                                    const SeriesPolicy& policy, const std::vector<double>& times,
                                                    double invTol = 1e-14);

template <class Obs>
struct ApproximateControlReport {
    Obs W;
    Obs argument;            // RV + e^{{GV}}(phi - f(V))
    double normW = 0.0;
    double residual = 0.0;   // quantum: identity residual; classical: trajectory deviation
};

/// H + V + phi = e^{-{GV}} e^{-{GW}} (H + RW) with W = F^{-1}(RV + e^{{GV}}(phi - f(V))).
ApproximateControlReport<MatrixObservable> approximate_control_decomposition(
    const HamiltonianModel& H, const MatrixObservable& V, const MatrixObservable& phi, const SeriesPolicy& policy,
    double invTol = 1e-14);

/// Classical residual compares the H + V + phi trajectory with the composed maps.
ApproximateControlReport<WaveObservable> approximate_control_decomposition(
    const HamiltonianModel& H, const WaveObservable& V, const WaveObservable& phi, const SeriesPolicy& policy,
    const std::vector<PhasePoint>& samples, const ConjugationOptions& opt, double invTol = 1e-13);

/// Equally spaced grid 0..T with n points.
std::vector<double> time_grid(double T, int n);

} // namespace hamctl
