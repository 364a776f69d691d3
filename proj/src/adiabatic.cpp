#include "hamctl/adiabatic.hpp"
#include "hamctl/errors.hpp"
#include "hamctl/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hamctl {

void TimeSampledObservable::validate() const {
    if (times.size() != values.size()) throw ValidationError("times and values differ in length");
    if (times.size() < 3) throw ValidationError("need at least 3 time samples");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw ValidationError("times must increase strictly");
    for (const auto& v : values)
        if (v.dim() != values.front().dim()) throw ValidationError("time samples differ in dimension");
}

std::vector<CMatrix> time_derivative(const std::vector<double>& t, const std::vector<CMatrix>& f) {
    const std::size_t n = t.size();
    if (n < 3 || f.size() != n) throw ValidationError("derivative needs at least 3 matched samples");
    std::vector<CMatrix> d(n);
    {
        const double h1 = t[1] - t[0], h2 = t[2] - t[1];
        d[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1] - h1 / (h2 * (h1 + h2)) * f[2];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h1 = t[i] - t[i - 1], h2 = t[i + 1] - t[i];
        d[i] = -h2 / (h1 * (h1 + h2)) * f[i - 1] + (h2 - h1) / (h1 * h2) * f[i] + h1 / (h2 * (h1 + h2)) * f[i + 1];
    }
    {
        const double h1 = t[n - 2] - t[n - 3], h2 = t[n - 1] - t[n - 2];
        d[n - 1] = h2 / (h1 * (h1 + h2)) * f[n - 3] - (h1 + h2) / (h1 * h2) * f[n - 2] +
                   (2 * h2 + h1) / (h2 * (h1 + h2)) * f[n - 1];
    }
    return d;
}

double derivative_error_estimate(const std::vector<double>& t, const std::vector<CMatrix>& f) {
    const auto full = time_derivative(t, f);
    double sup = 0.0;
    for (const auto& m : full) sup = std::max(sup, m.norm());
    if (sup == 0.0) return 0.0;
    if (t.size() < 5) return std::numeric_limits<double>::infinity();
    std::vector<double> th;
    std::vector<CMatrix> fh;
    for (std::size_t i = 0; i < t.size(); i += 2) {
        th.push_back(t[i]);
        fh.push_back(f[i]);
    }
    const auto half = time_derivative(th, fh);
    double est = 0.0;
    for (std::size_t i = 0; i < th.size(); ++i) est = std::max(est, (half[i] - full[2 * i]).norm() / 3.0);
    return est;
}

HamiltonianModel shifted_model(const HamiltonianModel& H, const MatrixObservable& RW) {
    const auto& q = H.quantum();
    const auto& p = q.partition;
    const auto D = static_cast<Eigen::Index>(p.dim());
    const CMatrix U = q.basis.size() ? q.basis : CMatrix::Identity(D, D);
    CMatrix hat = U.adjoint() * RW.a * U;
    for (Eigen::Index i = 0; i < D; ++i) hat(i, i) += p.classValue[p.classOf[i]];
    const double scale = std::max(1.0, hat.norm());

    CMatrix Q = CMatrix::Zero(D, D);
    std::vector<double> ev(p.dim());
    for (const auto& cls : p.classes) {
        const auto m = static_cast<Eigen::Index>(cls.size());
        CMatrix blk(m, m);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j) blk(i, j) = hat(cls[i], cls[j]);
        if ((blk - blk.adjoint()).norm() > 1e-10 * scale)
            throw ValidationError("shifted Hamiltonian is not Hermitian on a spectral class");
        Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (blk + blk.adjoint()));
        for (Eigen::Index i = 0; i < m; ++i) {
            ev[cls[i]] = es.eigenvalues()(i);
            for (Eigen::Index j = 0; j < m; ++j) Q(cls[j], cls[i]) = es.eigenvectors()(j, i);
        }
    }
    auto np = SpectralPartition::build(ev, p.gapTol);
    if (np.num_classes() < p.num_classes())
        throw SpectralCollapse("spectral classes merged: " + std::to_string(p.num_classes()) + " -> " +
                               std::to_string(np.num_classes()));
    return quantum_diagonal(std::move(np), q.hbar, U * Q);
}

AdiabaticStepResult adiabatic_step(const HamiltonianModel& H, const TimeSampledObservable& Vt,
                                   const SeriesPolicy& policy, const AdiabaticOptions& opt) {
    return adiabatic_step(std::vector<HamiltonianModel>(Vt.times.size(), H), Vt, policy, opt);
}

AdiabaticStepResult adiabatic_step(const std::vector<HamiltonianModel>& models, const TimeSampledObservable& Vt,
                                   const SeriesPolicy& policy, const AdiabaticOptions& opt) {
    Vt.validate();
    const std::size_t n = Vt.times.size();
    if (models.size() != n) throw ValidationError("one Hamiltonian per time sample required");

    AdiabaticStepResult r;
    r.times = Vt.times;
    r.models = models;
    r.W.resize(n);
    r.H1shift.resize(n);
    std::vector<CMatrix> gw(n);
    parallel_for(n, [&](std::size_t i) {
        const auto& H = models[i];
        const auto& V = Vt.values[i];
        require_kind(H, V);
        SeriesPolicy p = policy;
        p.gammaBound = H.quantum().partition.num_classes() > 1 ? gamma_opnorm_bound(H) : 0.0;
        const double nv = norm(H, V);
        r.W[i] = nv > 0.0 ? invert_fixed_point(H, V, p, opt.invTol * nv).W : V;
        r.H1shift[i] = resonant(H, r.W[i]);
        gw[i] = gamma(H, r.W[i]).a;
    });

    const auto gwdot = time_derivative(r.times, gw);
    r.derivativeError = derivative_error_estimate(r.times, gw);
    double sup = 0.0;
    for (const auto& m : gwdot) sup = std::max(sup, m.norm());
    // differencing noise: eps |GW| / min step
    double supGw = 0.0, minStep = r.times.back() - r.times.front();
    for (const auto& m : gw) supGw = std::max(supGw, m.norm());
    for (std::size_t i = 1; i < n; ++i) minStep = std::min(minStep, r.times[i] - r.times[i - 1]);
    const double noise = 64 * std::numeric_limits<double>::epsilon() * supGw / minStep;
    if (r.derivativeError > opt.derivativeRelTol * sup + noise)
        throw ValidationError("time grid too coarse: derivative error estimate " +
                              std::to_string(r.derivativeError) + " against derivative size " + std::to_string(sup));

    std::vector<CMatrix> vals(n);
    for (std::size_t i = 0; i < n; ++i) vals[i] = Vt.values[i].a;
    const auto vdot = time_derivative(r.times, vals);

    r.V1.times = r.times;
    r.V1.values.resize(n);
    r.nextModels.resize(n, models.front());
    r.normV.resize(n);
    r.normW.resize(n);
    r.normVdot.resize(n);
    r.normGammaWdot.resize(n);
    r.normV1.resize(n);
    parallel_for(n, [&](std::size_t i) {
        const auto& H = models[i];
        const MatrixObservable g(gw[i]);
        const MatrixObservable gd(gwdot[i]);
        const auto s = lie_series(g, gd, FactorialCoef{-1.0, 1}, gd, FactorialCoef{0.0, 0}, 0, policy);
        r.V1.values[i] = s.sum;
        r.nextModels[i] = shifted_model(H, r.H1shift[i]);
        r.normV[i] = norm(H, Vt.values[i]);
        r.normW[i] = norm(H, r.W[i]);
        r.normVdot[i] = norm(H, MatrixObservable(vdot[i]));
        r.normGammaWdot[i] = norm(H, gd);
        r.normV1[i] = norm(r.nextModels[i], s.sum);
    });
    return r;
}

AdiabaticChain adiabatic_iterate(const HamiltonianModel& H, const TimeSampledObservable& Vt, int depth,
                                 const SeriesPolicy& policy, const AdiabaticOptions& opt) {
    if (depth < 1) throw ValidationError("depth must be >= 1");
    AdiabaticChain chain;
    std::vector<HamiltonianModel> models(Vt.times.size(), H);
    TimeSampledObservable current = Vt;
    for (int k = 0; k < depth; ++k) {
        auto step = adiabatic_step(models, current, policy, opt);
        if (k == 0) chain.supNorms.push_back(*std::max_element(step.normV.begin(), step.normV.end()));
        const double next = *std::max_element(step.normV1.begin(), step.normV1.end());
        chain.supNorms.push_back(next);
        models = step.nextModels;
        current = step.V1;
        chain.levels.push_back(std::move(step));
        if (next >= chain.supNorms[chain.supNorms.size() - 2]) {
            chain.stoppedEarly = true;
            break;
        }
    }
    chain.optimalLevel = static_cast<int>(std::min_element(chain.supNorms.begin(), chain.supNorms.end()) -
                                          chain.supNorms.begin());
    return chain;
}

} // namespace hamctl
