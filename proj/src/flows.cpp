#include "hamctl/flows.hpp"
#include "hamctl/errors.hpp"
#include "hamctl/parallel.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <string>

namespace hamctl {

namespace odeint = boost::numeric::odeint;
using State = std::vector<double>;

namespace {

// state layout: q (d), p (d), E (r)
State pack(const PhasePoint& x) {
    State s;
    s.insert(s.end(), x.q.begin(), x.q.end());
    s.insert(s.end(), x.p.begin(), x.p.end());
    s.insert(s.end(), x.E.begin(), x.E.end());
    return s;
}

PhasePoint unpack(const State& s, std::size_t d, std::vector<double> tau) {
    PhasePoint x;
    x.q.assign(s.begin(), s.begin() + d);
    x.p.assign(s.begin() + d, s.begin() + 2 * d);
    x.E.assign(s.begin() + 2 * d, s.end());
    x.tau = std::move(tau);
    return x;
}

void check_point(const PhasePoint& x, std::size_t d, std::size_t r) {
    if (x.q.size() != d || x.p.size() != d || x.tau.size() != r || x.E.size() != r)
        throw ValidationError("phase point dimensions do not match the observable");
}

/// Integrates U along the requested times; tau(t) = tau0 + omega t (omega may be zero).
std::vector<PhasePoint> run(const WaveObservable& U, const std::vector<double>& omega, const PhasePoint& x0,
                            const std::vector<double>& times, double tol) {
    const std::size_t d = U.d(), r = U.r();
    check_point(x0, d, r);
    if (!(tol > 0.0)) throw ValidationError("integrator tolerance must be positive");
    if (times.empty() || times.front() != 0.0) throw ValidationError("time grid must start at 0");
    const WaveEvaluator ev(U);
    const std::vector<double> tau0 = x0.tau;

    auto rhs = [&](const State& s, State& ds, double t) {
        std::vector<double> tau(r), gq(d), gp(d), gt(r);
        for (std::size_t j = 0; j < r; ++j) tau[j] = tau0[j] + omega[j] * t;
        ev.gradient(s.data(), s.data() + d, tau.data(), gq.data(), gp.data(), gt.data());
        for (std::size_t i = 0; i < d; ++i) {
            ds[i] = gp[i];
            ds[d + i] = -gq[i];
        }
        for (std::size_t j = 0; j < r; ++j) ds[2 * d + j] = -gt[j];
    };

    std::vector<PhasePoint> out;
    out.reserve(times.size());
    auto observe = [&](const State& s, double t) {
        for (double v : s)
            if (!std::isfinite(v)) throw ConvergenceError("trajectory left the finite range");
        std::vector<double> tau(r);
        for (std::size_t j = 0; j < r; ++j) tau[j] = tau0[j] + omega[j] * t;
        out.push_back(unpack(s, d, std::move(tau)));
    };
    State s = pack(x0);
    if (times.size() == 1) {
        observe(s, 0.0);
        return out;
    }
    const double dir = times.back() >= 0.0 ? 1.0 : -1.0;
    try {
        odeint::integrate_times(odeint::make_dense_output(tol, tol, odeint::runge_kutta_dopri5<State>()), rhs, s,
                                times.begin(), times.end(), dir * 1e-2, observe,
                                odeint::max_step_checker(10000000));
    } catch (const ConvergenceError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConvergenceError(std::string("integration failed: ") + e.what());
    }
    return out;
}

std::vector<double> model_omega(const HamiltonianModel& H, const WaveObservable& U) {
    require_kind(H, U);
    return H.classical().omega;
}

WaveObservable d_dq(const WaveObservable& v, std::size_t j) {
    if (j >= v.d()) throw ValidationError("momentum component out of range");
    WaveObservable::Terms t;
    for (const auto& [w, c] : v.terms()) t[w] = cplx(0.0, w.n[j]) * c;
    return WaveObservable(v.d(), v.r(), t);
}

PhasePoint free_shift(const HamiltonianModel& H, PhasePoint x, double t) {
    const auto& om = H.classical().omega;
    for (std::size_t j = 0; j < x.tau.size(); ++j) x.tau[j] += om[j] * t;
    return x;
}

} // namespace

Trajectory integrate_classical(const HamiltonianModel& H, const WaveObservable& U, const PhasePoint& x0,
                               const std::vector<double>& times, double tol) {
    Trajectory tr;
    tr.points = run(U, model_omega(H, U), x0, times, tol);
    tr.times = times;
    tr.integratorTol = tol;
    return tr;
}

PhasePoint lie_point_transform(const WaveObservable& S, const PhasePoint& x, double s, double tol) {
    if (S.empty() || s == 0.0) {
        check_point(x, S.d(), S.r());
        return x;
    }
    return run(S, std::vector<double>(S.r(), 0.0), x, {0.0, s}, tol).back();
}

double phase_distance(const PhasePoint& a, const PhasePoint& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.q.size(); ++i) s += std::pow(a.q[i] - b.q[i], 2) + std::pow(a.p[i] - b.p[i], 2);
    return std::sqrt(s);
}

std::vector<double> time_grid(double T, int n) {
    if (n < 2) throw ValidationError("time grid needs at least two points");
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = T * i / (n - 1);
    t.back() = T;
    return t;
}

ConjugationReport verify_conjugation_classical(const HamiltonianModel& H, const WaveObservable& V,
                                               const WaveObservable& f, const std::vector<PhasePoint>& samples,
                                               const ConjugationOptions& opt) {
    require_kind(H, V);
    require_kind(H, f);
    const WaveObservable U = opt.includeControl ? V + f : V;
    const WaveObservable gv = gamma(H, V);
    const WaveObservable rv = opt.includeRVFlow ? resonant(H, V) : WaveObservable(V.d(), V.r());
    ConjugationReport rep;
    rep.times = time_grid(opt.T, opt.gridPoints);
    rep.perSample.assign(samples.size(), 0.0);
    parallel_for(samples.size(), [&](std::size_t s) {
        const auto traj = integrate_classical(H, U, samples[s], rep.times, opt.tol);
        const PhasePoint y0 = lie_point_transform(gv, samples[s], -1.0, opt.tol);
        const std::vector<PhasePoint> ys =
            rv.empty() ? std::vector<PhasePoint>(rep.times.size(), y0)
                       : run(rv, std::vector<double>(V.r(), 0.0), y0, rep.times, opt.tol);
        double worst = 0.0;
        for (std::size_t i = 0; i < rep.times.size(); ++i) {
            const PhasePoint z = lie_point_transform(gv, free_shift(H, ys[i], rep.times[i]), 1.0, opt.tol);
            worst = std::max(worst, phase_distance(z, traj.points[i]));
        }
        rep.perSample[s] = worst;
    });
    for (double d : rep.perSample) rep.maxDeviation = std::max(rep.maxDeviation, d);
    return rep;
}

WaveObservable tau_shift(const HamiltonianModel& H, const WaveObservable& v, double t) {
    require_kind(H, v);
    const auto& om = H.classical().omega;
    WaveObservable::Terms out;
    for (const auto& [w, c] : v.terms()) {
        double ph = 0.0;
        for (std::size_t j = 0; j < om.size(); ++j) ph += w.k[j] * om[j] * t;
        out[w] = c * std::polar(1.0, ph);
    }
    return WaveObservable(v.d(), v.r(), out);
}

MomentumDriftReport momentum_drift(const HamiltonianModel& H, const WaveObservable& V, double t,
                                   const PhasePoint& x, const SeriesPolicy& policy, std::size_t component) {
    require_kind(H, V);
    if (!resonant(H, V).empty()) throw ValidationError("drift formula needs a perturbation without resonant part");
    const WaveObservable gv = gamma(H, V);
    const WaveObservable y = d_dq(gv, component);
    const WaveObservable none(V.d(), V.r());
    const auto near = lie_series(-gv, y, FactorialCoef{1.0, 1}, none, FactorialCoef{0.0, 0}, 0, policy);
    const auto corr = lie_series(gv, y, FactorialCoef{1.0, 1}, none, FactorialCoef{0.0, 0}, 0, policy);
    const WaveObservable far = exp_lie(-gv, tau_shift(H, -corr.sum, t), policy);
    MomentumDriftReport r;
    r.nearTerm = evaluate(near.sum, x);
    r.farTerm = evaluate(far, x);
    r.drift = r.nearTerm + r.farTerm;
    double b = corr.tail;
    for (double n : corr.termNorms) b += n;
    r.bound = 2.0 * b;
    return r;
}

QuantumConjugationReport verify_conjugation_quantum(const HamiltonianModel& H, const MatrixObservable& V,
                                                    const SeriesPolicy& policy, const std::vector<double>& times,
                                                    double invTol) {
    require_kind(H, V);
    QuantumConjugationReport rep;
    const double nv = norm(H, V);
    rep.W = nv > 0.0 ? invert_fixed_point(H, V, policy, invTol * nv).W : V;
    const CMatrix h = H.matrix();
    const CMatrix g = gamma(H, rep.W).a;
    const CMatrix rw = resonant(H, rep.W).a;
    const cplx i(0.0, 1.0);
    const CMatrix u = expm(-i * g), ui = expm(i * g);
    rep.generator = (h + V.a - u * (h + rw) * ui).norm();
    rep.commutator = (h * rw - rw * h).norm();
    rep.times = times;
    for (double t : times) rep.flow.push_back((expm(i * t * (h + V.a)) - u * expm(i * t * (h + rw)) * ui).norm());
    return rep;
}

ApproximateControlReport<MatrixObservable> approximate_control_decomposition(
    const HamiltonianModel& H, const MatrixObservable& V, const MatrixObservable& phi, const SeriesPolicy& policy,
    double invTol) {
    require_kind(H, V);
    require_kind(H, phi);
    ApproximateControlReport<MatrixObservable> rep;
    const MatrixObservable gv = gamma(H, V);
    rep.argument = resonant(H, V) + exp_lie(gv, phi - control_term(H, V, policy).f, policy);
    const double na = norm(H, rep.argument);
    rep.W = na > 0.0 ? invert_fixed_point(H, rep.argument, policy, invTol * na).W : zero_like(V);
    rep.normW = norm(H, rep.W);
    const CMatrix h = H.matrix();
    const cplx i(0.0, 1.0);
    const CMatrix gV = gv.a, gW = gamma(H, rep.W).a;
    const CMatrix inner = expm(-i * gW) * (h + resonant(H, rep.W).a) * expm(i * gW);
    const CMatrix rhs = expm(-i * gV) * inner * expm(i * gV);
    rep.residual = (h + V.a + phi.a - rhs).norm();
    return rep;
}

ApproximateControlReport<WaveObservable> approximate_control_decomposition(
    const HamiltonianModel& H, const WaveObservable& V, const WaveObservable& phi, const SeriesPolicy& policy,
    const std::vector<PhasePoint>& samples, const ConjugationOptions& opt, double invTol) {
    require_kind(H, V);
    require_kind(H, phi);
    ApproximateControlReport<WaveObservable> rep;
    const WaveObservable gv = gamma(H, V);
    rep.argument = resonant(H, V) + exp_lie(gv, phi - control_term(H, V, policy).f, policy);
    const double na = norm(H, rep.argument);
    rep.W = na > 0.0 ? invert_fixed_point(H, rep.argument, policy, invTol * na).W : zero_like(V);
    rep.normW = norm(H, rep.W);

    const WaveObservable U = V + phi;
    const WaveObservable gw = gamma(H, rep.W);
    const WaveObservable rw = resonant(H, rep.W);
    const auto times = time_grid(opt.T, opt.gridPoints);
    std::vector<double> worst(samples.size(), 0.0);
    parallel_for(samples.size(), [&](std::size_t s) {
        const auto traj = integrate_classical(H, U, samples[s], times, opt.tol);
        const PhasePoint y0 =
            lie_point_transform(gw, lie_point_transform(gv, samples[s], -1.0, opt.tol), -1.0, opt.tol);
        const std::vector<PhasePoint> ys = rw.empty() ? std::vector<PhasePoint>(times.size(), y0)
                                                      : run(rw, std::vector<double>(V.r(), 0.0), y0, times, opt.tol);
        for (std::size_t i = 0; i < times.size(); ++i) {
            const PhasePoint z = lie_point_transform(
                gv, lie_point_transform(gw, free_shift(H, ys[i], times[i]), 1.0, opt.tol), 1.0, opt.tol);
            worst[s] = std::max(worst[s], phase_distance(z, traj.points[i]));
        }
    });
    for (double w : worst) rep.residual = std::max(rep.residual, w);
    return rep;
}

} // namespace hamctl
