#include "hamctl/control.hpp"
#include "hamctl/errors.hpp"

#include <cmath>

namespace hamctl {

template <class Obs>
SeriesResult<Obs> exp_lie_series(const Obs& S, const Obs& X, const SeriesPolicy& policy) {
    return lie_series(S, X, FactorialCoef{1.0, 0}, X, FactorialCoef{0.0, 0}, 0, policy);
}

template <class Obs>
SeriesResult<Obs> F_series(const HamiltonianModel& H, const Obs& W, const SeriesPolicy& policy) {
    require_kind(H, W);
    return lie_series(-gamma(H, W), resonant(H, W), FactorialCoef{1.0, 0}, nonresonant(H, W),
                      FactorialCoef{1.0, 1}, 0, policy);
}

template <class Obs>
ControlReport<Obs> control_term(const HamiltonianModel& H, const Obs& V, const SeriesPolicy& policy) {
    require_kind(H, V);
    auto s = lie_series(-gamma(H, V), resonant(H, V), FactorialCoef{1.0, 0}, nonresonant(H, V),
                        FactorialCoef{1.0, 1}, 1, policy);
    ControlReport<Obs> rep;
    rep.f = s.sum;
    rep.F = V + s.sum;
    rep.ordersUsed = s.order;
    rep.tailBound = s.tail;
    const double nv = norm(H, V);
    rep.fBound = std::expm1(policy.gammaBound * nv) * nv;
    rep.terms = std::move(s.terms);
    rep.termNorms = std::move(s.termNorms);
    rep.policy = policy;
    return rep;
}

template SeriesResult<WaveObservable> exp_lie_series(const WaveObservable&, const WaveObservable&,
                                                     const SeriesPolicy&);
template SeriesResult<MatrixObservable> exp_lie_series(const MatrixObservable&, const MatrixObservable&,
                                                       const SeriesPolicy&);
template SeriesResult<WaveObservable> F_series(const HamiltonianModel&, const WaveObservable&,
                                               const SeriesPolicy&);
template SeriesResult<MatrixObservable> F_series(const HamiltonianModel&, const MatrixObservable&,
                                                 const SeriesPolicy&);
template ControlReport<WaveObservable> control_term(const HamiltonianModel&, const WaveObservable&,
                                                   const SeriesPolicy&);
template ControlReport<MatrixObservable> control_term(const HamiltonianModel&, const MatrixObservable&,
                                                     const SeriesPolicy&);

double conjugation_residual(const HamiltonianModel& H, const MatrixObservable& W, const SeriesPolicy& policy) {
    require_kind(H, W);
    const CMatrix h = H.matrix();
    const CMatrix g = gamma(H, W).a;
    const cplx i(0.0, 1.0);
    const CMatrix rhs = expm(-i * g) * (h + resonant(H, W).a) * expm(i * g);
    const CMatrix lhs = h + F_apply(H, W, policy).a;
    return (lhs - rhs).norm();
}

double conjugation_residual(const HamiltonianModel& H, const WaveObservable& W, const SeriesPolicy& policy) {
    require_kind(H, W);
    SeriesPolicy tight = policy;
    tight.tailTol = policy.tailTol * 1e-2;
    const WaveObservable g = -gamma(H, W);
    // e^{{G}}H - H = sum_{n>=1} {G}^{n-1} ({G}H)/n! with {G}H = {H}GW
    const WaveObservable gh = liouville(H, gamma(H, W));
    const auto hpart = lie_series(g, gh, FactorialCoef{1.0, 1}, gh, FactorialCoef{0.0, 0}, 0, tight);
    const auto rpart = exp_lie_series(g, resonant(H, W), tight);
    return l1_norm(F_apply(H, W, policy) - hpart.sum - rpart.sum);
}

SmallnessReport smallness_report(double gammaBound, double normV) {
    if (!(gammaBound > 0.0)) throw ValidationError("operator bound must be positive");
    SmallnessReport r;
    r.threshold = 1.0 / (5.0 * gammaBound);
    r.passes = normV <= r.threshold;
    r.controlRatioBound = std::expm1(0.2);
    return r;
}

} // namespace hamctl
