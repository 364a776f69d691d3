#include "helpers.hpp"

#include "hamctl/control.hpp"
#include "hamctl/errors.hpp"
#include "hamctl/flows.hpp"
#include "hamctl/tokamak.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace hamctl;
using namespace testing_util;

namespace {

double total_energy(const HamiltonianModel& H, const WaveObservable& U, const PhasePoint& x) {
    double e = evaluate(U, x);
    for (std::size_t j = 0; j < x.E.size(); ++j) e += H.classical().omega[j] * x.E[j];
    return e;
}

std::vector<PhasePoint> sample_points(std::mt19937_64& gen, int n) {
    std::vector<PhasePoint> pts;
    for (int i = 0; i < n; ++i) pts.push_back(random_point(gen, 1, 1));
    return pts;
}

} // namespace

TEST_CASE("free flow only advances time channels") {
    const auto H = classical_harmonic(1, 1, {1.5});
    PhasePoint x = make_point(1, 1);
    x.q[0] = 0.3;
    x.p[0] = -1.0;
    const auto tr = integrate_classical(H, WaveObservable(1, 1), x, {0.0, 2.0}, 1e-10);
    REQUIRE(tr.points.size() == 2);
    const auto& y = tr.points.back();
    CHECK(y.q[0] == doctest::Approx(0.3));
    CHECK(y.p[0] == doctest::Approx(-1.0));
    CHECK(y.tau[0] == doctest::Approx(3.0));
}

TEST_CASE("time-independent waves conserve the potential") {
    std::mt19937_64 gen(31);
    const auto H = classical_harmonic(1, 1, {1.0});
    WaveObservable U(1, 1);
    for (int i = 0; i < 3; ++i) {
        std::uniform_int_distribution<int> k(-2, 2);
        std::uniform_real_distribution<double> a(-0.5, 0.5);
        U = U + WaveObservable::sine(1, 1, wv({(double)k(gen)}, {(double)k(gen)}, {0}), a(gen));
    }
    const auto x = random_point(gen, 1, 1);
    const auto tr = integrate_classical(H, U, x, time_grid(10.0, 11), 1e-11);
    for (const auto& y : tr.points) CHECK(std::abs(evaluate(U, y) - evaluate(U, x)) <= 1e-8);
}

TEST_CASE("extended energy is conserved for driven waves") {
    std::mt19937_64 gen(32);
    const auto H = classical_harmonic(1, 1, {1.0});
    const auto U = random_waves(gen, 1, 1, 3, 0.3);
    const auto x = random_point(gen, 1, 1);
    const auto tr = integrate_classical(H, U, x, time_grid(10.0, 11), 1e-11);
    for (const auto& y : tr.points) CHECK(std::abs(total_energy(H, U, y) - total_energy(H, U, x)) <= 1e-8);
}

TEST_CASE("backward integration returns to the start") {
    std::mt19937_64 gen(33);
    const auto H = classical_harmonic(1, 1, {1.0});
    const auto U = random_waves(gen, 1, 1, 3, 0.3);
    const auto x = random_point(gen, 1, 1);
    const double tol = 1e-10;
    const auto fwd = integrate_classical(H, U, x, {0.0, 5.0}, tol);
    const auto back = integrate_classical(H, U, fwd.points.back(), {0.0, -5.0}, tol);
    CHECK(phase_distance(back.points.back(), x) <= 10 * tol);
    CHECK(std::abs(back.points.back().tau[0] - x.tau[0]) <= 1e-12);
    CHECK_THROWS_AS(integrate_classical(H, U, x, {1.0, 2.0}, tol), ValidationError);
}

TEST_CASE("Lie point transform") {
    std::mt19937_64 gen(34);
    const auto S = random_waves(gen, 1, 1, 3, 0.05);
    const auto x = random_point(gen, 1, 1);
    SUBCASE("zero generator") {
        CHECK(phase_distance(lie_point_transform(WaveObservable(1, 1), x, 1.0, 1e-12), x) == 0.0);
    }
    SUBCASE("forward then backward") {
        const auto y = lie_point_transform(S, lie_point_transform(S, x, 1.0, 1e-12), -1.0, 1e-12);
        CHECK(phase_distance(y, x) <= 1e-9);
    }
    SUBCASE("pulls back observables like the Lie series") {
        // X(phi_S(x)) = (e^{{S}} X)(x) with {W}V = dW/dp dV/dq - dW/dq dV/dp
        SeriesPolicy p;
        const auto X = random_waves(gen, 1, 1, 3, 1.0);
        double worst = 0.0;
        double worstMinus = 0.0;
        const auto fwd = exp_lie(S, X, p), bwd = exp_lie(-S, X, p);
        for (int s = 0; s < 20; ++s) {
            const auto z = random_point(gen, 1, 1);
            worst = std::max(worst, std::abs(evaluate(X, lie_point_transform(S, z, 1.0, 1e-12)) - evaluate(fwd, z)));
            worstMinus =
                std::max(worstMinus, std::abs(evaluate(X, lie_point_transform(S, z, -1.0, 1e-12)) - evaluate(bwd, z)));
        }
        CHECK(worst <= 1e-6);
        CHECK(worstMinus <= 1e-6);
    }
}

TEST_CASE("classical conjugation") {
    const auto H = tokamak_model();
    std::mt19937_64 gen(35);
    const auto pts = sample_points(gen, 3);
    SeriesPolicy p;
    ConjugationOptions opt;
    opt.T = 10.0;
    opt.gridPoints = 11;
    SUBCASE("zero perturbation") {
        const WaveObservable zero(1, 1);
        const auto r = verify_conjugation_classical(H, zero, zero, pts, opt);
        CHECK(r.maxDeviation <= 1e-12);
        CHECK(r.perSample.size() == 3);
        CHECK(r.times.size() == 11);
    }
    SUBCASE("two waves with their control term") {
        TwoWaveParams P;
        P.epsilon = 0.02;
        const auto V = two_wave_potential(P);
        const auto f = control_term(H, V, p).f;
        const auto on = verify_conjugation_classical(H, V, f, pts, opt);
        CHECK(on.maxDeviation <= 1e-5);
        opt.includeControl = false;
        const auto off = verify_conjugation_classical(H, V, f, pts, opt);
        CHECK(off.maxDeviation > 10 * on.maxDeviation);
    }
    SUBCASE("a resonant part needs its own flow") {
        const auto V = WaveObservable::sine(1, 1, wv({1}, {1}, {0}), 0.01) +
                       WaveObservable::sine(1, 1, wv({2}, {3}, {1}), 0.01);
        const auto f = control_term(H, V, p).f;
        const auto with = verify_conjugation_classical(H, V, f, pts, opt);
        opt.includeRVFlow = false;
        const auto without = verify_conjugation_classical(H, V, f, pts, opt);
        CHECK(with.maxDeviation <= 1e-6);
        CHECK(without.maxDeviation > 100 * with.maxDeviation);
    }
}

TEST_CASE("momentum drift") {
    const auto H = tokamak_model();
    SeriesPolicy p;
    std::mt19937_64 gen(36);
    const auto x = random_point(gen, 1, 1);
    SUBCASE("zero perturbation") {
        const auto r = momentum_drift(H, WaveObservable(1, 1), 3.0, x, p);
        CHECK(r.drift == 0.0);
        CHECK(r.bound == 0.0);
    }
    SUBCASE("against the controlled trajectory") {
        TwoWaveParams P;
        P.epsilon = 0.02;
        const auto V = two_wave_potential(P);
        const auto f = control_term(H, V, p).f;
        for (double t : {1.0, 10.0}) {
            const auto r = momentum_drift(H, V, t, x, p);
            CHECK(std::abs(r.drift) <= r.bound);
            const auto tr = integrate_classical(H, V + f, x, {0.0, t}, 1e-11);
            CHECK(std::abs(tr.points.back().p[0] - x.p[0] - r.drift) <= 1e-5);
        }
    }
    SUBCASE("resonant part rejected") {
        const auto V = WaveObservable::sine(1, 1, wv({1}, {1}, {0}), 0.01);
        CHECK_THROWS_AS(momentum_drift(H, V, 1.0, x, p), ValidationError);
    }
}

TEST_CASE("free flow on observables") {
    const auto H = classical_harmonic(1, 1, {2.0});
    const auto w = wv({1}, {0}, {1});
    const auto v = WaveObservable::sine(1, 1, w, 1.0);
    const auto s = tau_shift(H, v, 0.25);
    // sin(q + tau) -> sin(q + tau + 0.5)
    const auto expect = WaveObservable::sine(1, 1, w, std::cos(0.5)) + WaveObservable::cosine(1, 1, w, std::sin(0.5));
    CHECK(l1_norm(s - expect) <= 1e-15);
    CHECK(l1_norm(tau_shift(H, v, 0.0) - v) == 0.0);
}

TEST_CASE("quantum conjugation") {
    SeriesPolicy p;
    SUBCASE("zero perturbation") {
        const auto H = quantum_diagonal({0.0, 1.0});
        const auto r = verify_conjugation_quantum(H, MatrixObservable::zero(2), p, {1.0});
        CHECK(r.generator == 0.0);
        CHECK(r.flow[0] <= 1e-14);
    }
    SUBCASE("sigma_x") {
        const auto H = quantum_diagonal({0.0, 1.0});
        p.gammaBound = gamma_opnorm_bound(H);
        const auto r = verify_conjugation_quantum(H, MatrixObservable{0.1 * pauli_x()}, p, {1.0, 5.0, 20.0});
        CHECK(r.generator <= 1e-10);
        for (double e : r.flow) CHECK(e <= 1e-9);
        CHECK(r.commutator <= 1e-14);
    }
    SUBCASE("degenerate spectrum") {
        const auto H = quantum_diagonal({0.0, 0.0, 1.0});
        p.gammaBound = gamma_opnorm_bound(H);
        std::mt19937_64 gen(37);
        const MatrixObservable V0{random_hermitian(gen, 3)};
        const auto V = (0.1 / norm(H, V0)) * V0;
        const auto r = verify_conjugation_quantum(H, V, p, {1.0, 5.0});
        CHECK(r.generator <= 1e-10);
        for (double e : r.flow) CHECK(e <= 1e-8);
        CHECK(r.commutator <= 1e-13);
    }
}

TEST_CASE("approximate control") {
    SeriesPolicy p;
    const auto H = quantum_diagonal({0.0, 0.0, 1.0, 2.5});
    p.gammaBound = gamma_opnorm_bound(H);
    std::mt19937_64 gen(38);
    const MatrixObservable V0{random_hermitian(gen, 4)};
    const auto V = (0.05 / norm(H, V0)) * V0;
    const auto f = control_term(H, V, p).f;
    SUBCASE("exact control leaves only the resonant part") {
        const auto r = approximate_control_decomposition(H, V, f, p);
        CHECK(frobenius_norm(r.argument - resonant(H, V)) <= 1e-14);
        CHECK(r.residual <= 1e-12);
    }
    SUBCASE("truncated control beats none") {
        const auto f2 = control_term(H, V, p).terms.front();
        const auto with = approximate_control_decomposition(H, V, f2, p);
        const auto none = approximate_control_decomposition(H, V, MatrixObservable::zero(4), p);
        CHECK(with.residual <= 1e-11);
        CHECK(norm(H, nonresonant(H, with.W)) < norm(H, nonresonant(H, none.W)));
    }
    SUBCASE("classical, control term gives zero W off resonance") {
        const auto Hc = tokamak_model();
        TwoWaveParams P;
        P.epsilon = 0.02;
        const auto Vc = two_wave_potential(P);
        const auto fc = control_term(Hc, Vc, p).f;
        std::mt19937_64 g2(39);
        const auto pts = sample_points(g2, 2);
        ConjugationOptions opt;
        opt.T = 5.0;
        opt.gridPoints = 6;
        const auto r = approximate_control_decomposition(Hc, Vc, fc, p, pts, opt);
        CHECK(r.normW <= 1e-12);
        CHECK(r.residual <= 1e-5);
    }
}
