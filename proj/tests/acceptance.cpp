// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "hamctl/adiabatic.hpp"
#include "hamctl/errors.hpp"
#include "hamctl/flows.hpp"
#include "hamctl/tokamak.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>

using namespace hamctl;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

void run(int id, const char* name, const std::function<std::pair<bool, std::string>()>& body) {
    try {
        const auto [ok, detail] = body();
        report(id, name, ok, detail);
    } catch (const std::exception& e) {
        report(id, name, false, std::string("exception: ") + e.what());
    }
}

CMatrix random_hermitian(std::mt19937_64& gen, int D) {
    std::normal_distribution<double> n(0.0, 1.0);
    CMatrix a(D, D);
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) a(i, j) = cplx(n(gen), n(gen));
    return 0.5 * (a + a.adjoint());
}

MatrixObservable scaled(const HamiltonianModel& H, CMatrix a, double target) {
    MatrixObservable v{std::move(a)};
    return (target / norm(H, v)) * v;
}

// Small dyadic amplitudes and integer wavevectors keep bracket arithmetic exact.
WaveObservable dyadic_waves(std::mt19937_64& gen, std::size_t d, std::size_t r, int count) {
    std::uniform_int_distribution<int> wn(-2, 2), amp(-4, 4), kind(0, 1);
    WaveObservable v(d, r);
    for (int i = 0; i < count; ++i) {
        WaveVector w{std::vector<double>(d), std::vector<double>(d), std::vector<int>(r)};
        for (auto& x : w.n) x = wn(gen);
        for (auto& x : w.m) x = wn(gen);
        for (auto& x : w.k) x = wn(gen);
        const double a = amp(gen) / 8.0;
        if (w.is_zero()) v = v + WaveObservable::constant(d, r, a);
        else v = v + (kind(gen) ? WaveObservable::sine(d, r, w, a) : WaveObservable::cosine(d, r, w, a));
    }
    return v;
}

} // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    SeriesPolicy policy;

    run(1, "gamma constant", [] {
        const double g = gamma_root();
        const double ref = 0.3748225258118948;
        return std::pair{std::abs(g - ref) <= 1e-13,
                         fmt("root %.17g, reference %.16g, |diff| %.3g (tol 1e-13), residual e^g(g+1)-2 = %.3g", g, ref,
                             std::abs(g - ref), std::exp(g) * (g + 1) - 2)};
    });

    const auto H2 = quantum_diagonal({0.0, 1.0});
    std::vector<MatrixObservable> ensemble;
    {
        std::mt19937_64 gen(20240601);
        for (int s = 0; s < 50; ++s) ensemble.push_back(scaled(H2, random_hermitian(gen, 2), 0.2));
    }

    run(2, "inverse ratio bounds", [&] {
        const auto t0 = std::chrono::steady_clock::now();
        SeriesPolicy p = policy;
        p.gammaBound = gamma_opnorm_bound(H2);
        const double g = gamma_root();
        const double lo = 24.0 / 35.0, hi = 24.0 / 13.0, slo = std::exp(-g), shi = 1.0 / (2.0 - std::exp(g));
        double rmin = 1e300, rmax = 0.0;
        bool ok = p.gammaBound == 1.0;
        for (const auto& V : ensemble) {
            const auto r = invert_fixed_point(H2, V, p, 1e-14 * norm(H2, V));
            const double ratio = norm(H2, r.W) / norm(H2, V);
            rmin = std::min(rmin, ratio);
            rmax = std::max(rmax, ratio);
            ok = ok && ratio >= lo && ratio <= hi && ratio >= slo && ratio <= shi;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ok = ok && secs < 10.0;
        return std::pair{ok, fmt("ratio in [%.6f, %.6f] against [%.6f, %.6f]", rmin, rmax, std::max(lo, slo),
                                 std::min(hi, shi)) +
                                 fmt(", bound %.3g, %.2f s", p.gammaBound, secs)};
    });

    run(3, "control smallness", [&] {
        const double cap = std::expm1(0.2);
        double worst = 0.0;
        for (const auto& V : ensemble) {
            const auto r = control_term(H2, V, policy);
            worst = std::max(worst, norm(H2, r.f) / norm(H2, V));
        }
        return std::pair{worst <= cap && cap < 2.0 / 9.0,
                         fmt("max ||f||/||V|| = %.6f, cap e^0.2-1 = %.6f < 2/9", worst, cap)};
    });

    run(4, "conjugation identity (exponential oracle)", [&] {
        const std::vector<std::vector<double>> spectra{{0.0, 1.0}, {0.0, 1.0, 2.5}, {0.0, 0.7, 1.9, 3.2}};
        std::mt19937_64 gen(777);
        double worst = 0.0;
        bool ok = true;
        for (const auto& h : spectra) {
            const auto H = quantum_diagonal(h);
            const double b = gamma_opnorm_bound(H);
            const double scale = 1.0 + H.matrix().norm();
            for (int s = 0; s < 20; ++s) {
                const auto W = scaled(H, random_hermitian(gen, static_cast<int>(h.size())), 0.1 / b);
                const double res = conjugation_residual(H, W, policy);
                worst = std::max(worst, res / scale);
                ok = ok && res <= 1e-9 * scale;
            }
        }
        return std::pair{ok, fmt("max residual/(1+||H||) = %.3g (tol 1e-9)", worst)};
    });

    run(5, "flow conjugation (quantum)", [&] {
        const auto H = quantum_diagonal({0.0, 0.0, 1.0});
        std::mt19937_64 gen(555);
        const auto V = scaled(H, random_hermitian(gen, 3), 0.1);
        const auto r = verify_conjugation_quantum(H, V, policy, {1.0, 5.0, 20.0});
        const double worst = *std::max_element(r.flow.begin(), r.flow.end());
        return std::pair{worst <= 1e-8, fmt("residuals t=1: %.3g, t=5: %.3g, t=20: %.3g (tol 1e-8)", r.flow[0],
                                            r.flow[1], r.flow[2])};
    });

    const TwoWaveParams tw;
    const auto tokH = tokamak_model();
    const auto tokV = two_wave_potential(tw);

    run(6, "tokamak closed form", [&] {
        const auto series = sine_table(control_term(tokH, tokV, policy).f);
        const auto closed = sine_table(closed_form_control(tw));
        std::set<WaveVector> keys;
        for (const auto& [w, a] : series) keys.insert(w);
        for (const auto& [w, a] : closed) keys.insert(w);
        double worst = 0.0, shared = 0.0;
        for (const auto& w : keys) {
            const double a = series.count(w) ? series.at(w) : 0.0;
            const double c = closed.count(w) ? closed.at(w) : 0.0;
            const double rel = std::abs(a - c) / std::max(std::abs(c), std::abs(a));
            worst = std::max(worst, rel);
            if (closed.count(w)) shared = std::max(shared, rel);
        }
        const bool ok = series.size() == 5 && worst <= 1e-9;
        return std::pair{ok, fmt("series has %.0f waves, closed form %.0f; max termwise relative error %.3g over all "
                                 "waves, %.3g over the closed-form waves (tol 1e-9)",
                                 static_cast<double>(series.size()), static_cast<double>(closed.size()), worst, shared)};
    });

    run(7, "trajectory conjugation (classical)", [&] {
        const auto f = control_term(tokH, tokV, policy).f;
        std::mt19937_64 gen(2024);
        std::uniform_real_distribution<double> u(0.0, 2 * std::numbers::pi);
        std::vector<PhasePoint> pts;
        for (int s = 0; s < 10; ++s) {
            PhasePoint x = make_point(1, 1);
            x.q[0] = u(gen);
            x.p[0] = u(gen);
            pts.push_back(x);
        }
        ConjugationOptions opt;
        opt.T = 50.0;
        opt.tol = 1e-8;
        const auto on = verify_conjugation_classical(tokH, tokV, f, pts, opt);
        opt.includeControl = false;
        const auto off = verify_conjugation_classical(tokH, tokV, f, pts, opt);
        int effective = 0;
        double minGain = 1e300;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double gain = off.perSample[i] / on.perSample[i];
            minGain = std::min(minGain, gain);
            if (gain >= 100.0) ++effective;
        }
        const bool ok = on.maxDeviation <= 1e-5 && effective >= 8;
        return std::pair{ok, fmt("controlled max deviation %.3g (tol 1e-5); baseline/controlled >= 100 on %.0f/10 "
                                 "points, min ratio %.3g",
                                 on.maxDeviation, effective, minGain)};
    });

    run(8, "series inverse order", [&] {
        const auto H = quantum_diagonal({0.0, 0.0, 1.0, 2.5});
        std::mt19937_64 gen(4242);
        const auto V0 = scaled(H, random_hermitian(gen, 4), 1.0);
        const std::vector<double> eps{1e-2, 3e-3, 1e-3};
        std::vector<double> lx, ly;
        std::string detail;
        for (double e : eps) {
            const auto V = e * V0;
            const auto ws = invert_series(H, V, 4, policy).W;
            const auto wf = invert_fixed_point(H, V, policy, 1e-15 * e).W;
            const double diff = norm(H, ws - wf);
            lx.push_back(std::log(e));
            ly.push_back(std::log(diff));
            detail += fmt("eps %.0e: %.3g; ", e, diff);
        }
        const double mx = (lx[0] + lx[1] + lx[2]) / 3, my = (ly[0] + ly[1] + ly[2]) / 3;
        double sxy = 0, sxx = 0;
        for (int i = 0; i < 3; ++i) {
            sxy += (lx[i] - mx) * (ly[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        const double slope = sxy / sxx;
        return std::pair{slope >= 4.7, detail + fmt("slope %.3f (need >= 4.7)", slope)};
    });

    run(9, "tree function series", [] {
        double worst = 0.0;
        for (double x : {0.1, 0.2, 0.3, std::exp(-1.0)}) {
            const auto r = lambda_demo(x);
            worst = std::max(worst, std::abs(r.seriesValue - r.newtonValue));
        }
        return std::pair{worst <= 1e-10, fmt("max |series - Newton| = %.3g (tol 1e-10)", worst)};
    });

    run(10, "bracket axioms", [] {
        std::mt19937_64 gen(99);
        int classicalBad = 0;
        for (int s = 0; s < 100; ++s) {
            const auto a = dyadic_waves(gen, 2, 1, 4), b = dyadic_waves(gen, 2, 1, 4), c = dyadic_waves(gen, 2, 1, 4);
            const auto anti = poisson_bracket(a, b) + poisson_bracket(b, a);
            const auto jac = poisson_bracket(a, poisson_bracket(b, c)) + poisson_bracket(b, poisson_bracket(c, a)) +
                             poisson_bracket(c, poisson_bracket(a, b));
            if (!anti.empty() || !jac.empty()) ++classicalBad;
        }
        double worst = 0.0;
        for (int s = 0; s < 100; ++s) {
            const MatrixObservable a{random_hermitian(gen, 3)}, b{random_hermitian(gen, 3)}, c{random_hermitian(gen, 3)};
            const double scale = a.a.norm() * b.a.norm() * c.a.norm();
            const auto anti = commutator_bracket(a, b) + commutator_bracket(b, a);
            const auto jac = commutator_bracket(a, commutator_bracket(b, c)) +
                             commutator_bracket(b, commutator_bracket(c, a)) +
                             commutator_bracket(c, commutator_bracket(a, b));
            worst = std::max({worst, anti.a.norm() / (a.a.norm() * b.a.norm()), jac.a.norm() / scale});
        }
        return std::pair{classicalBad == 0 && worst <= 1e-12,
                         fmt("classical termwise failures %.0f/100; quantum max relative %.3g (tol 1e-12)",
                             classicalBad, worst)};
    });

    run(11, "operator identities", [] {
        std::mt19937_64 gen(11);
        const auto Hq = quantum_diagonal({0.0, 0.0, 1.0, 2.5});
        const auto Hc = classical_harmonic(2, 1, {1.0});
        std::vector<MatrixObservable> qs;
        std::vector<WaveObservable> cs;
        for (int s = 0; s < 100; ++s) {
            qs.push_back(MatrixObservable{random_hermitian(gen, 4)});
            cs.push_back(dyadic_waves(gen, 2, 1, 5));
        }
        const auto pq = check_pseudoinverse(Hq, qs);
        const auto pc = check_pseudoinverse(Hc, cs);
        const WeightFunction g = ProductWeight{{1.0, 0.5, 2.0}};
        double split = 0.0;
        bool contraction = true;
        for (std::size_t s = 0; s < qs.size(); ++s) {
            split = std::max(split, (resonant(Hq, qs[s]) + nonresonant(Hq, qs[s]) - qs[s]).a.norm() / qs[s].a.norm());
            split = std::max(split, l1_norm(resonant(Hc, cs[s]) + nonresonant(Hc, cs[s]) - cs[s]));
            contraction = contraction && norm(Hq, resonant(Hq, qs[s])) <= norm(Hq, qs[s]) &&
                          norm(Hq, resonant(Hq, qs[s]), g) <= norm(Hq, qs[s], g) &&
                          norm(Hc, resonant(Hc, cs[s])) <= norm(Hc, cs[s]);
        }
        const bool ok = pq.passes && pc.passes && split <= 1e-14 && contraction;
        return std::pair{ok, fmt("quantum max pseudo-inverse residual %.3g, classical %.3g, R+N-id %.3g, ||RV|| <= ||V|| ",
                                 std::max({pq.hhg, pq.hgh, pq.ghg, pq.commute}),
                                 std::max({pc.hhg, pc.hgh, pc.ghg, pc.commute}), split) +
                                 (contraction ? "holds" : "violated")};
    });

    run(12, "adiabatic frequency scaling", [&] {
        const auto H = quantum_diagonal({0.0, 1.0});
        CMatrix sx(2, 2);
        sx << 0, 1, 1, 0;
        auto level = [&](double omega) {
            TimeSampledObservable Vt;
            const int n = 401;
            for (int i = 0; i < n; ++i) {
                const double t = (2 * std::numbers::pi / omega) * i / (n - 1);
                Vt.times.push_back(t);
                Vt.values.push_back(MatrixObservable{0.1 * std::sin(omega * t) * sx});
            }
            const auto r = adiabatic_step(H, Vt, policy);
            return *std::max_element(r.normV1.begin(), r.normV1.end());
        };
        const double omega = 1.0;
        const double fast = level(omega), slow = level(omega / 10);
        const double ratio = slow / fast;
        return std::pair{ratio >= 0.08 && ratio <= 0.12,
                         fmt("sup ||V1|| at w: %.6g, at w/10: %.6g, ratio %.6f (need [0.08, 0.12])", fast, slow, ratio)};
    });

    run(13, "tree enumeration", [] {
        std::string detail;
        bool ok = true;
        for (int N = 1; N <= 6; ++N) {
            // brute force over {0..N}^N
            long count = 0;
            std::vector<int> nu(N, 0);
            while (true) {
                bool keep = nu[0] == 0;
                int sum = 0;
                for (int k = 0; k < N && keep; ++k) {
                    if (nu[k] == 1) keep = false;
                    sum += nu[k];
                    if (sum > k) keep = false;
                }
                if (keep && sum == N - 1) ++count;
                int pos = N - 1;
                while (pos >= 0 && nu[pos] == N) nu[pos--] = 0;
                if (pos < 0) break;
                ++nu[pos];
            }
            const auto listed = static_cast<long>(tree_indices(N).size());
            ok = ok && listed == count;
            detail += "N=" + std::to_string(N) + ": " + std::to_string(listed) + "/" + std::to_string(count) + " ";
        }
        return std::pair{ok, detail + "(enumerated/brute force)"};
    });

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d of 13 criteria failed, %.1f s\n", failures, secs);
    return failures == 0 ? 0 : 1;
}
