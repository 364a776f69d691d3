#include "hamctl/tokamak.hpp"
#include "hamctl/errors.hpp"

#include <cmath>
#include <set>

namespace hamctl {

void TwoWaveParams::validate() const {
    if (!std::isfinite(epsilon) || epsilon == 0.0) throw ValidationError("epsilon must be finite and nonzero");
    if (!(b > 1.0 / std::sqrt(2.0)) || !std::isfinite(b)) throw ValidationError("b must exceed 1/sqrt(2)");
    if (sigma != 1 && sigma != -1) throw ValidationError("sigma must be +1 or -1");
    if (!std::isfinite(n) || !std::isfinite(m)) throw ValidationError("wavenumbers must be finite");
    if (m == n) throw ValidationError("m == n makes V depend on q + p only");
}

HamiltonianModel tokamak_model() { return classical_harmonic(1, 1, {1.0}); }

namespace {
WaveVector wv(double n, double m, int k) { return WaveVector{{n}, {m}, {k}}; }
} // namespace

WaveObservable two_wave_potential(const TwoWaveParams& P) {
    P.validate();
    const double a = P.epsilon * P.sigma * std::sqrt(2 * P.b * P.b - 1);
    return WaveObservable::sine(1, 1, wv(P.n, P.m, 1), a) + WaveObservable::sine(1, 1, wv(1, 1, 1), -P.epsilon);
}

double epsilon_hat(const TwoWaveParams& P) {
    P.validate();
    const double dm = P.m - P.n;
    return std::pow(2 * P.b * P.b - 1, 0.25) / P.b *
           std::sqrt((1 - std::cos(P.epsilon * P.b * dm)) / std::abs(dm));
}

double epsilon_tilde(const TwoWaveParams& P) {
    P.validate();
    const double dm = P.m - P.n;
    return std::pow(4 * P.b * P.b - 2, 1.0 / 6.0) / P.b *
           std::cbrt(P.epsilon * P.b - std::sin(P.epsilon * P.b * dm) / dm);
}

WaveObservable closed_form_control(const TwoWaveParams& P) {
    P.validate();
    const double h2 = std::pow(epsilon_hat(P), 2);
    const double t3 = std::pow(epsilon_tilde(P), 3);
    const double r = std::sqrt(2 * P.b * P.b - 1);
    const double n = P.n, m = P.m;
    WaveObservable f = WaveObservable::sine(1, 1, wv(n - 1, m - 1, 0), h2 * P.sigma);
    f = f + WaveObservable::sine(1, 1, wv(1, 1, 1), t3 * r);
    f = f + WaveObservable::sine(1, 1, wv(2 * n - 1, 2 * m - 1, 1), t3 * r);
    f = f + WaveObservable::sine(1, 1, wv(n, m, 1), -t3 * P.sigma);
    f = f + WaveObservable::sine(1, 1, wv(2 - n, 2 - m, 1), -t3 * P.sigma);
    return f;
}

WaveObservable spectrum_potential(const SpectrumParams& S) {
    if (S.N < 1) throw ValidationError("spectrum cutoff must be >= 1");
    if (!std::isfinite(S.epsilon)) throw ValidationError("epsilon must be finite");
    WaveObservable::Terms t;
    for (int n = -S.N; n <= S.N; ++n) {
        for (int m = -S.N; m <= S.N; ++m) {
            const int r2 = n * n + m * m;
            if (r2 < 1 || r2 > S.N * S.N) continue;
            const double a = S.epsilon / std::pow(r2, 1.5);
            t[wv(n, m, 1)] = cplx(0.0, -0.5 * a);
        }
    }
    return WaveObservable(1, 1, t);
}

SineTable sine_table(const WaveObservable& v, double relTol) {
    SineTable t;
    const double scale = v.max_amplitude();
    for (const auto& [w, c] : v.terms()) {
        if (!w.is_canonical()) continue;
        const auto [a, b] = v.sin_cos(w);
        if (std::abs(b) > relTol * 2 * scale) throw ValidationError("observable has cosine components");
        t[w] = a;
    }
    if (v.coefficient(WaveVector{std::vector<double>(v.d()), std::vector<double>(v.d()), std::vector<int>(v.r())}) !=
        cplx(0.0))
        throw ValidationError("observable has a constant component");
    return t;
}

WaveObservable from_sine_table(std::size_t d, std::size_t r, const SineTable& t) {
    WaveObservable::Terms terms;
    for (const auto& [w, a] : t) {
        if (!w.is_canonical()) throw ValidationError("sine table keys must be canonical");
        terms[w] = cplx(0.0, -0.5 * a);
    }
    return WaveObservable(d, r, terms);
}

namespace {

double lookup(const SineTable& t, const WaveVector& w) {
    if (w.is_zero()) return 0.0;
    if (w.is_canonical()) {
        auto it = t.find(w);
        return it == t.end() ? 0.0 : it->second;
    }
    auto it = t.find(-w);
    return it == t.end() ? 0.0 : -it->second;
}

WaveVector canonical(const WaveVector& w) { return w.is_canonical() ? w : -w; }

} // namespace

EpsilonRecursion epsilon_recursion(const SineTable& base, std::size_t d, std::size_t r, int smax) {
    if (smax < 1) throw ValidationError("recursion depth must be >= 1");
    if (r != 1) throw ValidationError("recursion assumes a single unit-frequency time channel");
    for (const auto& [w, a] : base) {
        if (w.n.size() != d || w.m.size() != d || w.k.size() != r) throw ValidationError("table dimension mismatch");
        if (!w.is_canonical()) throw ValidationError("sine table keys must be canonical");
        if (w.k[0] == 0) throw ValidationError("base waves need k != 0");
    }
    EpsilonRecursion out;
    out.levels.push_back(base);
    out.f = WaveObservable(d, r);
    for (int s = 2; s <= smax; ++s) {
        const SineTable& prev = out.levels.back();
        std::set<WaveVector> cands;
        for (const auto& [w, a] : prev) {
            for (const auto& [wp, ap] : base) {
                for (const auto& c : {w + wp, w - wp, -w + wp}) {
                    if (!c.is_zero()) cands.insert(canonical(c));
                }
            }
        }
        SineTable next;
        double amax = 0.0;
        for (const auto& o : cands) {
            double y = 0.0;
            for (const auto& [wp, ap] : base) {
                const double sig = symplectic(o, wp); // m'.n - n'.m
                if (sig == 0.0) continue;
                y += 0.5 * ap / wp.k[0] * sig * (lookup(prev, o - wp) - lookup(prev, o + wp));
            }
            if (y != 0.0) {
                next[o] = y;
                amax = std::max(amax, std::abs(y));
            }
        }
        for (auto it = next.begin(); it != next.end();) {
            if (std::abs(it->second) < kPruneRelative * amax) it = next.erase(it);
            else ++it;
        }
        const double sign = (s % 2) ? 1.0 : -1.0;
        out.f = out.f + (sign / std::tgamma(s + 1.0)) * from_sine_table(d, r, next);
        out.levels.push_back(std::move(next));
    }
    return out;
}

} // namespace hamctl
