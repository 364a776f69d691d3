#pragma once

#include "hamctl/hamops.hpp"

#include <random>

namespace testing_util {

using namespace hamctl;

inline CMatrix random_hermitian(std::mt19937_64& gen, int D) {
    std::normal_distribution<double> n(0.0, 1.0);
    CMatrix a(D, D);
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) a(i, j) = cplx(n(gen), n(gen));
    return 0.5 * (a + a.adjoint());
}

inline CMatrix pauli_x() {
    CMatrix s(2, 2);
    s << 0, 1, 1, 0;
    return s;
}
inline CMatrix pauli_y() {
    CMatrix s(2, 2);
    s << 0, cplx(0, -1), cplx(0, 1), 0;
    return s;
}
inline CMatrix pauli_z() {
    CMatrix s(2, 2);
    s << 1, 0, 0, -1;
    return s;
}

inline WaveVector wv(std::vector<double> n, std::vector<double> m, std::vector<int> k) {
    return WaveVector{std::move(n), std::move(m), std::move(k)};
}

/// Integer wavevectors and dyadic amplitudes: brackets stay exact in double.
inline WaveObservable dyadic_waves(std::mt19937_64& gen, std::size_t d, std::size_t r, int count, int range = 2) {
    std::uniform_int_distribution<int> wn(-range, range), amp(-4, 4), kind(0, 1);
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

/// Random real amplitudes in [-amp, amp] on integer wavevectors.
inline WaveObservable random_waves(std::mt19937_64& gen, std::size_t d, std::size_t r, int count, double amp,
                                   bool allowResonant = true) {
    std::uniform_int_distribution<int> wn(-2, 2), kk(-2, 2);
    std::uniform_real_distribution<double> a(-amp, amp);
    WaveObservable v(d, r);
    for (int i = 0; i < count; ++i) {
        WaveVector w{std::vector<double>(d), std::vector<double>(d), std::vector<int>(r)};
        for (auto& x : w.n) x = wn(gen);
        for (auto& x : w.m) x = wn(gen);
        for (auto& x : w.k) x = kk(gen);
        if (!allowResonant && r > 0 && w.k[0] == 0) w.k[0] = 1;
        if (w.is_zero()) continue;
        v = v + WaveObservable::sine(d, r, w, a(gen)) + WaveObservable::cosine(d, r, w, a(gen));
    }
    return v;
}

inline PhasePoint random_point(std::mt19937_64& gen, std::size_t d, std::size_t r) {
    std::uniform_real_distribution<double> u(0.0, 6.283185307179586);
    PhasePoint x = make_point(d, r);
    for (auto& v : x.q) v = u(gen);
    for (auto& v : x.p) v = u(gen);
    for (auto& v : x.tau) v = u(gen);
    return x;
}

} // namespace testing_util
