#pragma once

#include "hamctl/hamops.hpp"

#include <map>
#include <vector>

namespace hamctl {

/// eps sigma sqrt(2b^2 - 1) sin(nq + mp + tau) - eps sin(q + p + tau).
struct TwoWaveParams {
    double epsilon = 0.05;
    double b = 1.0;
    int sigma = 1;
    double n = 2.0;
    double m = 3.0;

    void validate() const;
};

/// H = E with one time channel of unit frequency, d = 1.
HamiltonianModel tokamak_model();

WaveObservable two_wave_potential(const TwoWaveParams& P);

/// Amplitude of the slow wave: ((2b^2-1)^{1/4}/b) ((1 - cos(eps b (m-n)))/|m-n|)^{1/2}.
double epsilon_hat(const TwoWaveParams& P);
/// Amplitude of the four fast waves: ((4b^2-2)^{1/6}/b) (eps b - sin(eps b (m-n))/(m-n))^{1/3}.
double epsilon_tilde(const TwoWaveParams& P);

/// The five-wave closed form with the amplitudes above.
WaveObservable closed_form_control(const TwoWaveParams& P);

struct SpectrumParams {
    double epsilon = 0.01;
    int N = 3;
};

/// eps/(n^2+m^2)^{3/2} sin(nq + mp + tau) over integers 1 <= n^2+m^2 <= N^2.
WaveObservable spectrum_potential(const SpectrumParams& S);

/// Sine amplitudes a(D) of sum a(D) sin(D.x) over canonical wavevectors.
using SineTable = std::map<WaveVector, double>;

/// Fails if the observable carries cosine parts above relTol times its largest amplitude.
SineTable sine_table(const WaveObservable& v, double relTol = 1e-12);
WaveObservable from_sine_table(std::size_t d, std::size_t r, const SineTable& t);

struct EpsilonRecursion {
    std::vector<SineTable> levels; // levels[s-1] is the table of {GV}^{s-1} V
    WaveObservable f;              // sum_{s=2}^{smax} (-1)^{s-1} levels[s-1]/s!
};

/// Tables of iterated brackets for a base with k != 0 everywhere and H = E:
/// e_s(D) = 1/2 sum_{D'} e_1(D')/k' (m'.n - n'.m) (e_{s-1}(D - D') - e_{s-1}(D + D')).
EpsilonRecursion epsilon_recursion(const SineTable& base, std::size_t d, std::size_t r, int smax);

} // namespace hamctl
