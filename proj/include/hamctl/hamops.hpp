#pragma once

#include "hamctl/matrix.hpp"
#include "hamctl/wave.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hamctl {

/// H = Omega.E on the extended torus; {H} multiplies a wave by i(Omega.k).
struct ClassicalHarmonic {
    std::size_t d = 1;
    std::size_t r = 1;
    std::vector<double> omega;
    double resonanceTol = 0.0;
};

/// H = sum_A h(A) P_A, optionally expressed in a rotated basis (columns of U).
struct QuantumDiagonal {
    SpectralPartition partition;
    double hbar = 1.0;
    CMatrix basis; // empty: identity
};

struct HamiltonianModel {
    std::variant<ClassicalHarmonic, QuantumDiagonal> model;

    bool is_classical() const { return std::holds_alternative<ClassicalHarmonic>(model); }
    bool is_quantum() const { return std::holds_alternative<QuantumDiagonal>(model); }
    const ClassicalHarmonic& classical() const;
    const QuantumDiagonal& quantum() const;
    /// The matrix of H (quantum only), built from class values.
    CMatrix matrix() const;
};

/// resonanceTol < 0 selects 0 for integer Omega, else 1e-12 |Omega|.
HamiltonianModel classical_harmonic(std::size_t d, std::size_t r, std::vector<double> omega,
                                    double resonanceTol = -1.0);
HamiltonianModel quantum_diagonal(const std::vector<double>& h, double gapTol = -1.0, double hbar = 1.0);
HamiltonianModel quantum_diagonal(SpectralPartition p, double hbar = 1.0, CMatrix basis = {});

struct UniformWeight {};
/// g(A, A') = phi_A phi_A', one phi per spectral class.
struct ProductWeight {
    std::vector<double> phi;
};
/// g(A, A') = table[A][A'] for column class A and row class A'.
struct TableWeight {
    std::vector<std::vector<double>> table;
};
using WeightFunction = std::variant<UniformWeight, ProductWeight, TableWeight>;

double weight_value(const WeightFunction& g, int from, int to);

MatrixObservable liouville(const HamiltonianModel& H, const MatrixObservable& v);
WaveObservable liouville(const HamiltonianModel& H, const WaveObservable& v);
MatrixObservable gamma(const HamiltonianModel& H, const MatrixObservable& v);
WaveObservable gamma(const HamiltonianModel& H, const WaveObservable& v);
MatrixObservable resonant(const HamiltonianModel& H, const MatrixObservable& v);
WaveObservable resonant(const HamiltonianModel& H, const WaveObservable& v);
MatrixObservable nonresonant(const HamiltonianModel& H, const MatrixObservable& v);
WaveObservable nonresonant(const HamiltonianModel& H, const WaveObservable& v);

/// True when Omega.k is within resonanceTol of zero.
bool is_resonant_wave(const ClassicalHarmonic& H, const WaveVector& w);

struct PseudoInverseReport {
    double hhg = 0.0;     // {H}^2 Gamma - {H}
    double hgh = 0.0;     // {H} Gamma {H} - {H}
    double ghg = 0.0;     // Gamma {H} Gamma - Gamma
    double commute = 0.0; // {H} Gamma - Gamma {H}
    double tolerance = 1e-12;
    bool passes = false;
};

PseudoInverseReport check_pseudoinverse(const HamiltonianModel& H,
                                        const std::vector<MatrixObservable>& samples);
PseudoInverseReport check_pseudoinverse(const HamiltonianModel& H,
                                        const std::vector<WaveObservable>& samples);

struct NonresonanceReport {
    bool nonresonant = true;
    std::vector<int> witness; // classical integer vector, or quantum class indices
    std::string detail;
};

NonresonanceReport is_nonresonant(const HamiltonianModel& H, int cutoff);

/// Weighted norm: sup over column class of sum over blocks of ||block||_2 / g.
double norm(const HamiltonianModel& H, const MatrixObservable& v, const WeightFunction& g = UniformWeight{});
/// Sum |c(D)|; only the uniform weight applies to waves.
double norm(const HamiltonianModel& H, const WaveObservable& v, const WeightFunction& g = UniformWeight{});

/// Finite set of wavevectors supporting the observables under consideration.
struct WaveBand {
    std::vector<WaveVector> vectors;
    /// Integer lattice |n_i|, |m_i| <= nmax, |k_j| <= kmax.
    static WaveBand box(std::size_t d, std::size_t r, int nmax, int kmax);
    static WaveBand support(const WaveObservable& v);
};

/// Quantum: sup_{A != A'} psi(A, A')/|h(A) - h(A')|.
double gamma_opnorm_bound(const HamiltonianModel& H, const WeightFunction& g = UniformWeight{});
/// Classical: sup over nonresonant D' and any D in the band of |sigma(D', D)|/|Omega.k'|.
double gamma_opnorm_bound(const HamiltonianModel& H, const WaveBand& band,
                          const WeightFunction& g = UniformWeight{});

/// psi(A, A') = g(A, A') sup_{A''} max(g(A, A'')/g(A', A''), g(A', A'')/g(A, A'')).
double psi(const SpectralPartition& p, const WeightFunction& g, int a, int b);

/// min over distinct classes of |h(A) - h(A')| / psi(A, A').
double diophantine_margin(const SpectralPartition& p, const WeightFunction& g = UniformWeight{});

/// The uniform norm used for certification: l1 for waves, Frobenius for matrices.
inline double tail_norm(const WaveObservable& v) { return l1_norm(v); }
inline double tail_norm(const MatrixObservable& v) { return frobenius_norm(v); }

/// Fixed-hbar Lie bracket used by all series (hbar = 1 for matrices).
inline WaveObservable lie(const WaveObservable& a, const WaveObservable& b) { return poisson_bracket(a, b); }
inline MatrixObservable lie(const MatrixObservable& a, const MatrixObservable& b) {
    return commutator_bracket(a, b, 1.0);
}

inline WaveObservable zero_like(const WaveObservable& v) { return WaveObservable(v.d(), v.r()); }
inline MatrixObservable zero_like(const MatrixObservable& v) { return MatrixObservable::zero(v.dim()); }

/// Throws unless the observable kind matches the Hamiltonian variant.
void require_kind(const HamiltonianModel& H, const WaveObservable& v);
void require_kind(const HamiltonianModel& H, const MatrixObservable& v);

} // namespace hamctl
