#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <vector>

namespace hamctl {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// Dense complex D x D observable. Hermiticity is not required.
struct MatrixObservable {
    CMatrix a;

    MatrixObservable() = default;
    explicit MatrixObservable(CMatrix m);
    static MatrixObservable zero(Eigen::Index dim);
    Eigen::Index dim() const { return a.rows(); }
};

MatrixObservable operator+(const MatrixObservable& u, const MatrixObservable& v);
MatrixObservable operator-(const MatrixObservable& u, const MatrixObservable& v);
MatrixObservable operator-(const MatrixObservable& v);
MatrixObservable operator*(double s, const MatrixObservable& v);

/// i(WV - VW)/hbar.
MatrixObservable commutator_bracket(const MatrixObservable& w, const MatrixObservable& v,
                                    double hbar = 1.0);

double frobenius_norm(const MatrixObservable& v);

struct FloquetCore {
    std::vector<double> hcore;
    int kmax = 0;
};

/// Eigenvalues grouped into classes by single linkage with threshold gapTol.
/// Classes are numbered in increasing eigenvalue order.
struct SpectralPartition {
    std::vector<double> eigenvalues;
    double gapTol = 0.0;
    std::vector<int> classOf;
    std::vector<std::vector<int>> classes;
    std::vector<double> classValue; // mean eigenvalue per class
    std::optional<FloquetCore> floquet;

    /// gapTol < 0 selects 1e-9 times the spectral diameter.
    static SpectralPartition build(const std::vector<double>& eigenvalues, double gapTol = -1.0);
    std::size_t dim() const { return eigenvalues.size(); }
    std::size_t num_classes() const { return classes.size(); }
};

struct MatrixBlock {
    int from;  // column class A
    int to;    // row class A + Delta
    CMatrix block;
};

/// Nonzero blocks P_{A+Delta} V P_A, in (from, to) order.
std::vector<MatrixBlock> block_decompose(const MatrixObservable& v, const SpectralPartition& p);
MatrixObservable block_reassemble(const std::vector<MatrixBlock>& blocks, const SpectralPartition& p);

/// Eigenvalues k + h(A) for k in [-kmax, kmax], A over hcore.
SpectralPartition floquet_hamiltonian(const std::vector<double>& hcore, int kmax);

/// Matrix exponential oracle (scaling and squaring with Pade approximants).
CMatrix expm(const CMatrix& x);

/// Largest singular value.
double spectral_norm(const CMatrix& x);

} // namespace hamctl
