#include "hamctl/matrix.hpp"
#include "hamctl/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hamctl {

MatrixObservable::MatrixObservable(CMatrix m) : a(std::move(m)) {
    if (a.rows() != a.cols()) throw ValidationError("matrix observable must be square");
    if (!a.allFinite()) throw ValidationError("matrix observable has non-finite entries");
}

MatrixObservable MatrixObservable::zero(Eigen::Index dim) {
    return MatrixObservable(CMatrix::Zero(dim, dim));
}

namespace {
void require_same(const MatrixObservable& u, const MatrixObservable& v) {
    if (u.dim() != v.dim()) throw ValidationError("matrix observables have different dimensions");
}
} // namespace

MatrixObservable operator+(const MatrixObservable& u, const MatrixObservable& v) {
    require_same(u, v);
    return MatrixObservable(u.a + v.a);
}
MatrixObservable operator-(const MatrixObservable& u, const MatrixObservable& v) {
    require_same(u, v);
    return MatrixObservable(u.a - v.a);
}
MatrixObservable operator-(const MatrixObservable& v) { return MatrixObservable(-v.a); }
MatrixObservable operator*(double s, const MatrixObservable& v) { return MatrixObservable(s * v.a); }

MatrixObservable commutator_bracket(const MatrixObservable& w, const MatrixObservable& v, double hbar) {
    require_same(w, v);
    if (!(hbar > 0.0)) throw ValidationError("hbar must be positive");
    const cplx f(0.0, 1.0 / hbar);
    return MatrixObservable(f * (w.a * v.a - v.a * w.a));
}

double frobenius_norm(const MatrixObservable& v) { return v.a.norm(); }

SpectralPartition SpectralPartition::build(const std::vector<double>& eigenvalues, double gapTol) {
    if (eigenvalues.empty()) throw ValidationError("empty spectrum");
    for (double h : eigenvalues)
        if (!std::isfinite(h)) throw ValidationError("non-finite eigenvalue");
    SpectralPartition p;
    p.eigenvalues = eigenvalues;
    const auto [lo, hi] = std::minmax_element(eigenvalues.begin(), eigenvalues.end());
    p.gapTol = gapTol >= 0.0 ? gapTol : 1e-9 * (*hi - *lo);

    std::vector<int> order(eigenvalues.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return eigenvalues[i] < eigenvalues[j]; });
    p.classOf.assign(eigenvalues.size(), -1);
    for (std::size_t s = 0; s < order.size(); ++s) {
        int i = order[s];
        if (s == 0 || eigenvalues[i] - eigenvalues[order[s - 1]] > p.gapTol) p.classes.emplace_back();
        p.classes.back().push_back(i);
        p.classOf[i] = static_cast<int>(p.classes.size()) - 1;
    }
    for (auto& c : p.classes) {
        std::sort(c.begin(), c.end());
        double s = 0.0;
        for (int i : c) s += eigenvalues[i];
        p.classValue.push_back(s / static_cast<double>(c.size()));
    }
    return p;
}

std::vector<MatrixBlock> block_decompose(const MatrixObservable& v, const SpectralPartition& p) {
    if (static_cast<std::size_t>(v.dim()) != p.dim())
        throw ValidationError("partition dimension does not match observable");
    std::vector<MatrixBlock> out;
    const int nc = static_cast<int>(p.num_classes());
    for (int A = 0; A < nc; ++A) {
        for (int B = 0; B < nc; ++B) {
            const auto& rows = p.classes[B];
            const auto& cols = p.classes[A];
            CMatrix blk(rows.size(), cols.size());
            for (std::size_t i = 0; i < rows.size(); ++i)
                for (std::size_t j = 0; j < cols.size(); ++j) blk(i, j) = v.a(rows[i], cols[j]);
            if (blk.cwiseAbs().maxCoeff() == 0.0) continue;
            out.push_back({A, B, std::move(blk)});
        }
    }
    return out;
}

MatrixObservable block_reassemble(const std::vector<MatrixBlock>& blocks, const SpectralPartition& p) {
    CMatrix m = CMatrix::Zero(p.dim(), p.dim());
    for (const auto& b : blocks) {
        const auto& rows = p.classes[b.to];
        const auto& cols = p.classes[b.from];
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j) m(rows[i], cols[j]) = b.block(i, j);
    }
    return MatrixObservable(m);
}

SpectralPartition floquet_hamiltonian(const std::vector<double>& hcore, int kmax) {
    if (hcore.empty()) throw ValidationError("empty Floquet core spectrum");
    if (kmax < 0) throw ValidationError("kmax must be >= 0");
    std::vector<double> ev;
    for (int k = -kmax; k <= kmax; ++k)
        for (double h : hcore) ev.push_back(k + h);
    auto p = SpectralPartition::build(ev);
    p.floquet = FloquetCore{hcore, kmax};
    return p;
}

CMatrix expm(const CMatrix& x) { return x.exp(); }

double spectral_norm(const CMatrix& x) {
    if (x.size() == 0) return 0.0;
    if (x.size() == 1) return std::abs(x(0, 0));
    Eigen::JacobiSVD<CMatrix> svd(x);
    return svd.singularValues()(0);
}

} // namespace hamctl
