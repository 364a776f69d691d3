#include "hamctl/hamops.hpp"
#include "hamctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hamctl {

const ClassicalHarmonic& HamiltonianModel::classical() const {
    if (!is_classical()) throw ValidationError("expected a classical Hamiltonian");
    return std::get<ClassicalHarmonic>(model);
}

const QuantumDiagonal& HamiltonianModel::quantum() const {
    if (!is_quantum()) throw ValidationError("expected a quantum Hamiltonian");
    return std::get<QuantumDiagonal>(model);
}

CMatrix HamiltonianModel::matrix() const {
    const auto& q = quantum();
    const auto& p = q.partition;
    CMatrix h = CMatrix::Zero(p.dim(), p.dim());
    for (std::size_t i = 0; i < p.dim(); ++i) h(i, i) = p.classValue[p.classOf[i]];
    if (q.basis.size() == 0) return h;
    return q.basis * h * q.basis.adjoint();
}

HamiltonianModel classical_harmonic(std::size_t d, std::size_t r, std::vector<double> omega,
                                    double resonanceTol) {
    if (d < 1) throw ValidationError("classical model needs d >= 1");
    if (omega.size() != r) throw ValidationError("Omega length must equal r");
    double nrm = 0.0;
    bool integral = true;
    for (double w : omega) {
        if (!std::isfinite(w)) throw ValidationError("non-finite frequency");
        nrm += w * w;
        integral = integral && w == std::round(w);
    }
    nrm = std::sqrt(nrm);
    if (r > 0 && nrm == 0.0) throw ValidationError("Omega must be nonzero");
    ClassicalHarmonic c{d, r, std::move(omega), 0.0};
    if (resonanceTol >= 0.0) c.resonanceTol = resonanceTol;
    else c.resonanceTol = integral ? 0.0 : 1e-12 * nrm;
    return HamiltonianModel{c};
}

HamiltonianModel quantum_diagonal(const std::vector<double>& h, double gapTol, double hbar) {
    return quantum_diagonal(SpectralPartition::build(h, gapTol), hbar);
}

HamiltonianModel quantum_diagonal(SpectralPartition p, double hbar, CMatrix basis) {
    if (!(hbar > 0.0)) throw ValidationError("hbar must be positive");
    if (basis.size() != 0) {
        if (basis.rows() != static_cast<Eigen::Index>(p.dim()) || basis.cols() != basis.rows())
            throw ValidationError("basis does not match partition dimension");
        if (!(basis.adjoint() * basis).isIdentity(1e-10)) throw ValidationError("basis is not unitary");
    }
    return HamiltonianModel{QuantumDiagonal{std::move(p), hbar, std::move(basis)}};
}

double weight_value(const WeightFunction& g, int from, int to) {
    if (std::holds_alternative<UniformWeight>(g)) return 1.0;
    if (auto* pw = std::get_if<ProductWeight>(&g)) return pw->phi.at(from) * pw->phi.at(to);
    return std::get<TableWeight>(g).table.at(from).at(to);
}

namespace {

void require_weight(const WeightFunction& g, std::size_t nclasses) {
    if (auto* pw = std::get_if<ProductWeight>(&g)) {
        if (pw->phi.size() != nclasses) throw ValidationError("product weight needs one phi per spectral class");
        for (double x : pw->phi)
            if (!(x > 0.0)) throw ValidationError("weights must be positive");
    } else if (auto* tw = std::get_if<TableWeight>(&g)) {
        if (tw->table.size() != nclasses) throw ValidationError("weight table size mismatch");
        for (const auto& row : tw->table) {
            if (row.size() != nclasses) throw ValidationError("weight table size mismatch");
            for (double x : row)
                if (!(x > 0.0)) throw ValidationError("weights must be positive");
        }
    }
}

enum class Op { Liouville, Gamma, Resonant, Nonresonant };

MatrixObservable apply_quantum(const HamiltonianModel& H, const MatrixObservable& v, Op op) {
    const auto& q = H.quantum();
    const auto& p = q.partition;
    if (static_cast<std::size_t>(v.dim()) != p.dim())
        throw ValidationError("observable dimension does not match Hamiltonian");
    const bool rotated = q.basis.size() != 0;
    CMatrix x = rotated ? CMatrix(q.basis.adjoint() * v.a * q.basis) : v.a;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const int ci = p.classOf[i], cj = p.classOf[j];
            const double w = (p.classValue[ci] - p.classValue[cj]) / q.hbar;
            switch (op) {
            case Op::Liouville: x(i, j) *= cplx(0.0, w); break;
            case Op::Gamma: x(i, j) = ci == cj ? cplx(0.0) : x(i, j) / cplx(0.0, w); break;
            case Op::Resonant: if (ci != cj) x(i, j) = 0.0; break;
            case Op::Nonresonant: if (ci == cj) x(i, j) = 0.0; break;
            }
        }
    }
    if (rotated) x = q.basis * x * q.basis.adjoint();
    return MatrixObservable(x);
}

double omega_dot(const ClassicalHarmonic& H, const WaveVector& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < H.r; ++i) s += H.omega[i] * w.k[i];
    return s;
}

WaveObservable apply_classical(const HamiltonianModel& H, const WaveObservable& v, Op op) {
    const auto& c = H.classical();
    require_kind(H, v);
    WaveObservable::Terms t;
    for (const auto& [w, a] : v.terms()) {
        const double f = omega_dot(c, w);
        const bool res = std::abs(f) <= c.resonanceTol;
        switch (op) {
        case Op::Liouville: t[w] = cplx(0.0, f) * a; break;
        case Op::Gamma: if (!res) t[w] = a / cplx(0.0, f); break;
        case Op::Resonant: if (res) t[w] = a; break;
        case Op::Nonresonant: if (!res) t[w] = a; break;
        }
    }
    return WaveObservable(v.d(), v.r(), t);
}

} // namespace

void require_kind(const HamiltonianModel& H, const WaveObservable& v) {
    if (!H.is_classical()) throw ValidationError("wave observable used with a quantum Hamiltonian");
    const auto& c = std::get<ClassicalHarmonic>(H.model);
    if (c.d != v.d() || c.r != v.r()) throw ValidationError("observable (d, r) does not match Hamiltonian");
}

void require_kind(const HamiltonianModel& H, const MatrixObservable& v) {
    if (!H.is_quantum()) throw ValidationError("matrix observable used with a classical Hamiltonian");
    if (static_cast<std::size_t>(v.dim()) != std::get<QuantumDiagonal>(H.model).partition.dim())
        throw ValidationError("observable dimension does not match Hamiltonian");
}

bool is_resonant_wave(const ClassicalHarmonic& H, const WaveVector& w) {
    return std::abs(omega_dot(H, w)) <= H.resonanceTol;
}

MatrixObservable liouville(const HamiltonianModel& H, const MatrixObservable& v) {
    require_kind(H, v);
    return apply_quantum(H, v, Op::Liouville);
}
WaveObservable liouville(const HamiltonianModel& H, const WaveObservable& v) {
    return apply_classical(H, v, Op::Liouville);
}
MatrixObservable gamma(const HamiltonianModel& H, const MatrixObservable& v) {
    require_kind(H, v);
    return apply_quantum(H, v, Op::Gamma);
}
WaveObservable gamma(const HamiltonianModel& H, const WaveObservable& v) {
    return apply_classical(H, v, Op::Gamma);
}
MatrixObservable resonant(const HamiltonianModel& H, const MatrixObservable& v) {
    require_kind(H, v);
    return apply_quantum(H, v, Op::Resonant);
}
WaveObservable resonant(const HamiltonianModel& H, const WaveObservable& v) {
    return apply_classical(H, v, Op::Resonant);
}
MatrixObservable nonresonant(const HamiltonianModel& H, const MatrixObservable& v) {
    require_kind(H, v);
    return apply_quantum(H, v, Op::Nonresonant);
}
WaveObservable nonresonant(const HamiltonianModel& H, const WaveObservable& v) {
    return apply_classical(H, v, Op::Nonresonant);
}

namespace {

template <class Obs>
PseudoInverseReport pseudoinverse_residuals(const HamiltonianModel& H, const std::vector<Obs>& samples) {
    if (samples.empty()) throw ValidationError("empty sample basis");
    PseudoInverseReport rep;
    for (const auto& x : samples) {
        require_kind(H, x);
        const Obs lx = liouville(H, x);
        const Obs gx = gamma(H, x);
        const Obs lgx = liouville(H, gx);
        const double scale = std::max({tail_norm(x), tail_norm(lx), tail_norm(gx),
                                       std::numeric_limits<double>::min()});
        rep.hhg = std::max(rep.hhg, tail_norm(liouville(H, lgx) - lx) / scale);
        rep.hgh = std::max(rep.hgh, tail_norm(liouville(H, gamma(H, lx)) - lx) / scale);
        rep.ghg = std::max(rep.ghg, tail_norm(gamma(H, lgx) - gx) / scale);
        rep.commute = std::max(rep.commute, tail_norm(lgx - gamma(H, lx)) / scale);
    }
    rep.passes = rep.hhg <= rep.tolerance && rep.hgh <= rep.tolerance && rep.ghg <= rep.tolerance &&
                 rep.commute <= rep.tolerance;
    return rep;
}

} // namespace

PseudoInverseReport check_pseudoinverse(const HamiltonianModel& H,
                                        const std::vector<MatrixObservable>& samples) {
    return pseudoinverse_residuals(H, samples);
}

PseudoInverseReport check_pseudoinverse(const HamiltonianModel& H,
                                        const std::vector<WaveObservable>& samples) {
    return pseudoinverse_residuals(H, samples);
}

NonresonanceReport is_nonresonant(const HamiltonianModel& H, int cutoff) {
    if (cutoff < 1) throw ValidationError("cutoff must be >= 1");
    NonresonanceReport rep;
    if (H.is_classical()) {
        const auto& c = H.classical();
        if (c.r == 0) {
            rep.detail = "no time channels";
            return rep;
        }
        std::vector<int> k(c.r, -cutoff);
        WaveVector w{std::vector<double>(c.d, 0.0), std::vector<double>(c.d, 0.0), {}};
        while (true) {
            w.k = k;
            if (!w.is_zero() && w.is_canonical() && is_resonant_wave(c, w)) {
                rep.nonresonant = false;
                rep.witness = k;
                std::ostringstream os;
                os << "Omega.k = " << omega_dot(c, w) << " within tolerance " << c.resonanceTol;
                rep.detail = os.str();
                return rep;
            }
            std::size_t i = c.r;
            while (i > 0 && k[i - 1] == cutoff) k[--i] = -cutoff;
            if (i == 0) break;
            ++k[i - 1];
        }
        rep.detail = "no resonant k up to cutoff";
        return rep;
    }

    const auto& p = H.quantum().partition;
    if (p.floquet) {
        const auto& hc = p.floquet->hcore;
        const double tol = std::max(p.gapTol, 1e-12);
        for (std::size_t a = 0; a < hc.size(); ++a) {
            for (std::size_t b = 0; b < hc.size(); ++b) {
                if (a == b) continue;
                const double gap = hc[a] - hc[b];
                const double nearest = std::round(gap);
                if (nearest != 0.0 && std::abs(gap - nearest) <= tol) {
                    rep.nonresonant = false;
                    rep.witness = {static_cast<int>(a), static_cast<int>(b)};
                    rep.detail = "core gap h(A) - h(B) is a nonzero integer";
                    return rep;
                }
            }
        }
        rep.detail = "core gaps avoid nonzero integers";
        return rep;
    }

    const int nc = static_cast<int>(p.num_classes());
    const double tol = std::max(p.gapTol, 1e-12);
    struct Gap { double g; int a, b; };
    std::vector<Gap> gaps;
    for (int a = 0; a < nc; ++a)
        for (int b = 0; b < nc; ++b)
            if (a != b) gaps.push_back({p.classValue[a] - p.classValue[b], a, b});
    std::sort(gaps.begin(), gaps.end(), [](const Gap& x, const Gap& y) { return x.g < y.g; });
    for (std::size_t i = 1; i < gaps.size(); ++i) {
        if (gaps[i].g - gaps[i - 1].g <= tol) {
            rep.nonresonant = false;
            rep.witness = {gaps[i - 1].a, gaps[i - 1].b, gaps[i].a, gaps[i].b};
            rep.detail = "two distinct class pairs share a spectral gap";
            return rep;
        }
    }
    rep.detail = "all spectral gaps are distinct";
    return rep;
}

double norm(const HamiltonianModel& H, const MatrixObservable& v, const WeightFunction& g) {
    require_kind(H, v);
    const auto& q = H.quantum();
    const auto& p = q.partition;
    require_weight(g, p.num_classes());
    MatrixObservable x = q.basis.size() == 0 ? v : MatrixObservable(q.basis.adjoint() * v.a * q.basis);
    std::vector<double> colsum(p.num_classes(), 0.0);
    for (const auto& b : block_decompose(x, p))
        colsum[b.from] += spectral_norm(b.block) / weight_value(g, b.from, b.to);
    return *std::max_element(colsum.begin(), colsum.end());
}

double norm(const HamiltonianModel& H, const WaveObservable& v, const WeightFunction& g) {
    require_kind(H, v);
    if (!std::holds_alternative<UniformWeight>(g))
        throw ValidationError("wave observables support only the uniform weight");
    return l1_norm(v);
}

WaveBand WaveBand::box(std::size_t d, std::size_t r, int nmax, int kmax) {
    if (nmax < 0 || kmax < 0) throw ValidationError("band bounds must be >= 0");
    WaveBand b;
    const std::size_t len = 2 * d + r;
    std::vector<int> idx(len);
    for (std::size_t i = 0; i < len; ++i) idx[i] = i < 2 * d ? -nmax : -kmax;
    while (true) {
        WaveVector w{std::vector<double>(d), std::vector<double>(d), std::vector<int>(r)};
        for (std::size_t i = 0; i < d; ++i) {
            w.n[i] = idx[i];
            w.m[i] = idx[d + i];
        }
        for (std::size_t j = 0; j < r; ++j) w.k[j] = idx[2 * d + j];
        b.vectors.push_back(w);
        std::size_t i = len;
        while (i > 0 && idx[i - 1] == (i - 1 < 2 * d ? nmax : kmax)) {
            idx[i - 1] = i - 1 < 2 * d ? -nmax : -kmax;
            --i;
        }
        if (i == 0) break;
        ++idx[i - 1];
    }
    return b;
}

WaveBand WaveBand::support(const WaveObservable& v) {
    WaveBand b;
    for (const auto& [w, c] : v.terms()) b.vectors.push_back(w);
    return b;
}

double psi(const SpectralPartition& p, const WeightFunction& g, int a, int b) {
    double s = 0.0;
    for (int c = 0; c < static_cast<int>(p.num_classes()); ++c) {
        const double x = weight_value(g, a, c), y = weight_value(g, b, c);
        s = std::max({s, x / y, y / x});
    }
    return weight_value(g, a, b) * s;
}

double gamma_opnorm_bound(const HamiltonianModel& H, const WeightFunction& g) {
    const auto& p = H.quantum().partition;
    require_weight(g, p.num_classes());
    double s = 0.0;
    const int nc = static_cast<int>(p.num_classes());
    for (int a = 0; a < nc; ++a)
        for (int b = 0; b < nc; ++b)
            if (a != b) s = std::max(s, psi(p, g, a, b) / std::abs(p.classValue[a] - p.classValue[b]));
    return s;
}

double gamma_opnorm_bound(const HamiltonianModel& H, const WaveBand& band, const WeightFunction& g) {
    const auto& c = H.classical();
    if (!std::holds_alternative<UniformWeight>(g))
        throw ValidationError("wave observables support only the uniform weight");
    if (band.vectors.empty()) throw ValidationError("empty band");
    double s = 0.0;
    bool any = false;
    for (const auto& a : band.vectors) {
        if (a.n.size() != c.d || a.k.size() != c.r) throw ValidationError("band dimension mismatch");
        if (is_resonant_wave(c, a)) continue;
        any = true;
        const double f = std::abs(omega_dot(c, a));
        for (const auto& b : band.vectors) s = std::max(s, std::abs(symplectic(a, b)) / f);
    }
    if (!any) throw ValidationError("band contains only resonant wavevectors");
    return s;
}

double diophantine_margin(const SpectralPartition& p, const WeightFunction& g) {
    if (p.num_classes() < 2) throw ValidationError("need at least two spectral classes");
    require_weight(g, p.num_classes());
    double m = std::numeric_limits<double>::infinity();
    const int nc = static_cast<int>(p.num_classes());
    for (int a = 0; a < nc; ++a)
        for (int b = 0; b < nc; ++b)
            if (a != b) m = std::min(m, std::abs(p.classValue[a] - p.classValue[b]) / psi(p, g, a, b));
    return m;
}

} // namespace hamctl
