#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <vector>

namespace hamctl {

using cplx = std::complex<double>;

/// Wavevector (n, m, k) of e^{i(n.q + m.p + k.tau)}.
struct WaveVector {
    std::vector<double> n;
    std::vector<double> m;
    std::vector<int> k;

    auto operator<=>(const WaveVector&) const = default;
    bool operator==(const WaveVector&) const = default;

    WaveVector operator-() const;
    WaveVector operator+(const WaveVector& o) const;
    WaveVector operator-(const WaveVector& o) const;
    bool is_zero() const;
    // one representative of each +-pair: first nonzero of (k, n, m) positive
    bool is_canonical() const;
};

/// n(a).m(b) - m(a).n(b); the factor of e^{i(a+b).x} in {e^{ia.x}} e^{ib.x}.
double symplectic(const WaveVector& a, const WaveVector& b);

/// Real trigonometric polynomial in (q, p, tau), stored as complex exponentials.
/// Terms satisfy c(-D) = conj(c(D)) and tiny amplitudes are pruned.
class WaveObservable {
public:
    using Terms = std::map<WaveVector, cplx>;

    WaveObservable() = default;
    WaveObservable(std::size_t d, std::size_t r);
    /// Builds from raw terms; missing conjugate partners are completed and
    /// listed partners are averaged into exact Hermitian symmetry.
    WaveObservable(std::size_t d, std::size_t r, const Terms& terms);

    static WaveObservable sine(std::size_t d, std::size_t r, const WaveVector& w, double amp);
    static WaveObservable cosine(std::size_t d, std::size_t r, const WaveVector& w, double amp);
    static WaveObservable constant(std::size_t d, std::size_t r, double c);

    std::size_t d() const { return d_; }
    std::size_t r() const { return r_; }
    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }
    cplx coefficient(const WaveVector& w) const;
    /// Amplitude a of a.sin(w.x) + b.cos(w.x): returns {a, b}.
    std::pair<double, double> sin_cos(const WaveVector& w) const;
    double max_amplitude() const;

private:
    void finalize();
    std::size_t d_ = 0;
    std::size_t r_ = 0;
    Terms terms_;
};

/// Relative prune threshold applied after every operation.
inline constexpr double kPruneRelative = 1e-15;

WaveObservable wave_add(const WaveObservable& u, const WaveObservable& v);
WaveObservable wave_scale(double a, const WaveObservable& v);
WaveObservable poisson_bracket(const WaveObservable& w, const WaveObservable& v);

WaveObservable operator+(const WaveObservable& u, const WaveObservable& v);
WaveObservable operator-(const WaveObservable& u, const WaveObservable& v);
WaveObservable operator-(const WaveObservable& v);
WaveObservable operator*(double a, const WaveObservable& v);

/// Sum of |c(D)|: the uniform weighted norm of the wave algebra.
double l1_norm(const WaveObservable& v);

/// Extended phase point; E is carried along but observables never depend on it.
struct PhasePoint {
    std::vector<double> q;
    std::vector<double> p;
    std::vector<double> tau;
    std::vector<double> E;
};

PhasePoint make_point(std::size_t d, std::size_t r);

struct WaveGradient {
    std::vector<double> dq;
    std::vector<double> dp;
    std::vector<double> dtau;
};

double evaluate(const WaveObservable& v, const PhasePoint& x);
WaveGradient gradient(const WaveObservable& v, const PhasePoint& x);

/// Flattened half-spectrum copy of an observable for repeated evaluation.
class WaveEvaluator {
public:
    explicit WaveEvaluator(const WaveObservable& v);
    std::size_t d() const { return d_; }
    std::size_t r() const { return r_; }
    double value(const double* q, const double* p, const double* tau) const;
    /// Writes dV/dq, dV/dp, dV/dtau.
    void gradient(const double* q, const double* p, const double* tau,
                  double* dq, double* dp, double* dtau) const;

private:
    std::size_t d_, r_;
    double constant_ = 0.0;
    std::vector<double> n_, m_, k_;
    std::vector<cplx> c_; // doubled amplitudes of the canonical half
};

/// Multivariate real polynomial: exponent multi-index -> coefficient.
struct PolynomialScalar {
    std::size_t vars = 1;
    std::map<std::vector<int>, double> coeffs;
    int degree() const;
    double operator()(const std::vector<double>& a) const;
};

struct LocalizationReport {
    std::vector<double> omega;
    double epsilon = 0.0;
    double quadratic_remainder_bound = 0.0;
};

/// Frequency at A0, epsilon = ||V||^{1/2}, and sup over the unit box of
/// |q(eps A)|/eps^2 where q is the degree >= 2 part of h(A0 + a).
LocalizationReport localize(const PolynomialScalar& h, const std::vector<double>& A0,
                            const WaveObservable& V, double normOfV);

} // namespace hamctl
