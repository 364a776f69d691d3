#include "hamctl/wave.hpp"
#include "hamctl/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hamctl {

namespace {

void require_dims(const WaveObservable& a, const WaveObservable& b) {
    if (a.d() != b.d() || a.r() != b.r())
        throw ValidationError("wave observables have different (d, r)");
}

void require_point(const WaveObservable& v, const PhasePoint& x) {
    if (x.q.size() != v.d() || x.p.size() != v.d() || x.tau.size() != v.r())
        throw ValidationError("phase point dimensions do not match observable");
}

} // namespace

WaveVector WaveVector::operator-() const {
    WaveVector o = *this;
    for (auto& x : o.n) x = 0.0 - x;
    for (auto& x : o.m) x = 0.0 - x;
    for (auto& x : o.k) x = -x;
    return o;
}

WaveVector WaveVector::operator+(const WaveVector& o) const {
    WaveVector s = *this;
    for (std::size_t i = 0; i < n.size(); ++i) s.n[i] = n[i] + o.n[i] + 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) s.m[i] = m[i] + o.m[i] + 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) s.k[i] = k[i] + o.k[i];
    return s;
}

WaveVector WaveVector::operator-(const WaveVector& o) const { return *this + (-o); }

bool WaveVector::is_zero() const {
    return std::all_of(n.begin(), n.end(), [](double x) { return x == 0.0; }) &&
           std::all_of(m.begin(), m.end(), [](double x) { return x == 0.0; }) &&
           std::all_of(k.begin(), k.end(), [](int x) { return x == 0; });
}

bool WaveVector::is_canonical() const {
    for (int x : k)
        if (x != 0) return x > 0;
    for (double x : n)
        if (x != 0.0) return x > 0.0;
    for (double x : m)
        if (x != 0.0) return x > 0.0;
    return true;
}

double symplectic(const WaveVector& a, const WaveVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.n.size(); ++i) s += a.n[i] * b.m[i] - a.m[i] * b.n[i];
    return s;
}

WaveObservable::WaveObservable(std::size_t d, std::size_t r) : d_(d), r_(r) {
    if (d < 1) throw ValidationError("wave algebra needs d >= 1");
}

WaveObservable::WaveObservable(std::size_t d, std::size_t r, const Terms& terms)
    : WaveObservable(d, r) {
    for (const auto& [w, c] : terms) {
        if (w.n.size() != d || w.m.size() != d || w.k.size() != r)
            throw ValidationError("wavevector length does not match (d, r)");
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw ValidationError("non-finite wave amplitude");
    }
    terms_ = terms;
    for (const auto& [w, c] : terms) {
        auto mw = -w;
        if (!terms.count(mw)) terms_[mw] = std::conj(c);
    }
    finalize();
}

void WaveObservable::finalize() {
    Terms out;
    double amax = 0.0;
    for (const auto& [w, c] : terms_) amax = std::max(amax, std::abs(c));
    const double cut = kPruneRelative * amax;
    for (const auto& [w, c] : terms_) {
        if (!w.is_canonical()) continue;
        if (w.is_zero()) {
            if (std::abs(c.real()) >= cut && c.real() != 0.0) out[w] = cplx(c.real(), 0.0);
            continue;
        }
        auto mw = -w;
        auto it = terms_.find(mw);
        cplx partner = it == terms_.end() ? cplx(0.0) : std::conj(it->second);
        cplx avg = it == terms_.end() ? c : 0.5 * (c + partner);
        if (std::abs(avg) < cut || avg == cplx(0.0)) continue;
        out[w] = avg;
        out[mw] = std::conj(avg);
    }
    // partners present only on the non-canonical side
    for (const auto& [w, c] : terms_) {
        if (w.is_canonical()) continue;
        auto mw = -w;
        if (terms_.count(mw)) continue;
        if (std::abs(c) < cut || c == cplx(0.0)) continue;
        out[w] = c;
        out[mw] = std::conj(c);
    }
    terms_ = std::move(out);
}

WaveObservable WaveObservable::sine(std::size_t d, std::size_t r, const WaveVector& w, double amp) {
    if (w.is_zero()) return WaveObservable(d, r);
    Terms t;
    t[w] = cplx(0.0, -0.5 * amp);
    t[-w] = cplx(0.0, 0.5 * amp);
    return WaveObservable(d, r, t);
}

WaveObservable WaveObservable::cosine(std::size_t d, std::size_t r, const WaveVector& w, double amp) {
    Terms t;
    if (w.is_zero()) {
        t[w] = amp;
    } else {
        t[w] = 0.5 * amp;
        t[-w] = 0.5 * amp;
    }
    return WaveObservable(d, r, t);
}

WaveObservable WaveObservable::constant(std::size_t d, std::size_t r, double c) {
    WaveVector z{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0), std::vector<int>(r, 0)};
    Terms t;
    t[z] = c;
    return WaveObservable(d, r, t);
}

cplx WaveObservable::coefficient(const WaveVector& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? cplx(0.0) : it->second;
}

std::pair<double, double> WaveObservable::sin_cos(const WaveVector& w) const {
    cplx c = coefficient(w);
    if (w.is_zero()) return {0.0, c.real()};
    // c e^{ix} + conj(c) e^{-ix} = 2Re(c) cos x - 2Im(c) sin x
    return {-2.0 * c.imag(), 2.0 * c.real()};
}

double WaveObservable::max_amplitude() const {
    double a = 0.0;
    for (const auto& [w, c] : terms_) a = std::max(a, std::abs(c));
    return a;
}

WaveObservable wave_add(const WaveObservable& u, const WaveObservable& v) {
    require_dims(u, v);
    WaveObservable::Terms t = u.terms();
    for (const auto& [w, c] : v.terms()) t[w] += c;
    return WaveObservable(u.d(), u.r(), t);
}

WaveObservable wave_scale(double a, const WaveObservable& v) {
    WaveObservable::Terms t;
    if (a != 0.0)
        for (const auto& [w, c] : v.terms()) t[w] = a * c;
    return WaveObservable(v.d(), v.r(), t);
}

WaveObservable poisson_bracket(const WaveObservable& w, const WaveObservable& v) {
    require_dims(w, v);
    WaveObservable::Terms t;
    for (const auto& [a, ca] : w.terms()) {
        for (const auto& [b, cb] : v.terms()) {
            double s = symplectic(a, b);
            if (s == 0.0) continue;
            t[a + b] += s * ca * cb;
        }
    }
    return WaveObservable(w.d(), w.r(), t);
}

WaveObservable operator+(const WaveObservable& u, const WaveObservable& v) { return wave_add(u, v); }
WaveObservable operator-(const WaveObservable& u, const WaveObservable& v) {
    return wave_add(u, wave_scale(-1.0, v));
}
WaveObservable operator-(const WaveObservable& v) { return wave_scale(-1.0, v); }
WaveObservable operator*(double a, const WaveObservable& v) { return wave_scale(a, v); }

double l1_norm(const WaveObservable& v) {
    double s = 0.0;
    for (const auto& [w, c] : v.terms()) s += std::abs(c);
    return s;
}

PhasePoint make_point(std::size_t d, std::size_t r) {
    return PhasePoint{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0),
                      std::vector<double>(r, 0.0), std::vector<double>(r, 0.0)};
}

double evaluate(const WaveObservable& v, const PhasePoint& x) {
    require_point(v, x);
    return WaveEvaluator(v).value(x.q.data(), x.p.data(), x.tau.data());
}

WaveGradient gradient(const WaveObservable& v, const PhasePoint& x) {
    require_point(v, x);
    WaveGradient g{std::vector<double>(v.d()), std::vector<double>(v.d()), std::vector<double>(v.r())};
    WaveEvaluator(v).gradient(x.q.data(), x.p.data(), x.tau.data(), g.dq.data(), g.dp.data(),
                              g.dtau.data());
    return g;
}

WaveEvaluator::WaveEvaluator(const WaveObservable& v) : d_(v.d()), r_(v.r()) {
    for (const auto& [w, c] : v.terms()) {
        if (w.is_zero()) {
            constant_ = c.real();
            continue;
        }
        if (!w.is_canonical()) continue;
        n_.insert(n_.end(), w.n.begin(), w.n.end());
        m_.insert(m_.end(), w.m.begin(), w.m.end());
        for (int kk : w.k) k_.push_back(kk);
        c_.push_back(2.0 * c);
    }
}

double WaveEvaluator::value(const double* q, const double* p, const double* tau) const {
    double s = constant_;
    for (std::size_t j = 0; j < c_.size(); ++j) {
        double ph = 0.0;
        for (std::size_t i = 0; i < d_; ++i) ph += n_[j * d_ + i] * q[i] + m_[j * d_ + i] * p[i];
        for (std::size_t i = 0; i < r_; ++i) ph += k_[j * r_ + i] * tau[i];
        s += c_[j].real() * std::cos(ph) - c_[j].imag() * std::sin(ph);
    }
    return s;
}

void WaveEvaluator::gradient(const double* q, const double* p, const double* tau, double* dq,
                             double* dp, double* dtau) const {
    for (std::size_t i = 0; i < d_; ++i) dq[i] = dp[i] = 0.0;
    for (std::size_t i = 0; i < r_; ++i) dtau[i] = 0.0;
    for (std::size_t j = 0; j < c_.size(); ++j) {
        double ph = 0.0;
        for (std::size_t i = 0; i < d_; ++i) ph += n_[j * d_ + i] * q[i] + m_[j * d_ + i] * p[i];
        for (std::size_t i = 0; i < r_; ++i) ph += k_[j * r_ + i] * tau[i];
        // d/dx Re(c e^{i ph}) = Re(i c e^{i ph}) dph = -(Re c sin + Im c cos) dph
        double s = std::sin(ph), co = std::cos(ph);
        double f = -(c_[j].real() * s + c_[j].imag() * co);
        for (std::size_t i = 0; i < d_; ++i) {
            dq[i] += f * n_[j * d_ + i];
            dp[i] += f * m_[j * d_ + i];
        }
        for (std::size_t i = 0; i < r_; ++i) dtau[i] += f * k_[j * r_ + i];
    }
}

int PolynomialScalar::degree() const {
    int deg = -1;
    for (const auto& [e, c] : coeffs) {
        if (c == 0.0) continue;
        int s = 0;
        for (int x : e) s += x;
        deg = std::max(deg, s);
    }
    return deg;
}

double PolynomialScalar::operator()(const std::vector<double>& a) const {
    double s = 0.0;
    for (const auto& [e, c] : coeffs) {
        double t = c;
        for (std::size_t i = 0; i < e.size(); ++i) t *= std::pow(a[i], e[i]);
        s += t;
    }
    return s;
}

namespace {

double binom(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

// coefficients of h(A0 + a) as a polynomial in a
std::map<std::vector<int>, double> shifted(const PolynomialScalar& h, const std::vector<double>& A0) {
    std::map<std::vector<int>, double> out;
    for (const auto& [beta, c] : h.coeffs) {
        std::vector<int> alpha(beta.size(), 0);
        // odometer over 0 <= alpha <= beta
        while (true) {
            double t = c;
            for (std::size_t i = 0; i < beta.size(); ++i)
                t *= binom(beta[i], alpha[i]) * std::pow(A0[i], beta[i] - alpha[i]);
            out[alpha] += t;
            std::size_t i = 0;
            while (i < beta.size() && alpha[i] == beta[i]) alpha[i++] = 0;
            if (i == beta.size()) break;
            ++alpha[i];
        }
    }
    return out;
}

} // namespace

LocalizationReport localize(const PolynomialScalar& h, const std::vector<double>& A0,
                            const WaveObservable& V, double normOfV) {
    if (A0.size() != h.vars) throw ValidationError("A0 length does not match polynomial");
    for (const auto& [e, c] : h.coeffs)
        if (e.size() != h.vars) throw ValidationError("exponent length does not match polynomial");
    if (V.d() != 0 && V.d() != h.vars)
        throw ValidationError("perturbation dimension does not match action variables");
    if (h.degree() < 1) throw ValidationError("h has no frequency (degree 0)");
    if (!(normOfV > 0.0)) throw ValidationError("normOfV must be positive");

    LocalizationReport rep;
    rep.epsilon = std::sqrt(normOfV);
    rep.omega.assign(h.vars, 0.0);
    for (const auto& [alpha, c] : shifted(h, A0)) {
        int deg = 0;
        for (int x : alpha) deg += x;
        if (deg == 1) {
            for (std::size_t i = 0; i < alpha.size(); ++i)
                if (alpha[i] == 1) rep.omega[i] += c;
        } else if (deg >= 2) {
            rep.quadratic_remainder_bound += std::abs(c) * std::pow(rep.epsilon, deg - 2);
        }
    }
    return rep;
}

} // namespace hamctl
