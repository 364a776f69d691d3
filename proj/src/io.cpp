#include "hamctl/io.hpp"
#include "hamctl/errors.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace hamctl {

namespace {

template <class T>
T get_field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad field '") + key + "': " + e.what());
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? get_field<T>(j, key) : fallback;
}

std::string kind_of(const json& j) {
    if (!j.is_object()) throw ValidationError("expected a JSON object");
    return get_field<std::string>(j, "kind");
}

double finite(double x, const char* what) {
    if (!std::isfinite(x)) throw ValidationError(std::string(what) + " must be finite");
    return x;
}

json complex_matrix(const CMatrix& a) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < a.cols(); ++k) row.push_back({a(i, k).real(), a(i, k).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

CMatrix read_complex_matrix(const json& j) {
    if (!j.is_array() || j.empty()) throw ValidationError("matrix must be a non-empty array of rows");
    const auto D = static_cast<Eigen::Index>(j.size());
    CMatrix a(D, D);
    for (Eigen::Index i = 0; i < D; ++i) {
        const auto& row = j[i];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != D) throw ValidationError("matrix must be square");
        for (Eigen::Index k = 0; k < D; ++k) {
            const auto& e = row[k];
            if (e.is_number()) {
                a(i, k) = cplx(finite(e.get<double>(), "matrix entry"), 0.0);
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                a(i, k) = cplx(finite(e[0].get<double>(), "matrix entry"), finite(e[1].get<double>(), "matrix entry"));
            } else {
                throw ValidationError("matrix entries must be numbers or [re, im] pairs");
            }
        }
    }
    return a;
}

} // namespace

json to_json(const WaveObservable& v) {
    json terms = json::array();
    for (const auto& [w, c] : v.terms()) {
        terms.push_back({{"n", w.n}, {"m", w.m}, {"k", w.k}, {"re", c.real()}, {"im", c.imag()}});
    }
    return {{"kind", "classical-waves"}, {"d", v.d()}, {"r", v.r()}, {"terms", terms}};
}

json to_json(const MatrixObservable& v) { return {{"kind", "quantum-matrix"}, {"V", complex_matrix(v.a)}}; }

json to_json(const HamiltonianModel& H) {
    if (H.is_classical()) {
        const auto& c = H.classical();
        return {{"kind", "classical"}, {"d", c.d}, {"r", c.r}, {"omega", c.omega}, {"resonanceTol", c.resonanceTol}};
    }
    const auto& q = H.quantum();
    json j = {{"kind", "quantum"}, {"h", q.partition.eigenvalues}, {"gapTol", q.partition.gapTol}, {"hbar", q.hbar}};
    if (q.partition.floquet) j["floquet"] = {{"hcore", q.partition.floquet->hcore}, {"kmax", q.partition.floquet->kmax}};
    if (q.basis.size()) j["basis"] = complex_matrix(q.basis);
    return j;
}

json to_json(const WeightFunction& g) {
    if (std::holds_alternative<UniformWeight>(g)) return {{"kind", "uniform"}};
    if (const auto* p = std::get_if<ProductWeight>(&g)) return {{"kind", "product"}, {"phi", p->phi}};
    return {{"kind", "table"}, {"table", std::get<TableWeight>(g).table}};
}

json to_json(const SeriesPolicy& p) {
    return {{"maxOrder", p.maxOrder},
            {"tailTol", p.tailTol},
            {"gammaBound", p.gammaBound},
            {"relativeTail", p.relativeTail}};
}

WaveObservable wave_from_json(const json& j) {
    if (kind_of(j) != "classical-waves") throw ValidationError("expected kind 'classical-waves'");
    const auto d = get_field<std::size_t>(j, "d");
    const auto r = get_field<std::size_t>(j, "r");
    if (d < 1) throw ValidationError("d must be >= 1");
    WaveObservable::Terms terms;
    const auto& arr = j.contains("terms") ? j.at("terms") : json::array();
    if (!arr.is_array()) throw ValidationError("terms must be an array");
    for (const auto& t : arr) {
        WaveVector w{get_field<std::vector<double>>(t, "n"), get_field<std::vector<double>>(t, "m"),
                     get_field<std::vector<int>>(t, "k")};
        if (w.n.size() != d || w.m.size() != d || w.k.size() != r)
            throw ValidationError("wavevector dimension does not match d, r");
        for (double x : w.n) finite(x, "n");
        for (double x : w.m) finite(x, "m");
        const cplx c(finite(get_or<double>(t, "re", 0.0), "re"), finite(get_or<double>(t, "im", 0.0), "im"));
        if (terms.count(w)) throw ValidationError("duplicate wavevector in terms");
        terms[w] = c;
    }
    return WaveObservable(d, r, terms);
}

MatrixObservable matrix_from_json(const json& j) {
    if (!j.is_object() || !j.contains("V")) throw ValidationError("missing field 'V'");
    MatrixObservable v{read_complex_matrix(j.at("V"))};
    const double s = std::max(1.0, v.a.norm());
    if ((v.a - v.a.adjoint()).norm() > 1e-12 * s) throw ValidationError("V must be Hermitian");
    v.a = 0.5 * (v.a + v.a.adjoint());
    return v;
}

HamiltonianModel hamiltonian_from_json(const json& j) {
    const auto kind = kind_of(j);
    if (kind == "classical") {
        const auto d = get_field<std::size_t>(j, "d");
        const auto r = get_field<std::size_t>(j, "r");
        auto omega = get_field<std::vector<double>>(j, "omega");
        for (double x : omega) finite(x, "omega");
        return classical_harmonic(d, r, omega, get_or<double>(j, "resonanceTol", -1.0));
    }
    if (kind == "quantum") {
        const double hbar = get_or<double>(j, "hbar", 1.0);
        if (!(hbar > 0.0)) throw ValidationError("hbar must be positive");
        if (j.contains("floquet")) {
            const auto& f = j.at("floquet");
            auto p = floquet_hamiltonian(get_field<std::vector<double>>(f, "hcore"), get_field<int>(f, "kmax"));
            return quantum_diagonal(std::move(p), hbar);
        }
        auto h = get_field<std::vector<double>>(j, "h");
        for (double x : h) finite(x, "h");
        return quantum_diagonal(h, get_or<double>(j, "gapTol", -1.0), hbar);
    }
    throw ValidationError("unknown Hamiltonian kind '" + kind + "'");
}

WeightFunction weight_from_json(const json& j) {
    const auto kind = kind_of(j);
    if (kind == "uniform") return UniformWeight{};
    if (kind == "product") {
        auto phi = get_field<std::vector<double>>(j, "phi");
        for (double x : phi)
            if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError("weights must be positive");
        return ProductWeight{phi};
    }
    if (kind == "table") {
        auto t = get_field<std::vector<std::vector<double>>>(j, "table");
        for (const auto& row : t) {
            if (row.size() != t.size()) throw ValidationError("weight table must be square");
            for (double x : row)
                if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError("weights must be positive");
        }
        return TableWeight{t};
    }
    throw ValidationError("unknown weight kind '" + kind + "'");
}

AnyObservable observable_from_json(const json& j) {
    const auto kind = kind_of(j);
    if (kind == "classical-waves") return wave_from_json(j);
    if (kind == "quantum" || kind == "quantum-matrix") return matrix_from_json(j);
    throw ValidationError("unknown observable kind '" + kind + "'");
}

TimeSampledObservable time_series_from_json(const json& j) {
    const json* list = &j;
    if (j.is_object()) {
        if (!j.contains("samples")) throw ValidationError("time series object needs 'samples'");
        list = &j.at("samples");
    }
    if (!list->is_array()) throw ValidationError("time series must be a list of {t, V} records");
    TimeSampledObservable ts;
    for (const auto& rec : *list) {
        ts.times.push_back(finite(get_field<double>(rec, "t"), "t"));
        ts.values.push_back(matrix_from_json(rec));
    }
    ts.validate();
    return ts;
}

template <class Obs>
json to_json(const ControlReport<Obs>& r) {
    json terms = json::array();
    for (std::size_t i = 0; i < r.terms.size(); ++i) terms.push_back({{"order", i + 2}, {"norm", r.termNorms[i]}});
    return {{"report", "control"},
            {"policy", to_json(r.policy)},
            {"ordersUsed", r.ordersUsed},
            {"tailBound", r.tailBound},
            {"fBound", r.fBound},
            {"terms", terms},
            {"f", to_json(r.f)},
            {"F", to_json(r.F)}};
}

template <class Obs>
json to_json(const InversionReport<Obs>& r) {
    return {{"report", "inversion"},
            {"method", r.method},
            {"iterations", r.iterations},
            {"residual", r.residual},
            {"normV", r.normV},
            {"normW", r.normW},
            {"ratio", r.ratio},
            {"contractionBound", r.contractionBound},
            {"stepNorms", r.stepNorms},
            {"W", to_json(r.W)}};
}

template json to_json(const ControlReport<WaveObservable>&);
template json to_json(const ControlReport<MatrixObservable>&);
template json to_json(const InversionReport<WaveObservable>&);
template json to_json(const InversionReport<MatrixObservable>&);

json to_json(const InverseRatioCertificate& c) {
    return {{"report", "certificate"},
            {"bound", c.bound},
            {"normV", c.normV},
            {"threshold", c.threshold},
            {"withinThreshold", c.withinThreshold},
            {"ratioLow", c.ratioLow},
            {"ratioHigh", c.ratioHigh},
            {"sharpLow", c.sharpLow},
            {"sharpHigh", c.sharpHigh},
            {"measuredRatio", c.measuredRatio},
            {"passes", c.passes},
            {"sharpPasses", c.sharpPasses}};
}

json to_json(const LambdaReport& r) {
    return {{"x", r.x}, {"series", r.seriesValue}, {"newton", r.newtonValue}, {"termsUsed", r.termsUsed}};
}

json to_json(const ConjugationReport& r) {
    return {{"report", "conjugation-classical"},
            {"maxDeviation", r.maxDeviation},
            {"perSample", r.perSample},
            {"times", r.times}};
}

json to_json(const QuantumConjugationReport& r) {
    return {{"report", "conjugation-quantum"},
            {"generatorResidual", r.generator},
            {"commutator", r.commutator},
            {"times", r.times},
            {"flowResidual", r.flow},
            {"W", to_json(r.W)}};
}

json to_json(const AdiabaticChain& c) {
    json levels = json::array();
    for (const auto& l : c.levels) {
        levels.push_back({{"derivativeError", l.derivativeError},
                          {"normV", l.normV},
                          {"normW", l.normW},
                          {"normVdot", l.normVdot},
                          {"normGammaWdot", l.normGammaWdot},
                          {"normV1", l.normV1}});
    }
    return {{"report", "adiabatic"},
            {"stoppedEarly", c.stoppedEarly},
            {"optimalLevel", c.optimalLevel},
            {"supNorms", c.supNorms},
            {"levels", levels}};
}

namespace {
std::string num(double x) {
    std::ostringstream s;
    s << std::setprecision(17) << x;
    return s.str();
}
} // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    if (tr.points.empty()) throw ValidationError("empty trajectory");
    const auto& x0 = tr.points.front();
    os << "t";
    for (std::size_t i = 1; i <= x0.q.size(); ++i) os << ",q" << i;
    for (std::size_t i = 1; i <= x0.p.size(); ++i) os << ",p" << i;
    for (std::size_t i = 1; i <= x0.tau.size(); ++i) os << ",tau" << i;
    os << "\n";
    for (std::size_t s = 0; s < tr.points.size(); ++s) {
        const auto& x = tr.points[s];
        os << num(tr.times[s]);
        for (double v : x.q) os << "," << num(v);
        for (double v : x.p) os << "," << num(v);
        for (double v : x.tau) os << "," << num(v);
        os << "\n";
    }
}

void write_adiabatic_csv(std::ostream& os, const AdiabaticChain& c) {
    os << "level,t,normV,normW,normVdot,normV1\n";
    for (std::size_t k = 0; k < c.levels.size(); ++k) {
        const auto& l = c.levels[k];
        for (std::size_t i = 0; i < l.times.size(); ++i) {
            os << k << "," << num(l.times[i]) << "," << num(l.normV[i]) << "," << num(l.normW[i]) << ","
               << num(l.normVdot[i]) << "," << num(l.normV1[i]) << "\n";
        }
    }
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("malformed JSON in " + path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << j.dump(2) << "\n";
}

} // namespace hamctl
