// hamctl: command-line front end for the control pipelines.

#include "hamctl/errors.hpp"
#include "hamctl/io.hpp"
#include "hamctl/tokamak.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using namespace hamctl;

namespace {

struct Common {
    std::string out;
    unsigned long long seed = 12345;
    int maxOrder = 400;
    double tailTol = 1e-15;
    bool emitTerms = false;
};

SeriesPolicy policy_of(const Common& c) {
    SeriesPolicy p;
    p.maxOrder = c.maxOrder;
    p.tailTol = c.tailTol;
    if (p.maxOrder < 1) throw ValidationError("--max-order must be >= 1");
    if (!(p.tailTol > 0.0)) throw ValidationError("--tail-tol must be positive");
    return p;
}

void emit(const Common& c, const json& report) {
    if (c.out.empty()) {
        std::cout << report.dump(2) << "\n";
        return;
    }
    fs::create_directories(c.out);
    write_json_file((fs::path(c.out) / "report.json").string(), report);
}

template <class Obs>
void emit_terms(const Common& c, const std::vector<Obs>& terms, int firstOrder, const char* stem) {
    if (!c.emitTerms) return;
    if (c.out.empty()) throw ValidationError("--emit-terms needs --out");
    const fs::path dir = fs::path(c.out) / "terms";
    fs::create_directories(dir);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        write_json_file((dir / (stem + std::to_string(firstOrder + static_cast<int>(i)) + ".json")).string(),
                        to_json(terms[i]));
    }
}

json header(const char* command, const Common& c, const SeriesPolicy& p) {
    return {{"command", command}, {"seed", c.seed}, {"policy", to_json(p)}};
}

/// Operator bound for reporting; zero when V has no nonresonant part to act on.
double report_gamma_bound(const HamiltonianModel& H, const WaveObservable& V) {
    if (nonresonant(H, V).empty()) return 0.0;
    return gamma_opnorm_bound(H, WaveBand::support(V));
}
double report_gamma_bound(const HamiltonianModel& H, const MatrixObservable&) {
    return H.quantum().partition.num_classes() > 1 ? gamma_opnorm_bound(H) : 0.0;
}

std::vector<PhasePoint> seeded_points(std::size_t d, std::size_t r, int count, unsigned long long seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 2 * std::numbers::pi);
    std::vector<PhasePoint> pts;
    for (int s = 0; s < count; ++s) {
        PhasePoint x = make_point(d, r);
        for (auto& v : x.q) v = u(gen);
        for (auto& v : x.p) v = u(gen);
        pts.push_back(std::move(x));
    }
    return pts;
}

void write_trajectory(const Common& c, const Trajectory& tr) {
    if (c.out.empty()) return;
    fs::create_directories(c.out);
    std::ofstream os(fs::path(c.out) / "trajectory.csv");
    if (!os) throw ValidationError("cannot write trajectory.csv");
    write_trajectory_csv(os, tr);
}

std::map<std::string, double> key_values(const std::vector<std::string>& args) {
    std::map<std::string, double> kv;
    for (const auto& a : args) {
        const auto eq = a.find('=');
        if (eq == std::string::npos) throw ValidationError("expected key=value, got '" + a + "'");
        const auto key = a.substr(0, eq);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(a.substr(eq + 1), &used);
        } catch (const std::exception&) {
            throw ValidationError("bad number in '" + a + "'");
        }
        if (used != a.size() - eq - 1) throw ValidationError("bad number in '" + a + "'");
        kv[key] = v;
    }
    return kv;
}

double take(std::map<std::string, double>& kv, const std::string& key, double fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const double v = it->second;
    kv.erase(it);
    return v;
}

void reject_leftovers(const std::map<std::string, double>& kv) {
    if (!kv.empty()) throw ValidationError("unknown parameter '" + kv.begin()->first + "'");
}

// ---- subcommands ----

struct Inputs {
    std::string H, V;
};

int run_control(const Common& c, const Inputs& in) {
    const auto H = hamiltonian_from_json(read_json_file(in.H));
    const auto V = observable_from_json(read_json_file(in.V));
    auto p = policy_of(c);
    json rep = header("control", c, p);
    std::visit(
        [&](const auto& v) {
            require_kind(H, v);
            p.gammaBound = report_gamma_bound(H, v);
            const auto r = control_term(H, v, p);
            rep["control"] = to_json(r);
            emit_terms(c, r.terms, 2, "f");
        },
        V);
    emit(c, rep);
    return 0;
}

int run_invert(const Common& c, const Inputs& in, const std::string& method, double tol, int order) {
    const auto H = hamiltonian_from_json(read_json_file(in.H));
    const auto V = observable_from_json(read_json_file(in.V));
    auto p = policy_of(c);
    json rep = header("invert", c, p);
    std::visit(
        [&](const auto& v) {
            require_kind(H, v);
            p.gammaBound = report_gamma_bound(H, v);
            const double nv = norm(H, v);
            if (method == "fp") {
                const auto r = invert_fixed_point(H, v, p, tol * std::max(nv, 1e-300));
                rep["inversion"] = to_json(r);
            } else {
                const auto r = invert_series(H, v, order, p);
                rep["inversion"] = to_json(r);
                emit_terms(c, r.terms, 1, "W");
            }
        },
        V);
    rep["policy"] = to_json(p);
    emit(c, rep);
    return 0;
}

int run_verify(const Common& c, const Inputs& in, const std::string& mode, const ConjugationOptions& opt,
               int samples, double invTol) {
    const auto H = hamiltonian_from_json(read_json_file(in.H));
    const auto V = observable_from_json(read_json_file(in.V));
    const auto p = policy_of(c);
    json rep = header("verify", c, p);
    if (mode == "classical") {
        const auto* v = std::get_if<WaveObservable>(&V);
        if (!v) throw ValidationError("classical verification needs a wave observable");
        require_kind(H, *v);
        const auto f = control_term(H, *v, p);
        const auto pts = seeded_points(v->d(), v->r(), samples, c.seed);
        const auto r = verify_conjugation_classical(H, *v, f.f, pts, opt);
        rep["options"] = {{"T", opt.T}, {"tol", opt.tol}, {"gridPoints", opt.gridPoints}, {"samples", samples}};
        rep["controlTail"] = f.tailBound;
        rep["conjugation"] = to_json(r);
        write_trajectory(c, integrate_classical(H, *v + f.f, pts.front(), time_grid(opt.T, opt.gridPoints), opt.tol));
    } else {
        const auto* v = std::get_if<MatrixObservable>(&V);
        if (!v) throw ValidationError("quantum verification needs a matrix observable");
        require_kind(H, *v);
        const auto r = verify_conjugation_quantum(H, *v, p, time_grid(opt.T, opt.gridPoints), invTol);
        rep["conjugation"] = to_json(r);
    }
    emit(c, rep);
    return 0;
}

int run_tokamak(const Common& c, const std::vector<std::string>& twoWave, bool twoWaveSet,
                const std::vector<std::string>& spectrum, bool spectrumSet, bool verify, int samples,
                const ConjugationOptions& opt) {
    if (twoWaveSet == spectrumSet) throw ValidationError("give exactly one of --two-wave and --spectrum");
    const auto p = policy_of(c);
    const auto H = tokamak_model();
    json rep = header("tokamak", c, p);
    if (twoWaveSet) {
        auto kv = key_values(twoWave);
        TwoWaveParams P;
        P.epsilon = take(kv, "eps", P.epsilon);
        P.b = take(kv, "b", P.b);
        const double s = take(kv, "sigma", P.sigma);
        if (s != 1.0 && s != -1.0) throw ValidationError("sigma must be +1 or -1");
        P.sigma = static_cast<int>(s);
        P.n = take(kv, "n", P.n);
        P.m = take(kv, "m", P.m);
        reject_leftovers(kv);
        const auto V = two_wave_potential(P);
        const auto closed = closed_form_control(P);
        const auto series = control_term(H, V, p);
        const double diff = l1_norm(series.f - closed);
        rep["params"] = {{"eps", P.epsilon}, {"b", P.b}, {"sigma", P.sigma}, {"n", P.n}, {"m", P.m}};
        rep["epsilonHat"] = epsilon_hat(P);
        rep["epsilonTilde"] = epsilon_tilde(P);
        rep["V"] = to_json(V);
        rep["closedForm"] = to_json(closed);
        rep["series"] = to_json(series);
        rep["closedFormDeviation"] = {{"l1", diff}, {"relative", diff / l1_norm(series.f)},
                                      {"seriesWaves", series.f.size()}, {"closedFormWaves", closed.size()}};
        emit_terms(c, series.terms, 2, "f");
        if (verify) {
            const auto pts = seeded_points(1, 1, samples, c.seed);
            const auto r = verify_conjugation_classical(H, V, series.f, pts, opt);
            rep["options"] = {{"T", opt.T}, {"tol", opt.tol}, {"gridPoints", opt.gridPoints}, {"samples", samples}};
            rep["conjugation"] = to_json(r);
            write_trajectory(c, integrate_classical(H, V + series.f, pts.front(),
                                                    time_grid(opt.T, opt.gridPoints), opt.tol));
            emit(c, rep);
            if (!(r.maxDeviation <= 1e-5)) {
                std::cerr << "hamctl: conjugation deviation " << r.maxDeviation << " exceeds 1e-5\n";
                return 2;
            }
            return 0;
        }
    } else {
        auto kv = key_values(spectrum);
        SpectrumParams S;
        S.epsilon = take(kv, "eps", S.epsilon);
        const double N = take(kv, "N", S.N);
        if (N != std::floor(N)) throw ValidationError("N must be an integer");
        S.N = static_cast<int>(N);
        reject_leftovers(kv);
        const auto V = spectrum_potential(S);
        const auto series = control_term(H, V, p);
        rep["params"] = {{"eps", S.epsilon}, {"N", S.N}};
        rep["V"] = to_json(V);
        rep["series"] = to_json(series);
        emit_terms(c, series.terms, 2, "f");
    }
    emit(c, rep);
    return 0;
}

int run_adiabatic(const Common& c, const std::string& Hpath, const std::string& input, int depth,
                  const AdiabaticOptions& opt) {
    const auto H = hamiltonian_from_json(read_json_file(Hpath));
    if (!H.is_quantum()) throw ValidationError("adiabatic iteration needs a quantum Hamiltonian");
    const auto Vt = time_series_from_json(read_json_file(input));
    const auto p = policy_of(c);
    const auto chain = adiabatic_iterate(H, Vt, depth, p, opt);
    json rep = header("adiabatic", c, p);
    rep["depth"] = depth;
    rep["adiabatic"] = to_json(chain);
    std::ostringstream csv;
    write_adiabatic_csv(csv, chain);
    if (c.out.empty()) {
        std::cout << csv.str();
        return 0;
    }
    emit(c, rep);
    std::ofstream os(fs::path(c.out) / "norms.csv");
    if (!os) throw ValidationError("cannot write norms.csv");
    os << csv.str();
    return 0;
}

int run_bounds(const Common& c, const Inputs& in, const std::string& weightPath, int nmax, int kmax, int cutoff) {
    const auto H = hamiltonian_from_json(read_json_file(in.H));
    const auto V = observable_from_json(read_json_file(in.V));
    auto p = policy_of(c);
    json rep = header("bounds", c, p);
    const auto nr = is_nonresonant(H, cutoff);
    rep["nonresonance"] = {{"cutoff", cutoff}, {"nonresonant", nr.nonresonant}, {"witness", nr.witness},
                           {"detail", nr.detail}};
    if (const auto* v = std::get_if<MatrixObservable>(&V)) {
        require_kind(H, *v);
        const WeightFunction g = weightPath.empty() ? WeightFunction{UniformWeight{}}
                                                    : weight_from_json(read_json_file(weightPath));
        rep["weight"] = to_json(g);
        rep["normV"] = norm(H, *v, g);
        const auto& part = H.quantum().partition;
        if (part.num_classes() > 1) {
            rep["gammaBound"] = gamma_opnorm_bound(H, g);
            rep["diophantineMargin"] = diophantine_margin(part, g);
            rep["certificate"] = to_json(inverse_ratio_certificate(H, *v, g, p));
        } else {
            rep["gammaBound"] = 0.0;
        }
    } else {
        const auto& wv = std::get<WaveObservable>(V);
        require_kind(H, wv);
        if (!weightPath.empty()) {
            const auto g = weight_from_json(read_json_file(weightPath));
            if (!std::holds_alternative<UniformWeight>(g))
                throw ValidationError("wave observables support only the uniform weight");
        }
        const auto band = nmax >= 0 ? WaveBand::box(wv.d(), wv.r(), nmax, kmax) : WaveBand::support(wv);
        rep["band"] = nmax >= 0 ? json{{"nmax", nmax}, {"kmax", kmax}} : json("support");
        rep["normV"] = norm(H, wv);
        rep["gammaBound"] = gamma_opnorm_bound(H, band);
        rep["certificate"] = to_json(inverse_ratio_certificate(H, wv, band, p));
    }
    emit(c, rep);
    return 0;
}

int run_constants(bool gammaFlag, bool lambdaFlag, int points) {
    if (!gammaFlag && !lambdaFlag) throw ValidationError("constants needs --gamma or --lambda");
    if (gammaFlag) std::printf("%.16g\n", gamma_root());
    if (lambdaFlag) {
        if (points < 2) throw ValidationError("--points must be >= 2");
        const double e1 = std::exp(-1.0);
        std::printf("x,series,newton,terms\n");
        for (int i = 0; i < points; ++i) {
            const double x = i == 0 ? -e1 : i == points - 1 ? e1 : -e1 + 2 * e1 * i / (points - 1);
            const auto r = lambda_demo(x);
            std::printf("%.17g,%.17g,%.17g,%d\n", r.x, r.seriesValue, r.newtonValue, r.termsUsed);
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hamiltonian control and inversion toolkit"};
    app.require_subcommand(1);
    Common c;
    auto common = [&](CLI::App* s) {
        s->add_option("--out", c.out, "output directory (report.json, trajectory.csv, terms/*.json)");
        s->add_option("--seed", c.seed, "seed for sampled initial conditions");
        s->add_option("--max-order", c.maxOrder, "series order cap");
        s->add_option("--tail-tol", c.tailTol, "relative tail tolerance");
        s->add_flag("--emit-terms", c.emitTerms, "write per-order terms under terms/");
    };
    Inputs in;
    auto inputs = [&](CLI::App* s) {
        s->add_option("--H", in.H, "Hamiltonian JSON")->required()->check(CLI::ExistingFile);
        s->add_option("--V", in.V, "observable JSON")->required()->check(CLI::ExistingFile);
    };
    ConjugationOptions opt;
    int samples = 4;
    auto flow = [&](CLI::App* s) {
        s->add_option("--T", opt.T, "time horizon");
        s->add_option("--tol", opt.tol, "integrator tolerance");
        s->add_option("--grid", opt.gridPoints, "time grid points");
        s->add_option("--samples", samples, "number of seeded initial points");
    };

    auto* control = app.add_subcommand("control", "compute the control term f(V)");
    common(control);
    inputs(control);

    auto* invert = app.add_subcommand("invert", "solve F(W) = V");
    common(invert);
    inputs(invert);
    std::string method = "fp";
    double invTol = 1e-13;
    int order = 6;
    invert->add_option("--method", method, "fp or series")->check(CLI::IsMember({"fp", "series"}));
    invert->add_option("--tol", invTol, "relative fixed-point tolerance");
    invert->add_option("--order", order, "highest series order");

    auto* verify = app.add_subcommand("verify", "check the controlled dynamics");
    common(verify);
    inputs(verify);
    std::string mode;
    verify->add_option("mode", mode, "classical or quantum")->required()->check(CLI::IsMember({"classical", "quantum"}));
    flow(verify);
    verify->add_option("--inv-tol", invTol, "relative inversion tolerance (quantum)");

    auto* tokamak = app.add_subcommand("tokamak", "two-wave and spectrum examples");
    common(tokamak);
    std::vector<std::string> twoWave, spectrum;
    auto* twOpt = tokamak->add_option("--two-wave", twoWave, "eps= b= sigma= n= m=")->expected(0, -1);
    auto* spOpt = tokamak->add_option("--spectrum", spectrum, "eps= N=")->expected(0, -1);
    bool doVerify = false;
    tokamak->add_flag("--verify", doVerify, "integrate and compare trajectories");
    flow(tokamak);

    auto* adiabatic = app.add_subcommand("adiabatic", "iterate the adiabatic transformation");
    common(adiabatic);
    std::string Hpath, series;
    int depth = 3;
    AdiabaticOptions aopt;
    adiabatic->add_option("--H", Hpath, "Hamiltonian JSON")->required()->check(CLI::ExistingFile);
    adiabatic->add_option("--input", series, "time-sampled observable JSON")->required()->check(CLI::ExistingFile);
    adiabatic->add_option("--depth", depth, "number of levels");
    adiabatic->add_option("--derivative-tol", aopt.derivativeRelTol, "allowed relative derivative error");

    auto* bounds = app.add_subcommand("bounds", "norms, operator bound and certificate");
    common(bounds);
    inputs(bounds);
    std::string weight;
    int nmax = -1, kmax = 1, cutoff = 5;
    bounds->add_option("--weight", weight, "weight JSON")->check(CLI::ExistingFile);
    bounds->add_option("--nmax", nmax, "box band |n|, |m| bound (default: support of V)");
    bounds->add_option("--kmax", kmax, "box band |k| bound");
    bounds->add_option("--cutoff", cutoff, "non-resonance search cutoff");

    auto* constants = app.add_subcommand("constants", "numerical constants");
    bool gammaFlag = false, lambdaFlag = false;
    int points = 9;
    constants->add_flag("--gamma", gammaFlag, "root of e^g (g + 1) = 2");
    constants->add_flag("--lambda", lambdaFlag, "tree series against Newton on [-1/e, 1/e]");
    constants->add_option("--points", points, "lambda table size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*control) return run_control(c, in);
        if (*invert) return run_invert(c, in, method, invTol, order);
        if (*verify) return run_verify(c, in, mode, opt, samples, invTol == 1e-13 ? 1e-14 : invTol);
        if (*tokamak)
            return run_tokamak(c, twoWave, twOpt->count() > 0, spectrum, spOpt->count() > 0, doVerify, samples, opt);
        if (*adiabatic) return run_adiabatic(c, Hpath, series, depth, aopt);
        if (*bounds) return run_bounds(c, in, weight, nmax, kmax, cutoff);
        if (*constants) return run_constants(gammaFlag, lambdaFlag, points);
    } catch (const ValidationError& e) {
        std::cerr << "hamctl: " << e.what() << "\n";
        return 1;
    } catch (const TailFailure& e) {
        std::cerr << "hamctl: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "hamctl: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "hamctl: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
