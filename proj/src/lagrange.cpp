#include "hamctl/inversion.hpp"
#include "hamctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace hamctl {

std::vector<TreeIndex> tree_indices(int N, int limit) {
    if (N < 1) throw ValidationError("tree index length must be >= 1");
    if (N > limit) throw ValidationError("tree index length " + std::to_string(N) + " above limit " +
                                         std::to_string(limit));
    std::vector<TreeIndex> out;
    std::vector<int> nu(N, 0);
    // depth-first over positions 1..N-1; position 0 is forced to 0
    auto rec = [&](auto&& self, int pos, int partial) -> void {
        if (pos == N) {
            if (partial == N - 1) out.push_back({N, nu});
            return;
        }
        for (int v = 0; partial + v <= pos; v = (v == 0 ? 2 : v + 1)) {
            nu[pos] = v;
            self(self, pos + 1, partial + v);
        }
        nu[pos] = 0;
    };
    rec(rec, 1, 0);
    return out;
}

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

template <class Obs>
struct Item {
    std::string key;
    Obs value;
};

/// Evaluates symmetric Taylor coefficients on keyed arguments, caching by
/// the sorted argument keys.
template <class Obs>
class TaylorEvaluator {
public:
    explicit TaylorEvaluator(const HamiltonianModel& H) : H_(H) {}

    Item<Obs> apply(std::vector<Item<Obs>> args) {
        const int n = static_cast<int>(args.size());
        if (n < 2) throw ValidationError("Taylor coefficient of degree < 2");
        std::sort(args.begin(), args.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
        std::string key = "G" + std::to_string(n) + "(";
        for (int i = 0; i < n; ++i) key += (i ? "," : "") + args[i].key;
        key += ")";
        auto it = memo_.find(key);
        if (it != memo_.end()) return {key, it->second};

        std::vector<Obs> gam, lead;
        for (const auto& a : args) {
            gam.push_back(gamma(H_, a.value));
            lead.push_back((1.0 / factorial(n)) * ((n - 1.0) * resonant(H_, a.value) + a.value));
        }
        // distinct arrangements of the multiset, each standing for prod m_i! permutations
        std::vector<int> cls(n);
        for (int i = 0; i < n; ++i) cls[i] = (i > 0 && args[i].key == args[i - 1].key) ? cls[i - 1] : i;
        double mult = 1.0;
        for (int i = 0, run = 1; i < n; ++i) {
            if (i > 0 && cls[i] == cls[i - 1]) mult *= ++run;
            else run = 1;
        }
        const double sign = (n % 2) ? -1.0 : 1.0;
        Obs total = zero_like(args[0].value);
        std::vector<int> perm = cls;
        do {
            Obs y = lead[perm[n - 1]];
            for (int j = n - 2; j >= 0; --j) y = lie(gam[perm[j]], y);
            total = total + y;
        } while (std::next_permutation(perm.begin(), perm.end()));
        Obs value = (sign * mult / factorial(n)) * total;
        memo_.emplace(key, value);
        return {key, std::move(value)};
    }

private:
    const HamiltonianModel& H_;
    std::map<std::string, Obs> memo_;
};

void check_order(int M) {
    if (M < 1) throw ValidationError("order must be >= 1");
    if (2 * M - 1 > kTreeIndexLimit) throw ValidationError("order " + std::to_string(M) + " above limit");
}

} // namespace

template <class Obs>
Obs taylor_coefficient(const HamiltonianModel& H, const std::vector<Obs>& args) {
    TaylorEvaluator<Obs> ev(H);
    std::vector<Item<Obs>> items;
    for (std::size_t i = 0; i < args.size(); ++i) {
        require_kind(H, args[i]);
        items.push_back({"a" + std::to_string(i), args[i]});
    }
    return ev.apply(std::move(items)).value;
}

template <class Obs>
Obs lagrange_term(const HamiltonianModel& H, const Obs& V, int M) {
    require_kind(H, V);
    check_order(M);
    if (M == 1) return V;
    TaylorEvaluator<Obs> ev(H);
    Obs total = zero_like(V);
    for (int N = M; N <= 2 * M - 1; ++N) {
        for (const auto& t : tree_indices(N)) {
            if (std::count(t.nu.begin(), t.nu.end(), 0) != M) continue;
            std::vector<Item<Obs>> stack;
            for (int v : t.nu) {
                if (v == 0) {
                    stack.push_back({"V", V});
                    continue;
                }
                if (static_cast<int>(stack.size()) < v) throw ValidationError("tree index arity mismatch");
                std::vector<Item<Obs>> args(stack.end() - v, stack.end());
                stack.resize(stack.size() - v);
                stack.push_back(ev.apply(std::move(args)));
            }
            if (stack.size() != 1) throw ValidationError("tree index does not contract to a single term");
            total = total + stack.front().value;
        }
    }
    return total;
}

template <class Obs>
Obs lagrange_term_rearranged(const HamiltonianModel& H, const Obs& V, int M) {
    require_kind(H, V);
    check_order(M);
    if (M == 1) return V;
    Obs total = zero_like(V);
    for (int N = 1; N <= M - 1; ++N) {
        const double sign = ((N + M + 1) % 2) ? -1.0 : 1.0;
        // compositions lambda of M-1 into N positive parts
        std::vector<std::vector<int>> comps;
        std::vector<int> lam(N);
        auto compose = [&](auto&& self, int pos, int left) -> void {
            if (pos == N - 1) {
                if (left >= 1) {
                    lam[pos] = left;
                    comps.push_back(lam);
                }
                return;
            }
            for (int v = 1; v <= left - (N - 1 - pos); ++v) {
                lam[pos] = v;
                self(self, pos + 1, left - v);
            }
        };
        compose(compose, 0, M - 1);
        for (const auto& lamc : comps) {
            lam = lamc;
            std::vector<int> lp(N + 1, 0);
            for (int i = 0; i < N; ++i) lp[i + 1] = lp[i] + lam[i];
            // nu >= 0 with |nu|_N = M and |nu|_n > |lambda|_n
            std::vector<int> nu(N, 0);
            auto rec = [&](auto&& self, int pos, int partial) -> void {
                if (pos == N) {
                    if (partial != M) return;
                    std::vector<Obs> stack;
                    for (int j = 0; j < N; ++j) {
                        for (int c = 0; c < nu[j]; ++c) stack.push_back(V);
                        const int l = lam[j];
                        Obs y = stack.back();
                        stack.pop_back();
                        y = (1.0 / factorial(l + 1)) * (double(l) * resonant(H, y) + y);
                        std::vector<Obs> xs(stack.end() - l, stack.end());
                        stack.resize(stack.size() - l);
                        for (int c = l - 1; c >= 0; --c) y = lie(gamma(H, xs[c]), y);
                        stack.push_back(std::move(y));
                    }
                    total = total + sign * stack.front();
                    return;
                }
                for (int v = 0; partial + v <= M; ++v) {
                    if (partial + v <= lp[pos + 1]) continue;
                    nu[pos] = v;
                    self(self, pos + 1, partial + v);
                }
            };
            rec(rec, 0, 0);
        }
    }
    return total;
}

template <class Obs>
InversionReport<Obs> invert_series(const HamiltonianModel& H, const Obs& V, int Mmax, const SeriesPolicy& policy) {
    require_kind(H, V);
    check_order(Mmax);
    InversionReport<Obs> rep;
    rep.method = "series";
    rep.normV = norm(H, V);
    Obs W = zero_like(V);
    for (int M = 1; M <= Mmax; ++M) {
        rep.terms.push_back(lagrange_term(H, V, M));
        rep.stepNorms.push_back(norm(H, rep.terms.back()));
        W = W + rep.terms.back();
    }
    rep.W = W;
    rep.iterations = Mmax;
    rep.residual = norm(H, F_apply(H, W, policy) - V);
    rep.normW = norm(H, W);
    rep.ratio = rep.normV > 0.0 ? rep.normW / rep.normV : 1.0;
    const double b = policy.gammaBound;
    rep.contractionBound = std::exp(b * rep.normW) * (b * rep.normW + 1.0) - 1.0;
    return rep;
}

template WaveObservable taylor_coefficient(const HamiltonianModel&, const std::vector<WaveObservable>&);
template MatrixObservable taylor_coefficient(const HamiltonianModel&, const std::vector<MatrixObservable>&);
template WaveObservable lagrange_term(const HamiltonianModel&, const WaveObservable&, int);
template MatrixObservable lagrange_term(const HamiltonianModel&, const MatrixObservable&, int);
template WaveObservable lagrange_term_rearranged(const HamiltonianModel&, const WaveObservable&, int);
template MatrixObservable lagrange_term_rearranged(const HamiltonianModel&, const MatrixObservable&, int);
template InversionReport<WaveObservable> invert_series(const HamiltonianModel&, const WaveObservable&, int,
                                                       const SeriesPolicy&);
template InversionReport<MatrixObservable> invert_series(const HamiltonianModel&, const MatrixObservable&, int,
                                                         const SeriesPolicy&);

} // namespace hamctl
