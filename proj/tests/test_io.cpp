#include "helpers.hpp"

#include "hamctl/errors.hpp"
#include "hamctl/io.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hamctl;
using namespace testing_util;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("hamctl_test_" + name)).string();
}

} // namespace

TEST_CASE("wave observables round trip through text") {
    std::mt19937_64 gen(201);
    const auto V = random_waves(gen, 2, 1, 4, 0.3);
    const auto back = wave_from_json(json::parse(to_json(V).dump()));
    CHECK(back.terms() == V.terms());
    CHECK(std::holds_alternative<WaveObservable>(observable_from_json(to_json(V))));
}

TEST_CASE("matrix observables round trip through text") {
    std::mt19937_64 gen(202);
    const MatrixObservable V{random_hermitian(gen, 3)};
    const auto j = json::parse(to_json(V).dump());
    CHECK((matrix_from_json(j).a - V.a).norm() == 0.0);
    CHECK(std::holds_alternative<MatrixObservable>(observable_from_json(j)));
}

TEST_CASE("Hamiltonian models round trip") {
    const auto Hc = classical_harmonic(2, 1, {1.0});
    const auto bc = hamiltonian_from_json(to_json(Hc));
    REQUIRE(bc.is_classical());
    CHECK(bc.classical().omega == Hc.classical().omega);
    CHECK(bc.classical().d == 2);

    const auto Hq = quantum_diagonal({0.0, 0.0, 1.0});
    const auto bq = hamiltonian_from_json(json::parse(to_json(Hq).dump()));
    REQUIRE(bq.is_quantum());
    CHECK(bq.quantum().partition.classOf == Hq.quantum().partition.classOf);
    CHECK((bq.matrix() - Hq.matrix()).norm() == 0.0);

    const auto fl = hamiltonian_from_json(json::parse(R"({"kind":"quantum","floquet":{"hcore":[0.0,0.5],"kmax":1}})"));
    CHECK(fl.quantum().partition.eigenvalues.size() == 6);
}

TEST_CASE("weights round trip") {
    for (const WeightFunction& g :
         {WeightFunction{UniformWeight{}}, WeightFunction{ProductWeight{{1.0, 2.0}}},
          WeightFunction{TableWeight{{{1.0, 2.0}, {2.0, 1.0}}}}}) {
        const auto b = weight_from_json(to_json(g));
        CHECK(b.index() == g.index());
        CHECK(weight_value(b, 0, 1) == weight_value(g, 0, 1));
    }
}

TEST_CASE("malformed and mismatched inputs are rejected") {
    CHECK_THROWS_AS(wave_from_json(json::parse(R"({"kind":"quantum","V":[[[0,0]]]})")), ValidationError);
    CHECK_THROWS_AS(wave_from_json(json::parse(R"({"kind":"classical-waves","d":1,"r":1,
        "terms":[{"n":[1,2],"m":[0],"k":[1],"re":1}]})")),
                    ValidationError);
    CHECK_THROWS_AS(wave_from_json(json::parse(R"({"kind":"classical-waves","d":1,"r":1,
        "terms":[{"n":[1],"m":[0],"k":[1],"re":1},{"n":[1],"m":[0],"k":[1],"re":2}]})")),
                    ValidationError);
    // non-Hermitian matrix
    CHECK_THROWS_AS(matrix_from_json(json::parse(R"({"V":[[[0,0],[1,0]],[[0,0],[0,0]]]})")), ValidationError);
    CHECK_THROWS_AS(observable_from_json(json::parse(R"({"kind":"tensor"})")), ValidationError);
    CHECK_THROWS_AS(hamiltonian_from_json(json::parse(R"({"kind":"classical","d":1,"r":1})")), ValidationError);
    CHECK_THROWS_AS(weight_from_json(json::parse(R"({"kind":"product"})")), ValidationError);

    const auto path = temp_path("bad.json");
    {
        std::ofstream(path) << "{\"kind\": ";
    }
    CHECK_THROWS_AS(read_json_file(path), ValidationError);
    CHECK_THROWS_AS(read_json_file(temp_path("missing.json")), ValidationError);
    std::remove(path.c_str());
}

TEST_CASE("time series input") {
    const auto rec = [](double t, double a) {
        return json{{"t", t}, {"V", json::array({json::array({json::array({0.0, 0.0}), json::array({a, 0.0})}),
                                                 json::array({json::array({a, 0.0}), json::array({0.0, 0.0})})})}};
    };
    const json list = json::array({rec(0.0, 0.1), rec(0.5, 0.2), rec(1.0, 0.3)});
    const auto a = time_series_from_json(list);
    const auto b = time_series_from_json(json{{"samples", list}});
    CHECK(a.times == std::vector<double>{0.0, 0.5, 1.0});
    CHECK((a.values[2].a - b.values[2].a).norm() == 0.0);
    CHECK(a.values[1].a(0, 1).real() == 0.2);
    CHECK_THROWS_AS(time_series_from_json(json::array({rec(0.0, 0.1), rec(0.0, 0.2), rec(1.0, 0.3)})),
                    ValidationError);
    CHECK_THROWS_AS(time_series_from_json(json{{"times", list}}), ValidationError);
}

TEST_CASE("reports carry their policy") {
    SeriesPolicy p;
    const auto H = quantum_diagonal({0.0, 1.0});
    const auto r = control_term(H, MatrixObservable{0.1 * pauli_x()}, p);
    const auto j = to_json(r);
    CHECK(j.at("policy").at("maxOrder") == p.maxOrder);
    CHECK(j.at("terms").size() == r.terms.size());
    CHECK(j.at("terms").at(0).at("order") == 2);
    CHECK(j.contains("f"));
}

TEST_CASE("CSV writers") {
    SUBCASE("trajectory") {
        Trajectory tr;
        tr.times = {0.0, 1.0};
        tr.points = {make_point(2, 1), make_point(2, 1)};
        std::ostringstream os;
        write_trajectory_csv(os, tr);
        std::istringstream is(os.str());
        std::string header;
        std::getline(is, header);
        CHECK(header == "t,q1,q2,p1,p2,tau1");
        int rows = 0;
        for (std::string line; std::getline(is, line);) ++rows;
        CHECK(rows == 2);
    }
    SUBCASE("adiabatic") {
        SeriesPolicy p;
        TimeSampledObservable v;
        for (int i = 0; i < 5; ++i) {
            v.times.push_back(0.1 * i);
            v.values.push_back(MatrixObservable{0.05 * pauli_x()});
        }
        const auto chain = adiabatic_iterate(quantum_diagonal({0.0, 1.0}), v, 1, p);
        std::ostringstream os;
        write_adiabatic_csv(os, chain);
        CHECK(os.str().rfind("level,t,normV,normW,normVdot,normV1\n", 0) == 0);
    }
}

TEST_CASE("written files are byte-identical across runs") {
    SeriesPolicy p;
    std::mt19937_64 g1(203), g2(203);
    const auto H = classical_harmonic(1, 1, {1.0});
    const auto a = to_json(control_term(H, random_waves(g1, 1, 1, 3, 0.01, false), p));
    const auto b = to_json(control_term(H, random_waves(g2, 1, 1, 3, 0.01, false), p));
    const auto pa = temp_path("a.json"), pb = temp_path("b.json");
    write_json_file(pa, a);
    write_json_file(pb, b);
    const auto slurp = [](const std::string& f) {
        std::ifstream in(f);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    CHECK(slurp(pa) == slurp(pb));
    CHECK_FALSE(slurp(pa).empty());
    CHECK(read_json_file(pa) == a);
    std::remove(pa.c_str());
    std::remove(pb.c_str());
}
