#pragma once

#include "hamctl/adiabatic.hpp"
#include "hamctl/flows.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <variant>

namespace hamctl {

using json = nlohmann::ordered_json;

json to_json(const WaveObservable& v);
json to_json(const MatrixObservable& v);
json to_json(const HamiltonianModel& H);
json to_json(const WeightFunction& g);
json to_json(const SeriesPolicy& p);

WaveObservable wave_from_json(const json& j);
/// Reads the "V" matrix of a quantum record.
MatrixObservable matrix_from_json(const json& j);
/// Classical {"kind":"classical","d","r","omega"[,"resonanceTol"]} or quantum
/// {"kind":"quantum","h"[,"gapTol","hbar"]} / {"kind":"quantum","floquet":{"hcore","kmax"}}.
HamiltonianModel hamiltonian_from_json(const json& j);
WeightFunction weight_from_json(const json& j);

using AnyObservable = std::variant<WaveObservable, MatrixObservable>;
AnyObservable observable_from_json(const json& j);

/// Either a bare list of {"t", "V"} records or an object with a "samples" list.
TimeSampledObservable time_series_from_json(const json& j);

template <class Obs>
json to_json(const ControlReport<Obs>& r);
template <class Obs>
json to_json(const InversionReport<Obs>& r);

json to_json(const InverseRatioCertificate& c);
json to_json(const LambdaReport& r);
json to_json(const ConjugationReport& r);
json to_json(const QuantumConjugationReport& r);
json to_json(const AdiabaticChain& c);

/// Header t,q1..qd,p1..pd,tau1..taur.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);
/// Header level,t,normV,normW,normVdot,normV1.
void write_adiabatic_csv(std::ostream& os, const AdiabaticChain& c);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

} // namespace hamctl
