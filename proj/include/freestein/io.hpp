#pragma once

// JSON interchange for polynomials, states, ensembles, and reports. Words are 1-based in JSON.

#include <memory>
#include <string>

#include <json.hpp>

#include "freestein/cltlab.hpp"
#include "freestein/ensemble.hpp"
#include "freestein/ncalg.hpp"
#include "freestein/poincare.hpp"
#include "freestein/states.hpp"
#include "freestein/stein.hpp"

namespace freestein::io {

using json = nlohmann::json;

json to_json(const NcPoly& p);
json to_json(const TensorPoly& q);
json to_json(const PolyTuple& t);
json to_json(const KernelMatrix& a);
json to_json(const MomentTable& table);
json to_json(const CumulantSpec& spec);

NcPoly poly_from_json(const json& j);
/// {"nvars", "entries": [poly...]}.
PolyTuple tuple_from_json(const json& j);
std::shared_ptr<MomentTable> table_from_json(const json& j);
CumulantSpec cumulants_from_json(const json& j);
MatrixEnsembleConfig ensemble_from_json(const json& j);

json stein_report(const SteinProblem& prob, const BoundReport& bounds, const ExplicitDistance& explicit_distance);
json poincare_report(const PoincareEstimate& est, const VoiculescuReport& voiculescu);

/// Reads and parses a JSON file; errors carry the path.
json read_json_file(const std::string& path);

}  // namespace freestein::io
