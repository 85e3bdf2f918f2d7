#pragma once

#include <string>

#include <json.hpp>

#include "riemgauss/gaussian.hpp"
#include "riemgauss/mixture.hpp"

// Versioned JSON forms of every artifact. Keys are emitted in sorted order and
// doubles in shortest round-trip form, so load-then-save reproduces a file
// byte for byte. Complex numbers are [re, im]; matrices are lists of rows.
namespace riemgauss::io {

using json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1.0";

json to_json(const Complex& c);
Complex complex_from_json(const json& j);
json to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j);

json point_to_json(const ManifoldPoint& x);
// Accepts coordinates, or {"matrix": ...} for raw-matrix import.
ManifoldPoint point_from_json(const json& j, const ManifoldId& m);

json to_json(const Dataset& d);
Dataset dataset_from_json(const json& j);

json to_json(const ZTable& z);
ZTable ztable_from_json(const json& j);

json to_json(const GaussianParams& p);
GaussianParams params_from_json(const json& j);

json to_json(const FitReport& r);
FitReport fit_report_from_json(const json& j);

json to_json(const MixtureModel& m, const std::string& ztable_ref);
MixtureModel mixture_from_json(const json& j, std::string* ztable_ref = nullptr);

// Checks "schema_version" (major must be 1) and "kind".
void check_header(const json& j, const std::string& kind);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string dump(const json& j);
void write_json_file(const std::string& path, const json& j);

}  // namespace riemgauss::io
