#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "porehom/cell.hpp"
#include "porehom/macro.hpp"
#include "porehom/trace.hpp"
#include "porehom/verify.hpp"

namespace porehom {

using Json = nlohmann::ordered_json;

Json to_json(const NormReport& r);
NormReport norm_report_from_json(const Json& j);

Json to_json(const Mat2& m);
Mat2 mat2_from_json(const Json& j);

Json to_json(const MacroCoefficients& c);
MacroCoefficients macro_coefficients_from_json(const Json& j);

// Conservation drift, positivity and energy-gap figures of a finished run.
Json run_summary(const Trace& trace);

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

// Lists every regular file under `dir` with its byte size, manifest.json
// included, and writes it to dir/manifest.json.
Json write_manifest(const std::filesystem::path& dir);

}  // namespace porehom
