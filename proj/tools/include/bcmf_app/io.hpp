#pragma once

// JSON and CSV serialization of results; SHA-256 file hashes.

#include "bcmf/binding.hpp"
#include "bcmf/certify.hpp"
#include "bcmf/inducing.hpp"
#include "bcmf/ldp.hpp"
#include "bcmf/thermo.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace bcmf::app {

using nlohmann::json;

/// Finite values as numbers; infinities and NaN as "inf", "-inf", "nan".
json num(double x);
/// %.17g, with the same spellings for non-finite values.
std::string fmt(double x);

json to_json(const ConditionReport& r);
json to_json(const DeltaTable& t);
json to_json(const CriticalPartition& p);
json to_json(const LemmaPReport& r);
json to_json(const InducedSystem& s);  // summary; no per-branch data
json to_json(const TailFit& f);
json to_json(const MarkovReport& r);
json to_json(const DistortionReport& r);
json to_json(const QuickReturnReport& r);
json to_json(const Horseshoe& h);
json to_json(const HorseshoeCheck& c);
json to_json(const MeasureStats& m);
json to_json(const SpectrumCurve& c);
json to_json(const SpectrumPropertyReport& r);
json to_json(const RateCurve& c);
json to_json(const LegendreReport& r);
json to_json(const DeviationEstimate& e);
json to_json(const FreeEnergyEstimate& e);
json to_json(const CoveringEstimate& e);

/// Rows of already formatted cells; the header is the first row.
void write_csv(const std::filesystem::path& path, const std::vector<std::vector<std::string>>& rows);
void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace bcmf::app
