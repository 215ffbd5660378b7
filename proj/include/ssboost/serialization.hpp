#pragma once

#include "ssboost/analysis.hpp"
#include "ssboost/boost.hpp"
#include "ssboost/precondition.hpp"
#include "ssboost/synthgen.hpp"

#include <json.hpp>

#include <filesystem>

namespace ssb {

using Json = nlohmann::json;

inline constexpr int kModelFormatVersion = 1;

void to_json(Json& j, const Band& b);
void from_json(const Json& j, Band& b);
void to_json(Json& j, const ChannelSet& s);
void from_json(const Json& j, ChannelSet& s);
void to_json(Json& j, const Precondition& p);
void from_json(const Json& j, Precondition& p);
void to_json(Json& j, const BoostConfig& c);
void from_json(const Json& j, BoostConfig& c);
void to_json(Json& j, const BandUniverseSpec& s);
void from_json(const Json& j, BandUniverseSpec& s);
void to_json(Json& j, const UniverseConfig& c);
void from_json(const Json& j, UniverseConfig& c);
void to_json(Json& j, const CspModel& m);
void from_json(const Json& j, CspModel& m);
void to_json(Json& j, const LinearModel& m);
void from_json(const Json& j, LinearModel& m);
void to_json(Json& j, const AdditiveModel& m);
void from_json(const Json& j, AdditiveModel& m);
void to_json(Json& j, const TraceRecord& r);
void from_json(const Json& j, TraceRecord& r);
void to_json(Json& j, const BoostTrace& t);
void from_json(const Json& j, BoostTrace& t);
void to_json(Json& j, const PlantSpec& s);
void from_json(const Json& j, PlantSpec& s);
void to_json(Json& j, const DriftSchedule& s);
void from_json(const Json& j, DriftSchedule& s);
void to_json(Json& j, const BandConstraintReport& r);
void to_json(Json& j, const ImportanceProfile& p);
void from_json(const Json& j, ImportanceProfile& p);

/// Parses JSON text, turning parse and type errors into ssb::Error.
Json parse_json(const std::string& text, const std::string& what);

template <class T>
T json_as(const Json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const Json::exception& e) {
    throw Error("invalid " + what + ": " + e.what());
  }
}

void save_model(const AdditiveModel& m, const std::filesystem::path& path);
AdditiveModel load_model(const std::filesystem::path& path);

}  // namespace ssb
