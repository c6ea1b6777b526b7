#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "ridgeapprox/metrics.hpp"
#include "ridgeapprox/ridge.hpp"
#include "ridgeapprox/spectral.hpp"

namespace ridge::io {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

Json to_json(const RidgeCombination& c);
RidgeCombination combination_from_json(const Json& j);

Json to_json(const SpectralMeasure& m);
SpectralMeasure measure_from_json(const Json& j);

Json to_json(const RateFit& f);

/// Reads a JSON document; UsageError on a missing file or a parse failure.
Json read_json(const std::filesystem::path& path);
/// Writes j with two-space indentation and a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

SpectralMeasure load_measure(const std::filesystem::path& path);
void save_measure(const std::filesystem::path& path, const SpectralMeasure& m);

}  // namespace ridge::io
