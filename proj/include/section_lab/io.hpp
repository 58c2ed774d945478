#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "section_lab/density.hpp"
#include "section_lab/geometry.hpp"
#include "section_lab/sampler.hpp"

namespace section_lab::io {

using nlohmann::json;

/// Body from JSON. Accepted forms:
///   {"dim": 2|3, "kind": "polytope", "vertices": [[...]], "facets": [[...]]}
///   {"kind": "ball", "center": [...], "radius": r}
///   {"dim": 2|3, "normals": [[...]], "offsets": [...]}    (half-spaces)
/// "facets" is optional; when present it is checked for planarity, outward
/// orientation and extreme vertices (InvalidBody otherwise). "label" is
/// optional everywhere.
ConvexBody parse_body(const json& doc);
ConvexBody load_body(const std::filesystem::path& path);

/// Built-in name (see parse_builtin) or path to a body file.
ConvexBody resolve_shape(const std::string& shape, bool normalize_volume);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

json to_json(const SectionSample& sample);

/// One value per line after '#'-prefixed metadata lines.
void write_sample_csv(const std::filesystem::path& path, const SectionSample& sample,
                      const json& config);
void write_sample_json(const std::filesystem::path& path, const SectionSample& sample,
                       const json& config);

/// Columns "grid,value" after '#'-prefixed metadata lines.
void write_density_csv(const std::filesystem::path& path, const DensityEstimate& est,
                       const json& metadata);

/// Columns "location,cumulative" after '#'-prefixed metadata lines.
void write_step_cdf_csv(const std::filesystem::path& path, const StepCDF& cdf,
                        const json& metadata);

void write_json(const std::filesystem::path& path, const json& doc);

/// Reads observations: a JSON file with a "values" array, or a text file with
/// one number per line ('#' comments and a non-numeric header are skipped).
std::vector<double> read_values(const std::filesystem::path& path);

}  // namespace section_lab::io
