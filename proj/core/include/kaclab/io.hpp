#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "kaclab/density_table.hpp"
#include "kaclab/ensemble.hpp"
#include "kaclab/grid.hpp"
#include "kaclab/initial_density.hpp"
#include "kaclab/kernel.hpp"

namespace kaclab {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest-round-trip decimal rendering (%.17g), for byte-stable artifacts.
std::string format_double(double x);

/// Flat table CSV: header `index,value,stderr`, one row per cell.
void write_table_csv(const std::filesystem::path& path, const DensityTable& table);
DensityTable read_table_csv(const std::filesystem::path& path, unsigned order,
                            std::size_t cells_per_slot);

/// Sidecar metadata for a table artifact.
nlohmann::json table_sidecar(const DensityTable& table, const GridSpec& grid, double mu,
                             double t);

/// Reference-table CSV with per-axis bin indices: `b0[,b1,b2],value,stderr`.
void write_reference_csv(const std::filesystem::path& path, const DensityTable& table,
                         const GridSpec& grid);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// Config <-> JSON. Parsers reject unknown keys.
nlohmann::json kernel_to_json(const Kernel& kernel);
Kernel kernel_from_json(const nlohmann::json& j);
nlohmann::json density_to_json(const InitialDensity& f0);
InitialDensity density_from_json(const nlohmann::json& j);
nlohmann::json grid_to_json(const GridSpec& grid);
GridSpec grid_from_json(const nlohmann::json& j);
nlohmann::json ensemble_to_json(const EnsembleSpec& spec);
EnsembleSpec ensemble_from_json(const nlohmann::json& j);

/// FNV-1a over a canonical dump; stable across reformatting of the file.
std::uint64_t config_hash(const nlohmann::json& j);

/// Throw std::invalid_argument when `j` holds keys outside `allowed`.
void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const std::string& where);

} // namespace kaclab
