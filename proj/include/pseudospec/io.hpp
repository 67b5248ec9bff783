#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pseudospec/homotopy.hpp"
#include "pseudospec/polynomials.hpp"
#include "pseudospec/pseudospectrum.hpp"
#include "pseudospec/structure.hpp"
#include "pseudospec/types.hpp"

namespace pseudospec::io {

using json = nlohmann::json;

/// Matrix file: { "n": int, "entries": [[re, im], ...] } row-major, length n^2.
ComplexMatrix parse_matrix(const json& j);
ComplexMatrix load_matrix(const std::filesystem::path& path);
json matrix_to_json(const ComplexMatrix& a);

/// Structure file: { "n": int, "positions": [[i, j], ...] } 1-based; sorted on
/// load, duplicates rejected. Internally 0-based.
StructurePattern parse_structure(const json& j);
StructurePattern load_structure(const std::filesystem::path& path);
json structure_to_json(const StructurePattern& s);

/// Polynomial file: { "monic": bool, "coeffs": [[re, im], ...] }.
/// Monic: coeffs are a_1..a_n of lambda^n + a_1 lambda^{n-1} + ... + a_n.
/// General: coefficients highest degree first.
struct PolynomialFile {
  bool monic = false;
  ComplexVector coeffs;
  MonicPolynomial as_monic() const;
  GeneralPolynomial as_general() const;
};
PolynomialFile parse_polynomial(const json& j);
PolynomialFile load_polynomial(const std::filesystem::path& path);

/// Perturbation file: { "components": [[re, im], ...] }.
PerturbationVector parse_perturbation(const json& j);
PerturbationVector load_perturbation(const std::filesystem::path& path);
json perturbation_to_json(const PerturbationVector& z);

json complex_to_json(Complex z);

/// Region report: box, resolution, epsilon, mode, component_count, provenance
/// tallies, optional per-component conservation reports.
json region_report(const GridRegion& region);
json component_check_report(const ComponentCheck& check);
json trajectory_to_json(const TrajectoryRecord& record);

/// Writes content atomically (temp file + rename). Creates parent directories.
void atomic_write(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const json& j);

/// PGM P5 raster: byte 0 outside, 128 + label * (127 / component_count) inside.
/// Rows run from im_max down to im_min. Deterministic bytes.
std::string render_pgm(const GridRegion& region);
void write_pgm(const std::filesystem::path& path, const GridRegion& region);

/// SVG with one path element per component boundary (marching squares over
/// the cell-center field) and one polyline per trajectory path, if given.
std::string render_svg(const GridRegion& region, const TrajectoryRecord* record = nullptr);
void write_svg(const std::filesystem::path& path, const GridRegion& region,
               const TrajectoryRecord* record = nullptr);

}  // namespace pseudospec::io
