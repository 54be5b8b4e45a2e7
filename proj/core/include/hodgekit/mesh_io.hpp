#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "hodgekit/complex.hpp"

namespace hodgekit::io {

// ASCII OFF for 2-dimensional complexes. A comment line of the form
//   # hodgekit-period <p_x> <p_y> <p_z>
// marks the coordinates as periodic (a non-positive entry means that axis is
// not periodic). Coordinates are written with 17 significant digits so a
// write/read cycle reproduces the complex id.
ComplexPtr read_off(std::istream& in);
void write_off(std::ostream& out, const SimplicialComplex& complex);

// Line-graph text format for 1-dimensional complexes:
//   <vertex count>
//   v <x> <y>        optional, one per vertex in index order
//   <i> <j>          one oriented edge per line
// Without `v` lines vertex i is placed at angle 2*pi*i/N on the unit circle.
ComplexPtr read_line_graph(std::istream& in);
void write_line_graph(std::ostream& out, const SimplicialComplex& complex);

/// Dispatches on the extension: ".off" is OFF, anything else the line-graph
/// format. Throws Error(mesh_unreadable) on I/O or parse failure.
ComplexPtr read_mesh(const std::filesystem::path& path);
void write_mesh(const std::filesystem::path& path, const SimplicialComplex& complex);

/// {"degree": p, "complex_id": "...", "values": [...]}
std::string cochain_to_json(const Cochain& cochain);
/// Parses the JSON exchange format against `complex`. A missing or empty
/// complex_id binds to `complex`; a different id is Error(shape). Malformed
/// documents raise Error(cochain_malformed).
Cochain cochain_from_json(const std::string& text, const SimplicialComplex& complex);
Cochain read_cochain(const std::filesystem::path& path, const SimplicialComplex& complex);

}  // namespace hodgekit::io
