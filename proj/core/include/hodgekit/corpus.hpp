#pragma once

#include <string>
#include <vector>

#include "hodgekit/complex.hpp"

namespace hodgekit::corpus {

/// Regular n-gon inscribed in the unit circle, edges oriented counterclockwise.
ComplexPtr circle(int n);

/// Flat torus [0, 2pi)^2 cut into an n x n grid of squares, each split along
/// its diagonal. Coordinates are (x, y, 0) with period (2pi, 2pi, 0).
ComplexPtr flat_torus(int n);

/// Octahedron with `levels` rounds of 1-to-4 midpoint subdivision, every
/// vertex projected to the unit sphere.
ComplexPtr sphere(int levels);

/// Named corpus meshes: circle4, circle64, torus8, torus16, torus32,
/// sphere0, sphere1, sphere2. Error(unknown_registry) otherwise.
ComplexPtr by_name(const std::string& name);
std::vector<std::string> names();

/// Expected Betti numbers for a corpus name (from the known topology).
std::vector<int> expected_betti(const std::string& name);

}  // namespace hodgekit::corpus
