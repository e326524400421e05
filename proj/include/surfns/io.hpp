#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <string>

#include "surfns/fields.hpp"

namespace surfns {

/// Snapshot format: one ASCII header line
///   SURFNS1 <kind> <ncharts> <n1> <n2> <ncomp>\n
/// followed by ncharts * n1 * n2 * ncomp raw little-endian float64 values in
/// [chart][i][j][comp] order over interior nodes (halo rings are rebuilt on
/// load).
void save_field(const std::string& path, const ScalarField& f);
void save_field(const std::string& path, const VectorField& f);

/// Loading validates the header against the atlas and refreshes halos.
ScalarField load_scalar(const std::string& path, const SurfaceAtlas& atlas);
VectorField load_vector(const std::string& path, const SurfaceAtlas& atlas,
                        bool tangent = false);

/// CSV writer emitting full-precision (%.17g) numeric rows.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::string& header);
    void row(std::initializer_list<double> values);
    void raw(const std::string& line);

  private:
    std::ofstream out_;
};

/// FNV-1a 64-bit hash of a file's bytes; used by run manifests so that
/// reproducibility can be checked by comparing manifest lines.
std::uint64_t fnv1a_file(const std::string& path);

/// Point-cloud VTK (legacy ASCII) of the active nodes with the given point
/// data; intended for quick visual checks only.
void save_vtk(const std::string& path, const SurfaceAtlas& atlas, const VectorField* velocity,
              const ScalarField* pressure);

} // namespace surfns
