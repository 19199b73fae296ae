#pragma once

#include <filesystem>
#include <iosfwd>

#include "clarklab/charfun.hpp"
#include "clarklab/haar.hpp"
#include "clarklab/modelspace.hpp"
#include "clarklab/moments.hpp"
#include "clarklab/opmodel.hpp"
#include "clarklab/spec_io.hpp"

namespace clarklab {

json to_json(const MatMeasure& measure);
// Column-major: one column per grid angle (header row), rows W[i,j].re and
// W[i,j].im with i running fastest.
void write_density_csv(std::ostream& os, const MatMeasure& measure);

json to_json(const ClarkSystem& system);
// Rebuilds a system from its JSON form without recomputing the roots.
ClarkSystem clark_system_from_json(const json& j);
// "angle weight" lines, weight = trace of the cluster weight.
void write_atom_plot(std::ostream& os, const std::vector<MeasureAtom>& atoms);
void write_atom_plot(std::ostream& os, const ClarkSystem& system);

json to_json(const FiltrationResult& r);
json to_json(const CadResult& r);
json to_json(const ExtremeResult& r);
json to_json(const DenseResult& r);
json to_json(const CoeffSeries& s);

// Row-major little-endian (re, im) f64 pairs.
void write_matrix_binary(const std::filesystem::path& path, const Mat& m);
Mat read_matrix_binary(const std::filesystem::path& path, Eigen::Index rows, Eigen::Index cols);
json frame_sidecar(const FrameSpace& frame, double unitarity_deviation);

}  // namespace clarklab
