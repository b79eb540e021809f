#pragma once

// File formats: curve and cloud text exports, cube-tree / forest JSON,
// coefficient and report CSVs, and content hashing for run manifests.

#include "hrect/carleson.hpp"
#include "hrect/cloud.hpp"
#include "hrect/coeff.hpp"
#include "hrect/corona.hpp"
#include "hrect/curve.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hrect {

/// %.17g rendering used by every text export.
std::string fmt17(double v);

/// Curve text: one `x y t` line per vertex.
void write_curve(const std::string& path, const HorizontalPolyline& gamma);
HorizontalPolyline read_curve(const std::string& path);

/// Cloud text: one `z1 ... z2n t w` line per point.
void write_cloud(const std::string& path, const PointCloud& c);
PointCloud read_cloud(const std::string& path, int n, int k, double resolution);

void write_cube_tree_json(const std::string& path, const CubeTree& tree);

/// CSV `cube_id,generation,coeff,value,plane_params...`.
void write_coeff_csv(const std::string& path, const CubeTree& tree,
                     const CoeffField& field);

/// CSV `level,increment,partial_sum` with a family column.
void write_levels_csv(const std::string& path, const std::string& family,
                      const std::vector<MultiresLevel>& levels);

void write_dichotomy_json(const std::string& path, const DichotomyReport& rep);

void write_forest_json(const std::string& path, const CoronaForest& forest,
                       const CubeTree& tree, const PackingReport& packing);

/// CSV of sampled-pair ratios from a projection verification run.
void write_pc_csv(const std::string& path, const std::vector<PcReport>& reports);

std::uint64_t fnv1a_file(const std::string& path);
std::uint64_t fnv1a_bytes(const std::string& bytes);

} // namespace hrect
