#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace idrs {

struct Dataset {
  std::vector<double> points; // row-major, size() * dim
  std::vector<int> labels;
  int dim = 0;

  std::size_t size() const { return labels.size(); }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * dim, static_cast<std::size_t>(dim)};
  }
};

// Two complementary circle sectors, one with a sharp angle; radius is the
// square root of a chi-squared draw.
struct SectorDatasetSpec {
  int n_per_class = 500;
  double sector_angle = 0.5235987755982988; // pi/6, the sharp class-1 sector
  int radial_dof = 4;
  std::uint64_t seed = 0;
};

Dataset generate_sector(const SectorDatasetSpec& spec);

// Class 1 fills a narrow cone around the first axis with density peaked at
// the vertex; class 0 is spherically symmetric with the cone carved out by
// rejection.
struct ConeDatasetSpec {
  int dim = 2;
  int n_per_class = 500;
  double cone_half_angle = 0.3;
  double density_concentration = 2.0; // gamma shape of the radial law
  double radial_scale = 1.0;          // mean distance = radial_scale * sqrt(dim)
  std::uint64_t seed = 0;
};

struct ConeDataset {
  Dataset data;
  double rejection_rate = 0.0; // fraction of ambient-class draws re-sampled
};

ConeDataset generate_cone(const ConeDatasetSpec& spec);

// Direction-only membership test against the cone around the first axis.
bool in_cone(std::span<const double> x, double half_angle);

// CSV rows: dim feature columns then an integer label; an optional header
// line is skipped on load. Values are written with 17 significant digits so
// a round trip is lossless.
Dataset load_dataset(const std::string& path);
void save_dataset(const std::string& path, const Dataset& data);

} // namespace idrs
