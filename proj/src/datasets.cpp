#include "idrs/datasets.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "idrs/rng.hpp"

namespace idrs {

namespace {

constexpr double kTwoPi = 6.283185307179586;

} // namespace

Dataset generate_sector(const SectorDatasetSpec& spec) {
  if (spec.n_per_class < 1) throw std::domain_error("generate_sector: n_per_class must be >= 1");
  if (!(spec.sector_angle > 0.0 && spec.sector_angle < kTwoPi))
    throw std::domain_error("generate_sector: sector_angle must be in (0, 2pi)");
  if (spec.radial_dof < 1) throw std::domain_error("generate_sector: radial_dof must be >= 1");

  Dataset data;
  data.dim = 2;
  data.points.reserve(4 * spec.n_per_class);
  data.labels.reserve(2 * spec.n_per_class);
  for (int label : {1, 0}) {
    for (int i = 0; i < spec.n_per_class; ++i) {
      GaussianStream g(derive_stream(spec.seed, label, static_cast<std::uint64_t>(i)));
      double angle = label == 1
                         ? spec.sector_angle * g.next_uniform()
                         : spec.sector_angle + (kTwoPi - spec.sector_angle) * g.next_uniform();
      double radius = std::sqrt(chi_squared_draw(g, spec.radial_dof));
      data.points.push_back(radius * std::cos(angle));
      data.points.push_back(radius * std::sin(angle));
      data.labels.push_back(label);
    }
  }
  return data;
}

bool in_cone(std::span<const double> x, double half_angle) {
  double norm2 = 0.0;
  for (double v : x) norm2 += v * v;
  if (norm2 == 0.0) return true; // the vertex
  return x[0] >= std::sqrt(norm2) * std::cos(half_angle);
}

ConeDataset generate_cone(const ConeDatasetSpec& spec) {
  if (spec.dim < 2) throw std::domain_error("generate_cone: dim must be >= 2");
  if (spec.n_per_class < 1) throw std::domain_error("generate_cone: n_per_class must be >= 1");
  if (!(spec.cone_half_angle > 0.0 && spec.cone_half_angle < 1.5707963267948966))
    throw std::domain_error("generate_cone: half angle must be in (0, pi/2)");
  if (!(spec.density_concentration > 0.0))
    throw std::domain_error("generate_cone: density_concentration must be positive");

  if (!(spec.radial_scale > 0.0))
    throw std::domain_error("generate_cone: radial_scale must be positive");
  const int n = spec.dim;
  // Radial law: gamma(shape = concentration) scaled so the mean distance
  // grows as sqrt(N), matching how usable noise levels scale with dimension.
  const double radial_scale =
      spec.radial_scale * std::sqrt(static_cast<double>(n)) / spec.density_concentration;

  ConeDataset out;
  out.data.dim = n;
  std::vector<double> dir(n);

  // cone class
  for (int i = 0; i < spec.n_per_class; ++i) {
    GaussianStream g(derive_stream(spec.seed, 1, static_cast<std::uint64_t>(i)));
    double phi = spec.cone_half_angle * g.next_uniform();
    double tangent_norm2 = 0.0;
    for (int j = 1; j < n; ++j) {
      dir[j] = g.next_gaussian();
      tangent_norm2 += dir[j] * dir[j];
    }
    double tscale = tangent_norm2 > 0.0 ? std::sin(phi) / std::sqrt(tangent_norm2) : 0.0;
    dir[0] = std::cos(phi);
    for (int j = 1; j < n; ++j) dir[j] *= tscale;
    double radius = radial_scale * gamma_draw(g, spec.density_concentration);
    for (int j = 0; j < n; ++j) out.data.points.push_back(radius * dir[j]);
    out.data.labels.push_back(1);
  }

  // ambient class, cone carved out by rejection
  std::int64_t rejected = 0;
  for (int i = 0; i < spec.n_per_class; ++i) {
    GaussianStream g(derive_stream(spec.seed, 0, static_cast<std::uint64_t>(i)));
    for (;;) {
      double norm2 = 0.0;
      for (int j = 0; j < n; ++j) {
        dir[j] = g.next_gaussian();
        norm2 += dir[j] * dir[j];
      }
      if (norm2 == 0.0) continue;
      double inv = 1.0 / std::sqrt(norm2);
      for (int j = 0; j < n; ++j) dir[j] *= inv;
      if (in_cone(dir, spec.cone_half_angle)) {
        ++rejected;
        continue;
      }
      double radius = radial_scale * gamma_draw(g, spec.density_concentration);
      for (int j = 0; j < n; ++j) out.data.points.push_back(radius * dir[j]);
      out.data.labels.push_back(0);
      break;
    }
  }
  out.rejection_rate =
      static_cast<double>(rejected) / static_cast<double>(rejected + spec.n_per_class);
  return out;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_dataset: cannot open " + path);

  Dataset data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 2) {
      throw std::runtime_error("load_dataset: " + path + ":" + std::to_string(line_no) +
                               ": expected at least two columns");
    }
    std::vector<double> row;
    bool numeric = true;
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cells[i], &used));
        if (used != cells[i].size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
      if (!numeric) break;
    }
    int label = 0;
    if (numeric) {
      try {
        std::size_t used = 0;
        label = std::stoi(cells.back(), &used);
        if (used != cells.back().size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (line_no == 1) continue; // header
      throw std::runtime_error("load_dataset: " + path + ":" + std::to_string(line_no) +
                               ": malformed row");
    }
    if (data.dim == 0) data.dim = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != data.dim)
      throw std::runtime_error("load_dataset: " + path + ":" + std::to_string(line_no) +
                               ": inconsistent column count");
    data.points.insert(data.points.end(), row.begin(), row.end());
    data.labels.push_back(label);
  }
  if (data.labels.empty()) throw std::runtime_error("load_dataset: " + path + ": empty dataset");
  return data;
}

void save_dataset(const std::string& path, const Dataset& data) {
  if (data.dim < 1 || data.points.size() != data.labels.size() * static_cast<std::size_t>(data.dim))
    throw std::domain_error("save_dataset: inconsistent dataset");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_dataset: cannot open " + path);
  char buf[64];
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    for (int j = 0; j < data.dim; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.points[i * data.dim + j]);
      out << buf << ',';
    }
    out << data.labels[i] << '\n';
  }
  if (!out) throw std::runtime_error("save_dataset: write failed for " + path);
}

} // namespace idrs
