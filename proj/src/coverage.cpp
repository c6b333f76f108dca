#include "fedcontract/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "fedcontract/errors.hpp"
#include "fedcontract/format.hpp"

namespace fedcontract {
namespace {

void check_unit_coords(std::span<const double> coords) {
  for (double v : coords)
    if (!(v >= 0.0 && v <= 1.0))
      throw DomainError("point coordinate " + format_double(v) + " outside [0,1]");
}

std::vector<double> nearest_sq(const PointCloud& cloud, std::size_t samples, std::uint64_t seed,
                               Backend backend) {
  return backend == Backend::serial
             ? kernels::nearest_sq_distances_serial(cloud, samples, seed)
             : kernels::nearest_sq_distances_parallel(cloud, samples, seed);
}

}  // namespace

PointCloud::PointCloud(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw DomainError("point cloud dimension must be positive");
}

PointCloud::PointCloud(std::size_t dimension, std::vector<double> coords)
    : dimension_(dimension), coords_(std::move(coords)) {
  if (dimension == 0) throw DomainError("point cloud dimension must be positive");
  if (coords_.size() % dimension != 0)
    throw ContractError("coordinate count is not a multiple of the dimension");
  check_unit_coords(coords_);
}

void PointCloud::add(std::span<const double> p) {
  if (p.size() != dimension_) throw ContractError("point dimension mismatch");
  check_unit_coords(p);
  coords_.insert(coords_.end(), p.begin(), p.end());
}

CoverageEstimate estimate_coverage(const PointCloud& cloud, double epsilon, std::size_t samples,
                                   std::uint64_t seed, Backend backend) {
  const double max_radius = std::sqrt(static_cast<double>(cloud.dimension()));
  if (!(epsilon >= 0.0 && epsilon <= max_radius))
    throw DomainError("epsilon " + format_double(epsilon) + " outside [0, sqrt(d)]");
  if (samples == 0) throw DomainError("sample count must be positive");

  CoverageEstimate est;
  est.sample_count = samples;
  if (cloud.empty()) return est;

  const double eps_sq = epsilon * epsilon;
  const auto dist = nearest_sq(cloud, samples, seed, backend);
  const auto hits = std::count_if(dist.begin(), dist.end(), [&](double v) { return v < eps_sq; });
  est.value = static_cast<double>(hits) / static_cast<double>(samples);
  est.standard_error = std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(samples));
  return est;
}

double coverage_quality(const PointCloud& cloud, std::size_t radius_steps,
                        std::size_t samples_per_step, std::uint64_t seed, Backend backend) {
  if (radius_steps < 2) throw DomainError("coverage quality needs at least two radius steps");
  if (samples_per_step == 0) throw DomainError("sample count must be positive");
  if (cloud.empty()) return 0.0;

  auto dist = nearest_sq(cloud, samples_per_step, seed, backend);
  std::sort(dist.begin(), dist.end());

  const double d = static_cast<double>(cloud.dimension());
  const double n = static_cast<double>(samples_per_step);
  const double intervals = static_cast<double>(radius_steps - 1);
  double sum = 0.0;
  for (std::size_t k = 0; k < radius_steps; ++k) {
    // ε_k² = d·(k/(m−1))²; the last node is exactly d.
    const double frac = static_cast<double>(k) / intervals;
    const double eps_sq = (k + 1 == radius_steps) ? d : d * frac * frac;
    const auto covered = std::lower_bound(dist.begin(), dist.end(), eps_sq) - dist.begin();
    const double mu = static_cast<double>(covered) / n;
    sum += (k == 0 || k + 1 == radius_steps) ? 0.5 * mu : mu;
  }
  return std::clamp(sum / intervals, 0.0, 1.0);
}

std::size_t classify_type(double theta, std::size_t type_count) {
  if (type_count == 0) throw DomainError("type count must be positive");
  if (!(theta >= 0.0 && theta <= 1.0))
    throw DomainError("theta " + format_double(theta) + " outside [0,1]");
  const auto bucket = static_cast<std::size_t>(std::floor(theta * static_cast<double>(type_count)));
  return std::min(bucket + 1, type_count);
}

std::size_t classify_type(double theta, std::span<const double> type_thetas) {
  if (type_thetas.empty()) throw DomainError("type table is empty");
  if (!(theta >= 0.0 && theta <= 1.0))
    throw DomainError("theta " + format_double(theta) + " outside [0,1]");
  std::size_t best = 0;
  for (std::size_t i = 1; i < type_thetas.size(); ++i)
    if (std::abs(type_thetas[i] - theta) < std::abs(type_thetas[best] - theta)) best = i;
  return best + 1;
}

void write_csv(std::ostream& out, const PointCloud& cloud) {
  for (std::size_t j = 0; j < cloud.dimension(); ++j) out << (j ? ",x" : "x") << j + 1;
  out << '\n';
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    for (std::size_t j = 0; j < p.size(); ++j) out << (j ? "," : "") << format_double(p[j]);
    out << '\n';
  }
}

PointCloud read_point_cloud_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ContractError("point cloud CSV is missing its header");
  std::size_t dimension = 0;
  {
    std::istringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      if (cell != "x" + std::to_string(dimension + 1))
        throw ContractError("unexpected CSV header column '" + cell + "'");
      ++dimension;
    }
  }
  PointCloud cloud(dimension);
  std::vector<double> row;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    row.clear();
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != dimension) throw ContractError("CSV row has the wrong number of columns");
    cloud.add(row);
  }
  return cloud;
}

}  // namespace fedcontract
