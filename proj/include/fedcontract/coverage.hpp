#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "fedcontract/random.hpp"

namespace fedcontract {

/// A finite set of points in the unit feature space [0,1]^d, row-major.
class PointCloud {
public:
  explicit PointCloud(std::size_t dimension);
  PointCloud(std::size_t dimension, std::vector<double> coords);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return coords_.size() / dimension_; }
  bool empty() const noexcept { return coords_.empty(); }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dimension_, dimension_};
  }
  std::span<const double> coords() const noexcept { return coords_; }

  void add(std::span<const double> p);

  bool operator==(const PointCloud&) const = default;

private:
  std::size_t dimension_;
  std::vector<double> coords_;
};

struct CoverageEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::size_t sample_count = 0;
};

namespace kernels {

/// Samples per independently seeded block of the Monte Carlo stream.
inline constexpr std::size_t kSampleBlock = 1024;

/// Squared distance from each of `samples` uniform draws in [0,1]^d to the
/// nearest point of `cloud` (+inf for an empty cloud). Draw k depends only on
/// (seed, k / kSampleBlock), never on the cloud or the thread count.
std::vector<double> nearest_sq_distances_serial(const PointCloud& cloud, std::size_t samples,
                                                std::uint64_t seed);
std::vector<double> nearest_sq_distances_parallel(const PointCloud& cloud, std::size_t samples,
                                                  std::uint64_t seed);

/// Writes the uniform draws themselves, row-major, for oracles and tests.
std::vector<double> uniform_samples(std::size_t dimension, std::size_t samples,
                                    std::uint64_t seed);

}  // namespace kernels

/// Monte Carlo estimate of the fraction of [0,1]^d lying strictly within
/// `epsilon` of some point of `cloud`.
CoverageEstimate estimate_coverage(const PointCloud& cloud, double epsilon, std::size_t samples,
                                   std::uint64_t seed, Backend backend = Backend::parallel);

/// Data-coverage quality: the ε-coverage averaged over ε ∈ [0, √d], integrated
/// with the composite trapezoid rule on `radius_steps` equally spaced radii.
/// One common sample set is shared by every radius.
double coverage_quality(const PointCloud& cloud, std::size_t radius_steps,
                        std::size_t samples_per_step, std::uint64_t seed,
                        Backend backend = Backend::parallel);

/// Bucket rule over I equal-width intervals. Shared boundaries go to the
/// higher bucket; theta == 1 maps to I. Returns a 1-based type index.
std::size_t classify_type(double theta, std::size_t type_count);

/// Explicit type-table mode: the 1-based index of the table entry nearest to
/// theta (lower index on exact ties).
std::size_t classify_type(double theta, std::span<const double> type_thetas);

/// CSV with a header row x1,...,xd and one point per line.
void write_csv(std::ostream& out, const PointCloud& cloud);
PointCloud read_point_cloud_csv(std::istream& in);

}  // namespace fedcontract
