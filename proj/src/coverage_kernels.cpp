#include <algorithm>
#include <limits>

#include "fedcontract/coverage.hpp"

namespace fedcontract::kernels {
namespace {

void fill_block(std::size_t dimension, std::size_t block, std::size_t count, std::uint64_t seed,
                double* out) {
  Stream stream(seed, StreamPurpose::coverage_samples, block);
  for (std::size_t k = 0; k < count * dimension; ++k) out[k] = stream.uniform();
}

double nearest_sq(const PointCloud& cloud, const double* x) {
  const std::size_t d = cloud.dimension();
  const double* p = cloud.coords().data();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, n = cloud.size(); i < n; ++i, p += d) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = p[j] - x[j];
      acc += diff * diff;
    }
    best = std::min(best, acc);
  }
  return best;
}

void process_block(const PointCloud& cloud, std::size_t block, std::size_t samples,
                   std::uint64_t seed, double* scratch, double* out) {
  const std::size_t d = cloud.dimension();
  const std::size_t first = block * kSampleBlock;
  const std::size_t count = std::min(kSampleBlock, samples - first);
  fill_block(d, block, count, seed, scratch);
  for (std::size_t k = 0; k < count; ++k) out[first + k] = nearest_sq(cloud, scratch + k * d);
}

std::size_t block_count(std::size_t samples) { return (samples + kSampleBlock - 1) / kSampleBlock; }

}  // namespace

std::vector<double> uniform_samples(std::size_t dimension, std::size_t samples,
                                    std::uint64_t seed) {
  std::vector<double> out(samples * dimension);
  for (std::size_t b = 0, nb = block_count(samples); b < nb; ++b) {
    const std::size_t first = b * kSampleBlock;
    fill_block(dimension, b, std::min(kSampleBlock, samples - first), seed,
               out.data() + first * dimension);
  }
  return out;
}

std::vector<double> nearest_sq_distances_serial(const PointCloud& cloud, std::size_t samples,
                                                std::uint64_t seed) {
  std::vector<double> out(samples);
  std::vector<double> scratch(kSampleBlock * cloud.dimension());
  for (std::size_t b = 0, nb = block_count(samples); b < nb; ++b)
    process_block(cloud, b, samples, seed, scratch.data(), out.data());
  return out;
}

std::vector<double> nearest_sq_distances_parallel(const PointCloud& cloud, std::size_t samples,
                                                  std::uint64_t seed) {
  std::vector<double> out(samples);
  const auto nb = static_cast<std::ptrdiff_t>(block_count(samples));
#pragma omp parallel
  {
    std::vector<double> scratch(kSampleBlock * cloud.dimension());
#pragma omp for schedule(static)
    for (std::ptrdiff_t b = 0; b < nb; ++b)
      process_block(cloud, static_cast<std::size_t>(b), samples, seed, scratch.data(),
                    out.data());
  }
  return out;
}

}  // namespace fedcontract::kernels
