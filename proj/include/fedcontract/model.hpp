#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "fedcontract/coverage.hpp"

namespace fedcontract {

/// Classifier shape. No hidden layer gives multinomial logistic regression;
/// one hidden layer gives a tanh perceptron.
struct Architecture {
  std::size_t input_dim = 1;
  std::vector<std::size_t> hidden;
  std::size_t classes = 2;

  std::size_t parameter_count() const;
  bool operator==(const Architecture&) const = default;
};

/// Flat parameter vector tagged with its architecture. Layout per layer:
/// weights (out × in, row-major) then biases (out).
struct ModelVector {
  Architecture architecture;
  std::vector<double> parameters;

  static ModelVector zeros(const Architecture& arch);
  /// Uniform in [−scale, scale].
  static ModelVector random(const Architecture& arch, std::uint64_t seed, double scale);

  bool operator==(const ModelVector&) const = default;
};

/// Points with 0-based class labels.
struct LabeledCloud {
  PointCloud points;
  std::vector<std::size_t> labels;
};

std::size_t predict(const ModelVector& model, std::span<const double> x);
double accuracy(const ModelVector& model, const LabeledCloud& data);
/// Mean softmax cross-entropy.
double cross_entropy(const ModelVector& model, const LabeledCloud& data);

struct TrainOptions {
  double learning_rate = 0.5;
  std::size_t batch_size = 16;
};

/// round(effort·max_epochs) epochs of shuffled mini-batch gradient descent on
/// softmax cross-entropy. Zero epochs returns the input unchanged.
ModelVector local_train(const ModelVector& model, const LabeledCloud& data, double effort,
                        std::size_t max_epochs, std::uint64_t seed, const TrainOptions& options = {});

struct WeightedModel {
  const ModelVector* model;
  double weight;
};

/// Component-wise weighted mean, accumulated in input order. Weights must sum
/// to 1 within 1e-9 and every architecture must match.
ModelVector aggregate(std::span<const WeightedModel> models);

/// Little-endian u64 parameter count followed by that many little-endian
/// IEEE-754 doubles.
void write_model_binary(std::ostream& out, const ModelVector& model);
std::vector<double> read_model_binary(std::istream& in);

}  // namespace fedcontract
