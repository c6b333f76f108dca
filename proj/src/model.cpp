#include "fedcontract/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "fedcontract/errors.hpp"
#include "fedcontract/random.hpp"

namespace fedcontract {
namespace {

struct Layer {
  std::size_t in, out, offset;  // weights at offset, biases right after
};

std::vector<Layer> layers_of(const Architecture& arch) {
  if (arch.hidden.size() > 1) throw ContractError("at most one hidden layer is supported");
  if (arch.input_dim == 0 || arch.classes < 2) throw ContractError("degenerate architecture");
  std::vector<Layer> layers;
  std::size_t in = arch.input_dim, offset = 0;
  auto push = [&](std::size_t out) {
    layers.push_back({in, out, offset});
    offset += out * in + out;
    in = out;
  };
  for (std::size_t h : arch.hidden) push(h);
  push(arch.classes);
  return layers;
}

// Forward pass; fills hidden activations (if any) and class probabilities.
void forward(const std::vector<Layer>& layers, const double* params, std::span<const double> x,
             std::vector<double>& hidden, std::vector<double>& probs) {
  std::span<const double> input = x;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& L = layers[l];
    const bool last = l + 1 == layers.size();
    auto& out = last ? probs : hidden;
    out.assign(L.out, 0.0);
    const double* w = params + L.offset;
    const double* b = w + L.out * L.in;
    for (std::size_t o = 0; o < L.out; ++o) {
      double z = b[o];
      for (std::size_t i = 0; i < L.in; ++i) z += w[o * L.in + i] * input[i];
      out[o] = last ? z : std::tanh(z);
    }
    input = hidden;
  }
  const double zmax = *std::max_element(probs.begin(), probs.end());
  double sum = 0.0;
  for (double& p : probs) sum += p = std::exp(p - zmax);
  for (double& p : probs) p /= sum;
}

void check_architecture(const ModelVector& model) {
  if (model.parameters.size() != model.architecture.parameter_count())
    throw ContractError("parameter vector length does not match its architecture");
}

}  // namespace

std::size_t Architecture::parameter_count() const {
  std::size_t n = 0;
  for (const auto& L : layers_of(*this)) n += L.out * L.in + L.out;
  return n;
}

ModelVector ModelVector::zeros(const Architecture& arch) {
  return {arch, std::vector<double>(arch.parameter_count(), 0.0)};
}

ModelVector ModelVector::random(const Architecture& arch, std::uint64_t seed, double scale) {
  ModelVector m = zeros(arch);
  Stream stream(seed, StreamPurpose::model_init);
  for (double& p : m.parameters) p = scale * (2.0 * stream.uniform() - 1.0);
  return m;
}

std::size_t predict(const ModelVector& model, std::span<const double> x) {
  check_architecture(model);
  if (x.size() != model.architecture.input_dim) throw ContractError("input dimension mismatch");
  const auto layers = layers_of(model.architecture);
  std::vector<double> hidden, probs;
  forward(layers, model.parameters.data(), x, hidden, probs);
  return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

double accuracy(const ModelVector& model, const LabeledCloud& data) {
  if (data.labels.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.labels.size(); ++i)
    correct += predict(model, data.points.point(i)) == data.labels[i];
  return static_cast<double>(correct) / static_cast<double>(data.labels.size());
}

double cross_entropy(const ModelVector& model, const LabeledCloud& data) {
  check_architecture(model);
  const auto layers = layers_of(model.architecture);
  std::vector<double> hidden, probs;
  double loss = 0.0;
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    forward(layers, model.parameters.data(), data.points.point(i), hidden, probs);
    loss -= std::log(std::max(probs[data.labels[i]], 1e-300));
  }
  return data.labels.empty() ? 0.0 : loss / static_cast<double>(data.labels.size());
}

ModelVector local_train(const ModelVector& model, const LabeledCloud& data, double effort,
                        std::size_t max_epochs, std::uint64_t seed, const TrainOptions& options) {
  if (effort < 0.0 || effort > 1.0) throw DomainError("effort outside [0,1]");
  check_architecture(model);
  const auto& arch = model.architecture;
  if (data.points.dimension() != arch.input_dim)
    throw ContractError("data dimension does not match the model architecture");
  if (data.labels.size() != data.points.size()) throw ContractError("label count mismatch");
  for (auto y : data.labels)
    if (y >= arch.classes) throw ContractError("label outside the model's class range");

  const auto epochs =
      static_cast<std::size_t>(std::llround(effort * static_cast<double>(max_epochs)));
  ModelVector out = model;
  if (epochs == 0 || data.labels.empty()) return out;

  const auto layers = layers_of(arch);
  const std::size_t n = data.labels.size();
  const std::size_t batch = std::max<std::size_t>(1, options.batch_size);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(out.parameters.size());
  std::vector<double> hidden, probs, delta_out, delta_hidden;
  Stream stream(seed, StreamPurpose::training);

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[stream.below(i)]);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t s = start; s < stop; ++s) {
        const auto x = data.points.point(order[s]);
        const std::size_t y = data.labels[order[s]];
        forward(layers, out.parameters.data(), x, hidden, probs);
        delta_out = probs;
        delta_out[y] -= 1.0;

        const auto& top = layers.back();
        std::span<const double> top_in = layers.size() == 1 ? x : std::span<const double>(hidden);
        double* gw = grad.data() + top.offset;
        double* gb = gw + top.out * top.in;
        for (std::size_t o = 0; o < top.out; ++o) {
          for (std::size_t i = 0; i < top.in; ++i) gw[o * top.in + i] += delta_out[o] * top_in[i];
          gb[o] += delta_out[o];
        }
        if (layers.size() == 2) {
          const auto& h = layers[0];
          const double* w2 = out.parameters.data() + top.offset;
          delta_hidden.assign(h.out, 0.0);
          for (std::size_t o = 0; o < top.out; ++o)
            for (std::size_t i = 0; i < top.in; ++i) delta_hidden[i] += w2[o * top.in + i] * delta_out[o];
          double* hw = grad.data() + h.offset;
          double* hb = hw + h.out * h.in;
          for (std::size_t u = 0; u < h.out; ++u) {
            const double dz = delta_hidden[u] * (1.0 - hidden[u] * hidden[u]);
            for (std::size_t i = 0; i < h.in; ++i) hw[u * h.in + i] += dz * x[i];
            hb[u] += dz;
          }
        }
      }
      const double step = options.learning_rate / static_cast<double>(stop - start);
      for (std::size_t p = 0; p < grad.size(); ++p) out.parameters[p] -= step * grad[p];
    }
  }
  return out;
}

ModelVector aggregate(std::span<const WeightedModel> models) {
  if (models.empty()) throw NoModelError("no models to aggregate");
  double total = 0.0;
  for (const auto& m : models) {
    check_architecture(*m.model);
    if (m.model->architecture != models[0].model->architecture)
      throw ContractError("cannot aggregate models with different architectures");
    if (m.weight < 0.0) throw ContractError("aggregation weight is negative");
    total += m.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ContractError("aggregation weights do not sum to 1");

  ModelVector out = ModelVector::zeros(models[0].model->architecture);
  for (const auto& m : models)
    for (std::size_t p = 0; p < out.parameters.size(); ++p)
      out.parameters[p] += m.weight * m.model->parameters[p];
  return out;
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw ContractError("truncated model file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void write_model_binary(std::ostream& out, const ModelVector& model) {
  put_u64(out, model.parameters.size());
  for (double p : model.parameters) put_u64(out, std::bit_cast<std::uint64_t>(p));
}

std::vector<double> read_model_binary(std::istream& in) {
  const auto n = get_u64(in);
  std::vector<double> params;
  params.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 20)));
  for (std::uint64_t i = 0; i < n; ++i) params.push_back(std::bit_cast<double>(get_u64(in)));
  return params;
}

}  // namespace fedcontract
