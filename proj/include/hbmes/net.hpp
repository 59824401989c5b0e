#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "hbmes/csvio.hpp"
#include "hbmes/errors.hpp"
#include "hbmes/rng.hpp"

namespace hbmes {

// Fully-connected network: rectifier hidden layers, identity output head.
// Weights are row-major (output index major), 64-bit floats throughout.
struct DenseNet {
  std::vector<std::size_t> sizes;            // input, hidden..., output
  std::vector<std::vector<double>> weights;  // layer l: sizes[l+1] x sizes[l]
  std::vector<std::vector<double>> biases;   // layer l: sizes[l+1]

  std::size_t layer_count() const { return sizes.size() - 1; }
  std::size_t input_size() const { return sizes.front(); }
  std::size_t output_size() const { return sizes.back(); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
      n += sizes[l] * sizes[l + 1] + sizes[l + 1];
    }
    return n;
  }
};

// Weight init: uniform in +-1/sqrt(fan_in), biases zero.
inline DenseNet make_net(std::vector<std::size_t> sizes, Rng& rng) {
  if (sizes.size() < 2) throw ConfigError("a net needs at least input and output sizes");
  for (std::size_t s : sizes) {
    if (s == 0) throw ConfigError("layer sizes must be positive");
  }
  DenseNet net;
  net.sizes = std::move(sizes);
  for (std::size_t l = 0; l + 1 < net.sizes.size(); ++l) {
    const std::size_t fan_in = net.sizes[l];
    const std::size_t fan_out = net.sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::vector<double> w(fan_in * fan_out);
    for (double& v : w) v = rng.uniform(-bound, bound);
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(fan_out, 0.0);
  }
  return net;
}

// Activations kept from a forward pass, needed to run backward.
struct ForwardCache {
  // acts[0] is the input; acts[l+1] is layer l's post-activation output.
  std::vector<std::vector<double>> acts;
};

inline std::vector<double> forward_cached(const DenseNet& net,
                                          const std::vector<double>& x,
                                          ForwardCache& cache) {
  if (x.size() != net.input_size()) {
    throw ShapeError("forward: input size " + std::to_string(x.size()) +
                     " != " + std::to_string(net.input_size()));
  }
  cache.acts.assign(1, x);
  const std::size_t layers = net.layer_count();
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = net.sizes[l];
    const std::size_t out = net.sizes[l + 1];
    const auto& prev = cache.acts.back();
    std::vector<double> next(out);
    const double* w = net.weights[l].data();
    for (std::size_t o = 0; o < out; ++o) {
      double acc = net.biases[l][o];
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) acc += row[i] * prev[i];
      next[o] = (l + 1 < layers && acc < 0.0) ? 0.0 : acc;  // rectifier on hidden
    }
    cache.acts.push_back(std::move(next));
  }
  return cache.acts.back();
}

inline std::vector<double> forward(const DenseNet& net, const std::vector<double>& x) {
  ForwardCache cache;
  return forward_cached(net, x, cache);
}

struct NetGradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  std::vector<double> input;  // gradient w.r.t. the network input

  static NetGradients zeros_like(const DenseNet& net) {
    NetGradients g;
    for (std::size_t l = 0; l + 1 < net.sizes.size(); ++l) {
      g.weights.emplace_back(net.sizes[l] * net.sizes[l + 1], 0.0);
      g.biases.emplace_back(net.sizes[l + 1], 0.0);
    }
    g.input.assign(net.input_size(), 0.0);
    return g;
  }

  void accumulate(const NetGradients& other) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
      for (std::size_t k = 0; k < weights[l].size(); ++k) weights[l][k] += other.weights[l][k];
      for (std::size_t k = 0; k < biases[l].size(); ++k) biases[l][k] += other.biases[l][k];
    }
    for (std::size_t k = 0; k < input.size(); ++k) input[k] += other.input[k];
  }

  void scale(double f) {
    for (auto& layer : weights) {
      for (double& v : layer) v *= f;
    }
    for (auto& layer : biases) {
      for (double& v : layer) v *= f;
    }
    for (double& v : input) v *= f;
  }
};

namespace detail {
inline void check_backward_args(const DenseNet& net, const ForwardCache& cache,
                                const std::vector<double>& upstream) {
  if (cache.acts.size() != net.layer_count() + 1) {
    throw StateError("backward called without a matching forward cache");
  }
  if (upstream.size() != net.output_size()) {
    throw ShapeError("backward: upstream size does not match output size");
  }
}
}  // namespace detail

// Exact reverse-mode gradients of the forward map for the given upstream
// gradient on the output, added into `g`. Requires the cache produced by
// forward_cached.
inline void backward_accumulate(const DenseNet& net, const ForwardCache& cache,
                                const std::vector<double>& upstream, NetGradients& g) {
  detail::check_backward_args(net, cache, upstream);
  std::vector<double> delta = upstream;
  for (std::size_t l = net.layer_count(); l-- > 0;) {
    const std::size_t in = net.sizes[l];
    const std::size_t out = net.sizes[l + 1];
    const auto& layer_in = cache.acts[l];
    const auto& layer_out = cache.acts[l + 1];
    // Hidden layers: zero the signal where the rectifier was inactive.
    if (l != net.layer_count() - 1) {
      for (std::size_t o = 0; o < out; ++o) {
        if (layer_out[o] <= 0.0) delta[o] = 0.0;
      }
    }
    auto& dw = g.weights[l];
    auto& db = g.biases[l];
    const double* w = net.weights[l].data();
    std::vector<double> prev_delta(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      db[o] += d;
      if (d != 0.0) {
        double* dw_row = dw.data() + o * in;
        const double* w_row = w + o * in;
        for (std::size_t i = 0; i < in; ++i) {
          dw_row[i] += d * layer_in[i];
          prev_delta[i] += d * w_row[i];
        }
      }
    }
    delta = std::move(prev_delta);
  }
  for (std::size_t i = 0; i < delta.size(); ++i) g.input[i] += delta[i];
}

inline NetGradients backward(const DenseNet& net, const ForwardCache& cache,
                             const std::vector<double>& upstream) {
  NetGradients g = NetGradients::zeros_like(net);
  backward_accumulate(net, cache, upstream, g);
  return g;
}

// Gradient w.r.t. the input only; skips all parameter gradients.
inline std::vector<double> backward_input(const DenseNet& net, const ForwardCache& cache,
                                          const std::vector<double>& upstream) {
  detail::check_backward_args(net, cache, upstream);
  std::vector<double> delta = upstream;
  for (std::size_t l = net.layer_count(); l-- > 0;) {
    const std::size_t in = net.sizes[l];
    const std::size_t out = net.sizes[l + 1];
    const auto& layer_out = cache.acts[l + 1];
    if (l != net.layer_count() - 1) {
      for (std::size_t o = 0; o < out; ++o) {
        if (layer_out[o] <= 0.0) delta[o] = 0.0;
      }
    }
    const double* w = net.weights[l].data();
    std::vector<double> prev_delta(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      if (d != 0.0) {
        const double* w_row = w + o * in;
        for (std::size_t i = 0; i < in; ++i) prev_delta[i] += d * w_row[i];
      }
    }
    delta = std::move(prev_delta);
  }
  return delta;
}

// --- checkpoint text layout -------------------------------------------------
//
//   net <k> <size_1> ... <size_k>
//   <weights of layer 1, row-major> <biases of layer 1> <weights of layer 2> ...
//
// Values use the shortest decimal form that round-trips the exact double, so
// save/load is lossless and byte-stable across runs.

inline void write_net(std::string& out, const DenseNet& net) {
  out += "net " + std::to_string(net.sizes.size());
  for (std::size_t s : net.sizes) out += ' ' + std::to_string(s);
  out += '\n';
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    for (double v : net.weights[l]) {
      out += format_double(v);
      out += ' ';
    }
    for (double v : net.biases[l]) {
      out += format_double(v);
      out += ' ';
    }
    out += '\n';
  }
}

inline DenseNet read_net(std::istringstream& in) {
  std::string tag;
  in >> tag;
  if (tag != "net") throw ValidationError("checkpoint: expected 'net', got '" + tag + "'");
  std::size_t k = 0;
  in >> k;
  if (!in || k < 2) throw ValidationError("checkpoint: bad layer count");
  DenseNet net;
  net.sizes.resize(k);
  for (auto& s : net.sizes) {
    in >> s;
    if (!in || s == 0) throw ValidationError("checkpoint: bad layer size");
  }
  for (std::size_t l = 0; l + 1 < k; ++l) {
    std::vector<double> w(net.sizes[l] * net.sizes[l + 1]);
    std::vector<double> b(net.sizes[l + 1]);
    std::string tok;
    for (double& v : w) {
      in >> tok;
      v = parse_double(tok, "checkpoint weight");
    }
    for (double& v : b) {
      in >> tok;
      v = parse_double(tok, "checkpoint bias");
    }
    if (!in) throw ValidationError("checkpoint: truncated parameter block");
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

}  // namespace hbmes
