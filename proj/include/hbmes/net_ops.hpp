#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hbmes/errors.hpp"
#include "hbmes/net.hpp"
#include "hbmes/rng.hpp"

namespace hbmes {

inline std::vector<double> softmax(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  std::vector<double> out(v.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    out[k] = std::exp(v[k] - m);
    sum += out[k];
  }
  for (double& x : out) x /= sum;
  return out;
}

// Relaxed categorical sample: softmax((logits + noise) / temperature) with
// caller-provided Gumbel noise. Split out so tests can disable the noise.
inline std::vector<double> gumbel_softmax_with_noise(const std::vector<double>& logits,
                                                     const std::vector<double>& noise,
                                                     double temperature) {
  if (temperature <= 0.0) throw ValidationError("Gumbel-Softmax temperature must be > 0");
  if (noise.size() != logits.size()) throw ShapeError("noise size must match logits");
  std::vector<double> scaled(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) {
    scaled[k] = (logits[k] + noise[k]) / temperature;
  }
  return softmax(scaled);
}

inline std::vector<double> sample_gumbel_noise(std::size_t n, Rng& rng) {
  std::vector<double> g(n);
  for (double& v : g) v = rng.gumbel();
  return g;
}

inline std::vector<double> gumbel_softmax(const std::vector<double>& logits,
                                          double temperature, Rng& rng) {
  return gumbel_softmax_with_noise(logits, sample_gumbel_noise(logits.size(), rng),
                                   temperature);
}

inline std::size_t argmax_index(const std::vector<double>& v) {
  if (v.empty()) throw ValidationError("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k] > v[best]) best = k;  // ties resolve to the lowest index
  }
  return best;
}

inline std::vector<double> one_hot(std::size_t index, std::size_t n) {
  std::vector<double> v(n, 0.0);
  v.at(index) = 1.0;
  return v;
}

inline std::vector<double> one_hot_argmax(const std::vector<double>& v) {
  return one_hot(argmax_index(v), v.size());
}

// target <- rho * source + (1 - rho) * target
inline void soft_update(std::vector<double>& target, const std::vector<double>& source,
                        double rho) {
  if (target.size() != source.size()) throw ShapeError("soft_update: size mismatch");
  for (std::size_t k = 0; k < target.size(); ++k) {
    target[k] = rho * source[k] + (1.0 - rho) * target[k];
  }
}

inline void soft_update(DenseNet& target, const DenseNet& source, double rho) {
  if (target.sizes != source.sizes) throw ShapeError("soft_update: net shapes differ");
  for (std::size_t l = 0; l < target.layer_count(); ++l) {
    soft_update(target.weights[l], source.weights[l], rho);
    soft_update(target.biases[l], source.biases[l], rho);
  }
}

// Adaptive-moment optimizer state for one DenseNet.
struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t step = 0;
  std::vector<std::vector<double>> m_w, v_w, m_b, v_b;

  static AdamState for_net(const DenseNet& net, double lr) {
    AdamState s;
    s.lr = lr;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      s.m_w.emplace_back(net.weights[l].size(), 0.0);
      s.v_w.emplace_back(net.weights[l].size(), 0.0);
      s.m_b.emplace_back(net.biases[l].size(), 0.0);
      s.v_b.emplace_back(net.biases[l].size(), 0.0);
    }
    return s;
  }
};

namespace detail {
inline void adam_apply(std::vector<double>& params, const std::vector<double>& grad,
                       std::vector<double>& m, std::vector<double>& v,
                       const AdamState& s, double bc1, double bc2) {
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double g = grad[k];
    if (!std::isfinite(g)) throw DivergenceError("non-finite gradient in optimizer step");
    m[k] = s.beta1 * m[k] + (1.0 - s.beta1) * g;
    v[k] = s.beta2 * v[k] + (1.0 - s.beta2) * g * g;
    const double mhat = m[k] / bc1;
    const double vhat = v[k] / bc2;
    params[k] -= s.lr * mhat / (std::sqrt(vhat) + s.eps);
  }
}
}  // namespace detail

// One bias-corrected descent step on every parameter of the net.
inline void adam_step(AdamState& opt, DenseNet& net, const NetGradients& grads) {
  if (opt.m_w.size() != net.layer_count()) throw ShapeError("optimizer/net layer mismatch");
  opt.step += 1;
  const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
  const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    if (grads.weights[l].size() != net.weights[l].size()) {
      throw ShapeError("gradient/parameter shape mismatch");
    }
    detail::adam_apply(net.weights[l], grads.weights[l], opt.m_w[l], opt.v_w[l], opt, bc1, bc2);
    detail::adam_apply(net.biases[l], grads.biases[l], opt.m_b[l], opt.v_b[l], opt, bc1, bc2);
  }
}

}  // namespace hbmes
