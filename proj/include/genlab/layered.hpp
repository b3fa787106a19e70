#pragma once

// Multi-layer feedforward nets. Only needed to host the exact clamp
// construction and the complexity bookkeeping attached to it, so the type
// stays deliberately small: hidden (affine, activation) pairs plus a
// final affine output row.

#include <Eigen/Dense>

#include <vector>

#include "genlab/error.hpp"
#include "genlab/net.hpp"

namespace genlab {

struct LayeredNet {
  struct Layer {
    Eigen::MatrixXd weights;
    Eigen::VectorXd biases;
    Activation act = Activation::kRelu;
  };

  std::vector<Layer> hidden;
  Eigen::RowVectorXd out_weights;
  double out_bias = 0.0;

  // Layer count including the affine output layer.
  int depth() const { return static_cast<int>(hidden.size()) + 1; }

  double eval(const Eigen::VectorXd& x) const {
    Eigen::VectorXd h = x;
    for (const Layer& layer : hidden) {
      require(layer.weights.cols() == h.size(),
              "layered net: dimension mismatch between layers");
      Eigen::VectorXd z = layer.weights * h + layer.biases;
      for (Eigen::Index i = 0; i < z.size(); ++i)
        z[i] = activation_value(layer.act, z[i]);
      h = std::move(z);
    }
    require(out_weights.size() == h.size(),
            "layered net: output dimension mismatch");
    return out_weights.dot(h) + out_bias;
  }
};

// Largest row-wise l1 norm of (weights | biases); the per-layer quantity
// the composed complexity estimate multiplies together.
inline double layer_row_norm(const Eigen::MatrixXd& weights,
                             const Eigen::VectorXd& biases) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < weights.rows(); ++i)
    best = std::max(best,
                    weights.row(i).cwiseAbs().sum() + std::abs(biases[i]));
  return best;
}

// l1 norm of the output row. The final output shift is excluded: the
// complexity measure is invariant under output shifts.
inline double output_row_norm(const LayeredNet& net) {
  return net.out_weights.cwiseAbs().sum();
}

inline std::vector<double> hidden_layer_norms(const LayeredNet& net) {
  std::vector<double> norms;
  norms.reserve(net.hidden.size());
  for (const auto& layer : net.hidden)
    norms.push_back(layer_row_norm(layer.weights, layer.biases));
  return norms;
}

}  // namespace genlab
