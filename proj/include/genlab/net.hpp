#pragma once

// Two-layer scalar-output networks F(x) = sum_i a_i s(<w_i, x> + b_i) + c
// with every parameter confined to [-1, 1]. Units carry a replication
// count so that constructions which duplicate units exactly (splitting,
// replication, merging) stay cheap: k identical units are one stored row
// with count k. Counts are part of the function, not a compression trick:
// width and evaluation both honor them.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "genlab/error.hpp"
#include "genlab/rng.hpp"

namespace genlab {

enum class Activation { kRelu, kSinePi, kIdentity };

inline const char* activation_name(Activation a) {
  switch (a) {
    case Activation::kRelu: return "relu";
    case Activation::kSinePi: return "sinepi";
    case Activation::kIdentity: return "identity";
  }
  return "?";
}

template <typename Scalar>
Scalar activation_value(Activation a, Scalar z) {
  switch (a) {
    case Activation::kRelu: return z > Scalar(0) ? z : Scalar(0);
    case Activation::kSinePi: return std::sin(std::numbers::pi_v<Scalar> * z);
    case Activation::kIdentity: return z;
  }
  return Scalar(0);
}

// Subgradient convention at the ReLU kink: derivative 0 at z == 0.
template <typename Scalar>
Scalar activation_slope(Activation a, Scalar z) {
  switch (a) {
    case Activation::kRelu: return z > Scalar(0) ? Scalar(1) : Scalar(0);
    case Activation::kSinePi:
      return std::numbers::pi_v<Scalar> *
             std::cos(std::numbers::pi_v<Scalar> * z);
    case Activation::kIdentity: return Scalar(1);
  }
  return Scalar(0);
}

inline double activation_lipschitz(Activation a) {
  switch (a) {
    case Activation::kRelu: return 1.0;
    case Activation::kSinePi: return std::numbers::pi;
    case Activation::kIdentity: return 1.0;
  }
  return 1.0;
}

template <typename Scalar = double>
struct TwoLayerNetT {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix weights;                     // stored_rows x n
  Vector biases;                      // stored_rows
  Vector outer;                       // stored_rows
  std::vector<std::uint64_t> counts;  // stored_rows, all >= 1
  Scalar outer_bias = Scalar(0);
  Activation act = Activation::kRelu;

  TwoLayerNetT() = default;

  TwoLayerNetT(Eigen::Index input_dim, Eigen::Index stored_rows,
               Activation activation)
      : weights(Matrix::Zero(stored_rows, input_dim)),
        biases(Vector::Zero(stored_rows)),
        outer(Vector::Zero(stored_rows)),
        counts(static_cast<std::size_t>(stored_rows), 1),
        act(activation) {
    require(input_dim >= 1, "net: input dimension must be positive");
    require(stored_rows >= 0, "net: row count must be nonnegative");
  }

  Eigen::Index input_dim() const { return weights.cols(); }
  Eigen::Index stored_rows() const { return weights.rows(); }

  // Width counts every replicated copy.
  std::uint64_t width() const {
    std::uint64_t w = 0;
    for (std::uint64_t c : counts) w += c;
    return w;
  }

  double width_real() const { return static_cast<double>(width()); }

  void append_unit(Scalar a, const Vector& w, Scalar b,
                   std::uint64_t count = 1) {
    require(count >= 1, "net: unit count must be >= 1");
    require(stored_rows() == 0 || w.size() == input_dim(),
            "net: unit dimension mismatch");
    const Eigen::Index r = stored_rows();
    weights.conservativeResize(r + 1, w.size());
    weights.row(r) = w.transpose();
    biases.conservativeResize(r + 1);
    biases[r] = b;
    outer.conservativeResize(r + 1);
    outer[r] = a;
    counts.push_back(count);
  }

  Vector effective_outer() const {
    Vector eo(stored_rows());
    for (Eigen::Index i = 0; i < stored_rows(); ++i)
      eo[i] = outer[i] * static_cast<Scalar>(counts[static_cast<std::size_t>(i)]);
    return eo;
  }

  Vector preactivations(const Vector& x) const {
    return weights * x + biases;
  }

  Scalar eval(const Vector& x) const {
    require(x.size() == input_dim(), "net: input dimension mismatch");
    if (stored_rows() == 0) return outer_bias;
    Vector z = preactivations(x);
    for (Eigen::Index i = 0; i < z.size(); ++i)
      z[i] = activation_value(act, z[i]);
    return effective_outer().dot(z) + outer_bias;
  }

  // Batch evaluation; rows of X are inputs.
  Vector eval_batch(const Matrix& X) const {
    require(X.cols() == input_dim(), "net: batch dimension mismatch");
    if (stored_rows() == 0)
      return Vector::Constant(X.rows(), outer_bias);
    Matrix Z = (X * weights.transpose()).rowwise() + biases.transpose();
    if (act == Activation::kRelu) {
      Z = Z.cwiseMax(Scalar(0));
    } else {
      for (Eigen::Index j = 0; j < Z.size(); ++j)
        Z.data()[j] = activation_value(act, Z.data()[j]);
    }
    return (Z * effective_outer()).array() + outer_bias;
  }

  // Gradient of F at x with respect to the input.
  Vector input_gradient(const Vector& x) const {
    Vector z = preactivations(x);
    for (Eigen::Index i = 0; i < z.size(); ++i)
      z[i] = activation_slope(act, z[i]);
    return weights.transpose() * (effective_outer().cwiseProduct(z));
  }
};

using TwoLayerNet = TwoLayerNetT<double>;

// Decision rule: sign with ties sent to +1.
inline int sign_decision(double value) { return value >= 0.0 ? 1 : -1; }

template <typename Scalar>
double margin(const TwoLayerNetT<Scalar>& net,
              const typename TwoLayerNetT<Scalar>::Vector& x, int y) {
  require(y == 1 || y == -1, "margin: label must be +-1");
  return static_cast<double>(y) * static_cast<double>(net.eval(x));
}

template <typename Scalar>
bool box_constrained(const TwoLayerNetT<Scalar>& net, double tol = 0.0) {
  const double limit = 1.0 + tol;
  if (std::abs(static_cast<double>(net.outer_bias)) > limit) return false;
  for (Eigen::Index i = 0; i < net.stored_rows(); ++i) {
    if (std::abs(static_cast<double>(net.outer[i])) > limit) return false;
    if (std::abs(static_cast<double>(net.biases[i])) > limit) return false;
  }
  return net.stored_rows() == 0 ||
         net.weights.cwiseAbs().maxCoeff() <= limit;
}

template <typename Scalar>
TwoLayerNetT<Scalar> random_net(Eigen::Index input_dim, Eigen::Index rows,
                                Activation act, Scalar scale, Rng& rng) {
  require(scale >= Scalar(0) && scale <= Scalar(1),
          "random_net: scale must lie in [0,1]");
  TwoLayerNetT<Scalar> net(input_dim, rows, act);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < input_dim; ++j)
      net.weights(i, j) = static_cast<Scalar>(rng.uniform(-scale, scale));
    net.biases[i] = static_cast<Scalar>(rng.uniform(-scale, scale));
    net.outer[i] = static_cast<Scalar>(rng.uniform(-scale, scale));
  }
  net.outer_bias = static_cast<Scalar>(rng.uniform(-scale, scale));
  return net;
}

}  // namespace genlab
