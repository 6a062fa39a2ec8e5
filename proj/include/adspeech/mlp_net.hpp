#pragma once

#include <span>
#include <vector>

#include "adspeech/models.hpp"
#include "adspeech/rng.hpp"

namespace adspeech {

/// One-hidden-layer fully connected network with sigmoid hidden units.
/// Exposed so the finite-difference gradient checker can drive forward and
/// backward passes directly.
struct MlpNet {
  Matrix w1;  // hidden x input
  std::vector<double> b1;
  Matrix w2;  // output x hidden
  std::vector<double> b2;
  bool linear_output = false;  // regression uses a linear output layer

  MlpNet(int inputs, int hidden, int outputs, bool linear, Rng& rng);
  MlpNet() = default;

  std::vector<double> forward(std::span<const double> x) const;

  /// Mean squared-error loss 1/(2n) sum ||o - t||^2 over the batch.
  double loss(const Matrix& x, const Matrix& targets) const;

  struct Gradients {
    Matrix w1;
    std::vector<double> b1;
    Matrix w2;
    std::vector<double> b2;
  };

  /// Analytic batch gradient of `loss`.
  Gradients gradients(const Matrix& x, const Matrix& targets) const;

  void flatten(std::vector<double*>& out);  // parameter views, fixed order
};

}  // namespace adspeech
