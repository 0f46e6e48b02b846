#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "adversarl/core/rng.hpp"

namespace adversarl {

/// Fully connected network with tanh hidden layers and a linear output.
/// Inputs and outputs are column-major batches (features x batch).
class Mlp {
 public:
  struct Layer {
    Eigen::MatrixXd w;
    Eigen::VectorXd b;
  };

  /// Activations kept by forward() for backward().
  struct Cache {
    std::vector<Eigen::MatrixXd> inputs;  // input to each layer
  };

  struct Gradients {
    std::vector<Eigen::MatrixXd> dw;
    std::vector<Eigen::VectorXd> db;
    void zero_like(const Mlp& net);
  };

  Mlp() = default;
  /// sizes = {in, hidden..., out}. Fan-in uniform initialisation.
  Mlp(std::vector<int> sizes, Rng& rng, bool zero_output = false);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache* cache = nullptr) const;
  /// Returns dL/dx and overwrites `grads` with dL/dparams given dL/dy.
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& grad_out, Gradients& grads) const;

  std::size_t param_count() const;
  std::vector<double> flat_params() const;
  void set_flat_params(const std::vector<double>& p);
  static std::vector<double> flatten(const Gradients& g);

  const std::vector<int>& sizes() const noexcept { return sizes_; }
  std::vector<Layer>& layers() noexcept { return layers_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }

  void save(std::ostream& os) const;
  void load(std::istream& is);

 private:
  std::vector<int> sizes_;
  std::vector<Layer> layers_;
};

/// Plain SGD with heavy-ball momentum.
class SgdMomentum {
 public:
  SgdMomentum(const Mlp& net, double lr, double momentum);
  void step(Mlp& net, const Mlp::Gradients& g);

 private:
  double lr_;
  double momentum_;
  Mlp::Gradients velocity_;
};

/// target <- tau * online + (1 - tau) * target.
void soft_update(Mlp& target, const Mlp& online, double tau);

}  // namespace adversarl
