#pragma once

#include <cmath>
#include <vector>

#include "pn2n/nn/tensor.hpp"

namespace pn2n::nn {

// Adam with per-group learning rates (beta1=0.9, beta2=0.999, eps=1e-8).
template <typename T>
class Adam {
 public:
  struct Group {
    std::vector<Param<T>> params;
    double lr = 1e-4;
  };

  explicit Adam(std::vector<Group> groups, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : groups_(std::move(groups)), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (auto& g : groups_) {
      for (auto& p : g.params) {
        if (!p.trainable || !p.grad) continue;
        m_.emplace_back(p.value->size(), 0.0);
        v_.emplace_back(p.value->size(), 0.0);
      }
    }
  }

  void step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    std::size_t slot = 0;
    for (auto& g : groups_) {
      for (auto& p : g.params) {
        if (!p.trainable || !p.grad) continue;
        auto& m = m_[slot];
        auto& v = v_[slot];
        ++slot;
        for (std::size_t i = 0; i < p.value->size(); ++i) {
          const double grad = static_cast<double>((*p.grad)[i]);
          m[i] = beta1_ * m[i] + (1.0 - beta1_) * grad;
          v[i] = beta2_ * v[i] + (1.0 - beta2_) * grad * grad;
          const double mhat = m[i] / bc1;
          const double vhat = v[i] / bc2;
          (*p.value)[i] -= static_cast<T>(g.lr * mhat / (std::sqrt(vhat) + eps_));
        }
      }
    }
  }

  long steps_taken() const { return t_; }

 private:
  std::vector<Group> groups_;
  double beta1_, beta2_, eps_;
  long t_ = 0;
  // first-/second-moment state in double for stable accumulation
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace pn2n::nn
