// A point lambda in R^d (or on the torus T^d) indexed by the edges of K_n.
#pragma once

#include <cmath>
#include <initializer_list>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phad/indexing.hpp"

namespace phad {

class TorusPoint {
 public:
  TorusPoint() = default;

  explicit TorusPoint(int n) : n_(Dimensions::of(n).n), coords_(static_cast<std::size_t>(edge_count(n)), 0.0) {}

  TorusPoint(int n, std::vector<double> coords) : n_(Dimensions::of(n).n), coords_(std::move(coords)) {
    if (static_cast<int>(coords_.size()) != edge_count(n))
      throw std::invalid_argument("TorusPoint: expected " + std::to_string(edge_count(n)) +
                                  " coordinates for n=" + std::to_string(n) + ", got " +
                                  std::to_string(coords_.size()));
  }

  TorusPoint(int n, std::initializer_list<double> coords)
      : TorusPoint(n, std::vector<double>(coords)) {}

  int n() const noexcept { return n_; }
  int d() const noexcept { return static_cast<int>(coords_.size()); }

  double operator[](int e) const { return coords_[static_cast<std::size_t>(e)]; }
  double& operator[](int e) { return coords_[static_cast<std::size_t>(e)]; }

  /// Coordinate of edge {i,j}, 1-based, either order.
  double at(int i, int j) const {
    return i < j ? (*this)[edge_index(i, j, n_)] : (*this)[edge_index(j, i, n_)];
  }

  std::span<const double> coords() const noexcept { return coords_; }

  /// s(lambda) = ||lambda||^2.
  double norm_sq() const noexcept {
    double s = 0.0;
    for (double x : coords_) s += x * x;
    return s;
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double x : coords_) m = std::max(m, std::abs(x));
    return m;
  }

  TorusPoint scaled(double c) const {
    TorusPoint out = *this;
    for (auto& x : out.coords_) x *= c;
    return out;
  }

  TorusPoint operator+(const TorusPoint& o) const {
    TorusPoint out = *this;
    for (int e = 0; e < d(); ++e) out[e] += o[e];
    return out;
  }

  TorusPoint operator-() const { return scaled(-1.0); }

  /// Symmetric zero-diagonal n x n matrix with A_ij = lambda_{e(i,j)}.
  Eigen::MatrixXd symmetric_matrix() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
    int e = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j, ++e) a(i, j) = a(j, i) = coords_[static_cast<std::size_t>(e)];
    return a;
  }

  static TorusPoint from_symmetric_matrix(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    TorusPoint out(n);
    int e = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j, ++e) out[e] = a(i, j);
    return out;
  }

 private:
  int n_ = 0;
  std::vector<double> coords_;
};

/// Reduces an angle to (-pi, pi], keeping pi itself.
inline double reduce_angle(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(x, two_pi);  // [-pi, pi]
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

}  // namespace phad
