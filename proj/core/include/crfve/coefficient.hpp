#ifndef CRFVE_COEFFICIENT_HPP_
#define CRFVE_COEFFICIENT_HPP_

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "crfve/mesh.hpp"

namespace crfve {

using Tensor2 = Eigen::Matrix2d;

// Scalar isotropic coefficient A(x) = multiplier_k * base(x) on subdomain k.
// Subdomains without an explicit multiplier use 1.
class CoefficientField {
 public:
  using Base = std::function<double(Point)>;

  CoefficientField(Base base, std::map<int, double> multipliers = {});

  double eval(int subdomain, Point p) const { return multiplier(subdomain) * base_(p); }
  Tensor2 tensor(int subdomain, Point p) const { return eval(subdomain, p) * Tensor2::Identity(); }

  double base(Point p) const { return base_(p); }
  double multiplier(int subdomain) const;
  const std::map<int, double>& multipliers() const { return multipliers_; }

  // Nonzero only for the oscillatory fields; 0 means the base is user-supplied.
  int frequency() const { return frequency_; }

  static CoefficientField constant(double value, std::map<int, double> multipliers = {});

 private:
  friend CoefficientField make_oscillatory_coefficient(int, double, std::span<const int>);
  Base base_;
  std::map<int, double> multipliers_;
  int frequency_ = 0;
};

// base = 2 + sin(freq*pi*x) sin(freq*pi*y); multiplier alpha1 on the masked
// subdomains and 1 elsewhere.
CoefficientField make_oscillatory_coefficient(int freq, double alpha1,
                                              std::span<const int> red_mask);

// Reconstructed red-subdomain layouts for the named test problems
// ("problem1", "problem2" on a 4x4 coarse grid, "problem3" on 32x32). These are
// illustrative layouts, not authoritative ones.
std::vector<int> preset_mask(const std::string& name);
int preset_subdomains_per_side(const std::string& name);

}  // namespace crfve

#endif  // CRFVE_COEFFICIENT_HPP_
