#include "crfve/coefficient.hpp"

#include <cmath>
#include <numbers>

#include "crfve/errors.hpp"

namespace crfve {

CoefficientField::CoefficientField(Base base, std::map<int, double> multipliers)
    : base_(std::move(base)), multipliers_(std::move(multipliers)) {
  for (const auto& [k, value] : multipliers_) {
    if (!(value > 0.0)) {
      throw InvalidParameter("coefficient multiplier for subdomain " + std::to_string(k) +
                             " must be positive");
    }
  }
}

double CoefficientField::multiplier(int subdomain) const {
  const auto it = multipliers_.find(subdomain);
  return it == multipliers_.end() ? 1.0 : it->second;
}

CoefficientField CoefficientField::constant(double value, std::map<int, double> multipliers) {
  if (!(value > 0.0)) throw InvalidParameter("constant coefficient must be positive");
  return CoefficientField([value](Point) { return value; }, std::move(multipliers));
}

CoefficientField make_oscillatory_coefficient(int freq, double alpha1,
                                              std::span<const int> red_mask) {
  if (!(alpha1 > 0.0)) throw InvalidParameter("alpha1 must be positive");
  if (freq <= 0) throw InvalidParameter("frequency must be a positive integer");
  const double w = freq * std::numbers::pi;
  std::map<int, double> multipliers;
  for (int k : red_mask) multipliers[k] = alpha1;
  CoefficientField field(
      [w](Point p) { return 2.0 + std::sin(w * p.x) * std::sin(w * p.y); },
      std::move(multipliers));
  field.frequency_ = freq;
  return field;
}

int preset_subdomains_per_side(const std::string& name) {
  if (name == "problem1" || name == "problem2") return 4;
  if (name == "problem3") return 32;
  throw InvalidParameter("unknown preset '" + name + "'");
}

std::vector<int> preset_mask(const std::string& name) {
  std::vector<int> mask;
  const int m = preset_subdomains_per_side(name);
  for (int sy = 0; sy < m; ++sy) {
    for (int sx = 0; sx < m; ++sx) {
      bool red = false;
      if (name == "problem1") {
        red = (sx + sy) % 2 == 0;  // checkerboard
      } else if (name == "problem2") {
        // central 2x2 block plus the four corners
        const bool centre = (sx == 1 || sx == 2) && (sy == 1 || sy == 2);
        const bool corner = (sx == 0 || sx == 3) && (sy == 0 || sy == 3);
        red = centre || corner;
      } else {
        // scattered: deterministic hash, roughly one subdomain in four
        red = ((sx * 7 + sy * 13 + (sx * sy) % 5) % 4) == 0;
      }
      if (red) mask.push_back(sy * m + sx);
    }
  }
  return mask;
}

}  // namespace crfve
