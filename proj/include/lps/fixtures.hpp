#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lps {

/// Bundled example equations. The same texts ship as files under fixtures/.
struct Fixture {
  std::string name;
  int order = 1;
  std::string text;
  int max_degree = 20;
  int power = 1;
  bool auto_denominator = false;
};

inline const std::vector<Fixture>& builtin_fixtures() {
  static const std::vector<Fixture> all = {
      {"eq5", 1,
       "y' = (3*y^10+18*x*y^6-9*x^2*y^3+2*x^3)/(y^2*(-63*y^10+51*x*y^7-7*x^2*y^4+9*x^3))", 15, 1, false},
      {"eq7", 2,
       "z' = (x^2*y^3*z-2*x*y^4*z+y^5*z-x^2*y^3+2*x*y^4-y^5+3*x^2*y*z-6*x*y^2*z+3*y^3*z+y^2*z-y^2+z)"
       "/((x-y)^2*(z-1)^(-2))",
       15, 1, false},
      {"eq8", 1,
       "y' = (-3*x^4*y^2-7*x^3*y^3+x^3*y-5*x^2*y^4+3*x^2*y^2-x*y^5+3*x*y^3+3*x*y+y^4+y^2+2)"
       "/(x^5*y+5*x^4*y^2-x^4+7*x^3*y^3-3*x^3*y+3*x^2*y^4-3*x^2*y^2-x^2-x*y^3-3*x*y-2)",
       20, 1, true},
      {"eq9", 1, "y' = -y^2*(x^2*y^4+y^3*x-1)/(2*x^3*y^5+x^2*y^4-2*y*x+1)", 20, 2, false},
  };
  return all;
}

inline std::optional<Fixture> find_fixture(std::string_view name) {
  for (const auto& f : builtin_fixtures())
    if (f.name == name) return f;
  return std::nullopt;
}

}  // namespace lps
