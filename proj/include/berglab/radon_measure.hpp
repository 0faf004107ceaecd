#pragma once

#include <functional>
#include <string>

namespace berglab::measure {

// Atomless positive measure on the t-line with total mass 2π, represented by
// its CDF (the pushforward of a Kähler form under t = log|z|² in the
// rotation-invariant model).  The density accessor is optional: it is empty
// when the measure is only known through its CDF.
struct RadonMeasure1D {
  std::function<double(double)> cdf;      // non-decreasing, 0 at -inf, 2π at +inf
  std::function<double(double)> density{};  // dF/dt where absolutely continuous
  std::string name = "measure";
};

}  // namespace berglab::measure
