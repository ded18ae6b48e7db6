// Copyright 2026 The Heatcast Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HEATCAST_NUMERICS_HPP_
#define HEATCAST_NUMERICS_HPP_

#include <cmath>

namespace heatcast
{

// Compensated (double-double) accumulation built from the classic error-free
// transforms. Centroid updates divide two weighted sums whose common scale
// factor must cancel; accumulating both sums this way keeps the quotient
// stable to well below one ulp, which the sampler invariance tests rely on.
struct DoubleDouble
{
  double hi = 0.0;
  double lo = 0.0;

  // Knuth two-sum: hi + lo == a + b exactly.
  static DoubleDouble two_sum(double a, double b)
  {
    const double s = a + b;
    const double bb = s - a;
    const double err = (a - (s - bb)) + (b - bb);
    return {s, err};
  }

  // FMA-based two-product: hi + lo == a * b exactly.
  static DoubleDouble two_prod(double a, double b)
  {
    const double p = a * b;
    const double err = std::fma(a, b, -p);
    return {p, err};
  }

  void add(double v)
  {
    const DoubleDouble s = two_sum(hi, v);
    hi = s.hi;
    lo += s.lo;
  }

  void add(DoubleDouble v)
  {
    add(v.hi);
    lo += v.lo;
  }

  void add_product(double a, double b) { add(two_prod(a, b)); }

  double value() const { return hi + lo; }
};

// Quotient of two compensated sums, accurate to ~1 ulp of the exact ratio.
inline double dd_divide(DoubleDouble num, DoubleDouble den)
{
  const double d = den.value();
  const double q1 = num.value() / d;
  // One refinement step: r = num - q1 * den, evaluated with exact products.
  DoubleDouble r = num;
  const DoubleDouble p_hi = DoubleDouble::two_prod(q1, den.hi);
  r.add(-p_hi.hi);
  r.add(-p_hi.lo);
  r.add(-q1 * den.lo);
  return q1 + r.value() / d;
}

}  // namespace heatcast

#endif  // HEATCAST_NUMERICS_HPP_
