/******************************************************************************
 * Copyright 2026 The idrem Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#pragma once

#include <cmath>
#include <string>

#include "idrem/errors.hpp"
#include "idrem/matrix_kernel.hpp"

namespace idrem {

namespace detail {

inline void check_finite(const Vec& v, double t, const char* stage) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i))) {
      throw IntegrationFault(std::string("non-finite ") + stage + " at component " +
                                 std::to_string(i) + ", t = " + std::to_string(t),
                             t, static_cast<long>(i));
    }
  }
}

}  // namespace detail

/// One classical Runge-Kutta step of x' = f(t, x).
template <typename Derivative>
Vec rk4_step(const Vec& x, Derivative&& f, double t, double dt) {
  if (!(dt > 0.0)) throw DomainError("rk4_step: dt must be positive");
  const double h = 0.5 * dt;

  const Vec k1 = f(t, x);
  detail::check_finite(k1, t, "derivative");
  const Vec k2 = f(t + h, Vec(x + h * k1));
  detail::check_finite(k2, t + h, "derivative");
  const Vec k3 = f(t + h, Vec(x + h * k2));
  detail::check_finite(k3, t + h, "derivative");
  const Vec k4 = f(t + dt, Vec(x + dt * k3));
  detail::check_finite(k4, t + dt, "derivative");

  Vec next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  detail::check_finite(next, t + dt, "state");
  return next;
}

}  // namespace idrem
