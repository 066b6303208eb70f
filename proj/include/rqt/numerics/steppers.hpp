#pragma once

// Fixed-step explicit integrators for y' = f(x, y) with fixed-size state.

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

#include "rqt/errors.hpp"

namespace rqt::numerics {

enum class StepMethod { Euler, RK4 };

inline std::string to_string(StepMethod m) { return m == StepMethod::Euler ? "euler" : "rk4"; }

inline StepMethod parse_step_method(std::string_view s) {
  if (s == "euler") return StepMethod::Euler;
  if (s == "rk4") return StepMethod::RK4;
  throw ConfigError("unknown integration method '" + std::string(s) + "' (expected euler or rk4)");
}

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
State<N> axpy(const State<N>& y, double h, const State<N>& k) {
  State<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h * k[i];
  return out;
}

template <std::size_t N, class F>
State<N> euler_step(F&& f, double x, const State<N>& y, double h) {
  return axpy(y, h, f(x, y));
}

template <std::size_t N, class F>
State<N> rk4_step(F&& f, double x, const State<N>& y, double h) {
  const State<N> k1 = f(x, y);
  const State<N> k2 = f(x + 0.5 * h, axpy(y, 0.5 * h, k1));
  const State<N> k3 = f(x + 0.5 * h, axpy(y, 0.5 * h, k2));
  const State<N> k4 = f(x + h, axpy(y, h, k3));
  State<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

template <std::size_t N, class F>
State<N> step(StepMethod method, F&& f, double x, const State<N>& y, double h) {
  return method == StepMethod::Euler ? euler_step<N>(f, x, y, h) : rk4_step<N>(f, x, y, h);
}

}  // namespace rqt::numerics
