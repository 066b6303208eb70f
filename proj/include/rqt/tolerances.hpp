#pragma once

// Pass/fail bounds shared by the report command, the unit tests and the
// acceptance suite. Run-and-record bounds carry the value observed when they
// were locked in a trailing comment.

namespace rqt::tol {

inline constexpr double wronskian_closed = 1e-8;
inline constexpr double wronskian_numeric = 1e-5;
inline constexpr double kg_fd_residual = 1e-4;
inline constexpr double kg_oracle = 1e-6;

inline constexpr double analytic_vanishing = 1e-6;  // (a, b) = (1, 0) residual tier
inline constexpr double rqshje_general = 1e-4;
inline constexpr double rqshje_linear = 1e-3;
inline constexpr double firqnl_straight = 1e-8;
inline constexpr double firqnl_general = 1e-3;
inline constexpr double velocity_momentum = 1e-6;

inline constexpr double node_law = 1e-9;
inline constexpr double de_broglie = 1e-12;
inline constexpr double straight_slope = 1e-12;
inline constexpr double ode_oracle = 1e-6;  // times the node spacing
inline constexpr double action_quantum = 1e-10;
inline constexpr double richardson = 0.15;

inline constexpr double exponent_lo = 0.9;
inline constexpr double exponent_hi = 1.1;

inline constexpr double linear_local_momentum = 1e-2;  // observed 6.8e-3 on the -5400 fm domain

}  // namespace rqt::tol
