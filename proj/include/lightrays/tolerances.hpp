#pragma once

namespace lightrays {

// Numerical constants shared by the modules. Scenario files may override the
// ones marked "overridable" through their `tolerances` block.
struct Tolerances {
  double h_fd = 1e-5;             // central-difference step for metric derivatives
  double eps_excl = 1e-9;         // exclusion radius around punctures
  double tol_null = 1e-9;         // |g(v,v)| <= tol_null * |v|^2 for null input
  double tol_null_drift = 1e-8;   // overridable
  double tol_normalized = 1e-10;  // |g(v,T) + 1|
  double tol_pre = 1e-4;          // pregeodesic residual, relative to max |x'|
  double tol_geo = 1e-6;          // overridable
  double tol_lightray = 1e-6;     // |b| <= tol_lightray * (1 + |a|)
  double tol_contact = 1e-6;      // overridable
};

inline constexpr Tolerances kDefaultTolerances{};

inline constexpr int kDefaultStepsPerUnit = 800;
inline constexpr int kMinSteps = 16;

}  // namespace lightrays
