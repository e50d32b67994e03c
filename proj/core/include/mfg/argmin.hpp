#pragma once

#include <functional>

namespace mfg {

/// Minimizer of a unimodal function on [lo, hi].
///
/// A coarse scan checks unimodality (throws ConvexityViolation otherwise) and
/// brackets the minimum, golden-section search narrows the bracket, and the
/// sign change of the symmetric difference f(a+h) - f(a-h) is then located to
/// within `tol` by Illinois regula falsi. Deterministic for a given f.
double minimize_unimodal(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-10);

}  // namespace mfg
