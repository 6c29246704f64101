#pragma once

namespace fmr {

// Robust geometric predicates: a floating-point filter with a static error
// bound, falling back to exact rational arithmetic when inconclusive.

// > 0 if (a,b,c) are counter-clockwise, < 0 clockwise, 0 collinear.
int orient2d(double ax, double ay, double bx, double by, double cx, double cy);

// For a CCW triangle (a,b,c): > 0 if d is strictly inside the circumcircle,
// < 0 strictly outside, 0 cocircular.
int incircle(double ax, double ay, double bx, double by, double cx, double cy,
             double dx, double dy);

}  // namespace fmr
