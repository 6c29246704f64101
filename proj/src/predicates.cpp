#include "fmr/predicates.hpp"

#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

namespace fmr {

namespace {

using rational = boost::multiprecision::cpp_rational;

constexpr double kEps = 1.1102230246251565e-16;  // 2^-53
constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIncircleBound = (10.0 + 96.0 * kEps) * kEps;

int sign_of(const rational& r) {
    if (r > 0) return 1;
    if (r < 0) return -1;
    return 0;
}

int orient2d_exact(double ax, double ay, double bx, double by, double cx, double cy) {
    rational detl = (rational(ax) - cx) * (rational(by) - cy);
    rational detr = (rational(ay) - cy) * (rational(bx) - cx);
    return sign_of(detl - detr);
}

int incircle_exact(double ax, double ay, double bx, double by, double cx, double cy,
                   double dx, double dy) {
    rational adx = rational(ax) - dx, ady = rational(ay) - dy;
    rational bdx = rational(bx) - dx, bdy = rational(by) - dy;
    rational cdx = rational(cx) - dx, cdy = rational(cy) - dy;
    rational alift = adx * adx + ady * ady;
    rational blift = bdx * bdx + bdy * bdy;
    rational clift = cdx * cdx + cdy * cdy;
    rational det = alift * (bdx * cdy - bdy * cdx)
                 + blift * (cdx * ady - cdy * adx)
                 + clift * (adx * bdy - ady * bdx);
    return sign_of(det);
}

}  // namespace

int orient2d(double ax, double ay, double bx, double by, double cx, double cy) {
    double detl = (ax - cx) * (by - cy);
    double detr = (ay - cy) * (bx - cx);
    double det = detl - detr;
    double detsum;
    if (detl > 0) {
        if (detr <= 0) return det > 0 ? 1 : (det < 0 ? -1 : 0);
        detsum = detl + detr;
    } else if (detl < 0) {
        if (detr >= 0) return det > 0 ? 1 : (det < 0 ? -1 : 0);
        detsum = -detl - detr;
    } else {
        return det > 0 ? 1 : (det < 0 ? -1 : 0);
    }
    double errbound = kOrientBound * detsum;
    if (det > errbound) return 1;
    if (-det > errbound) return -1;
    return orient2d_exact(ax, ay, bx, by, cx, cy);
}

int incircle(double ax, double ay, double bx, double by, double cx, double cy,
             double dx, double dy) {
    double adx = ax - dx, ady = ay - dy;
    double bdx = bx - dx, bdy = by - dy;
    double cdx = cx - dx, cdy = cy - dy;

    double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    double alift = adx * adx + ady * ady;
    double cdxady = cdx * ady, adxcdy = adx * cdy;
    double blift = bdx * bdx + bdy * bdy;
    double adxbdy = adx * bdy, bdxady = bdx * ady;
    double clift = cdx * cdx + cdy * cdy;

    double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift
                     + (std::fabs(cdxady) + std::fabs(adxcdy)) * blift
                     + (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
    double errbound = kIncircleBound * permanent;
    if (det > errbound) return 1;
    if (-det > errbound) return -1;
    return incircle_exact(ax, ay, bx, by, cx, cy, dx, dy);
}

}  // namespace fmr
