#include "mfg/argmin.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "mfg/errors.hpp"

namespace mfg {

namespace {

constexpr int kScanIntervals = 8;
constexpr int kGoldenCap = 200;
constexpr int kPolishCap = 200;
const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;

}  // namespace

double minimize_unimodal(const std::function<double(double)>& f, double lo, double hi, double tol) {
    if (!(lo < hi)) throw DomainError("minimize_unimodal: empty interval");
    if (!(tol > 0.0)) throw DomainError("minimize_unimodal: tolerance must be positive");
    const double width = hi - lo;

    std::array<double, kScanIntervals + 1> xs{}, fs{};
    double fmax = 0.0;
    for (int k = 0; k <= kScanIntervals; ++k) {
        xs[k] = (k == kScanIntervals) ? hi : lo + width * k / kScanIntervals;
        fs[k] = f(xs[k]);
        if (!std::isfinite(fs[k])) throw DomainError("minimize_unimodal: objective is not finite");
        fmax = std::max(fmax, std::abs(fs[k]));
    }
    const int j = static_cast<int>(std::min_element(fs.begin(), fs.end()) - fs.begin());
    const double slack = 1e-10 * (1.0 + fmax);
    for (int k = 0; k < kScanIntervals; ++k) {
        const bool ok = (k < j) ? fs[k] >= fs[k + 1] - slack : fs[k + 1] >= fs[k] - slack;
        if (!ok) {
            throw ConvexityViolation("objective is not unimodal on [" + std::to_string(lo) + ", " +
                                     std::to_string(hi) + "] near a = " + std::to_string(xs[k]));
        }
    }

    // Golden-section search inside the scan bracket.
    double l = xs[std::max(j - 1, 0)];
    double r = xs[std::min(j + 1, kScanIntervals)];
    const double golden_width = std::max(1e-3 * width, tol);
    double c = r - kInvPhi * (r - l);
    double d = l + kInvPhi * (r - l);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < kGoldenCap && r - l > golden_width; ++it) {
        if (fc <= fd) {
            r = d;
            d = c;
            fd = fc;
            c = r - kInvPhi * (r - l);
            fc = f(c);
        } else {
            l = c;
            c = d;
            fc = fd;
            d = l + kInvPhi * (r - l);
            fd = f(d);
        }
    }

    // Polish on the sign of the symmetric difference.
    const double h = 1e-5 * width;
    auto slope = [&](double a) { return f(std::min(a + h, hi)) - f(std::max(a - h, lo)); };
    double sl = slope(l);
    double sr = slope(r);
    if (sl == 0.0 && sr == 0.0) return 0.5 * (l + r);  // flat objective

    for (double grow = r - l; sl >= 0.0; grow *= 2.0) {
        if (l <= lo) return lo;
        r = l;
        sr = sl;
        l = std::max(lo, l - grow);
        sl = slope(l);
    }
    for (double grow = r - l; sr <= 0.0; grow *= 2.0) {
        if (r >= hi) return hi;
        l = r;
        sl = sr;
        r = std::min(hi, r + grow);
        sr = slope(r);
    }

    int side = 0;
    for (int it = 0; it < kPolishCap && r - l > tol; ++it) {
        double a = (l * sr - r * sl) / (sr - sl);
        a = std::clamp(a, l + 0.5 * tol, r - 0.5 * tol);
        const double sa = slope(a);
        if (sa == 0.0) return a;
        if (sa < 0.0) {
            l = a;
            sl = sa;
            if (side == -1) sr *= 0.5;
            side = -1;
        } else {
            r = a;
            sr = sa;
            if (side == 1) sl *= 0.5;
            side = 1;
        }
    }
    return 0.5 * (l + r);
}

}  // namespace mfg
