// Scalar kernels of the restoration energy: the spatial Gaussian window,
// the color-guided weight, and the bounded exponential penalty with its
// derivative. All of them are pure and inlined; they dominate the hot path.

#ifndef DEPTHRES_WEIGHTS_HPP
#define DEPTHRES_WEIGHTS_HPP

#include <cassert>
#include <cmath>
#include <vector>

#include "depthres/core.hpp"

namespace depthres {

/// Kernel widths for the guided weight.
struct KernelParams {
    double sigma_s = 4.0;          // pixels
    double sigma_c = 10.0 / 255.0; // normalized intensity
};

/// Gaussian falloff with squared Euclidean pixel distance:
/// exp(-|i-j|^2 / (2 sigma_s^2)). Result in (0, 1].
inline double spatial_weight(int ix, int iy, int jx, int jy, double sigma_s) {
    assert(sigma_s > 0.0);
    const double dx = ix - jx;
    const double dy = iy - jy;
    return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma_s * sigma_s));
}

/// Color similarity factor: exp(-sum_k |I_i^k - I_j^k|^2 / (3 * 2 sigma_c^2))
/// over the three channels. Result in (0, 1].
inline double color_weight(const GuidanceImage& img, int ix, int iy, int jx,
                           int jy, double sigma_c) {
    const int i = pixel_index(ix, iy, img.width);
    const int j = pixel_index(jx, jy, img.width);
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double d = img.planes[k][i] - img.planes[k][j];
        sum += d * d;
    }
    return std::exp(-sum / (3.0 * 2.0 * sigma_c * sigma_c));
}

/// Guided weight: spatial Gaussian times color similarity.
inline double guide_weight(int ix, int iy, int jx, int jy,
                           const GuidanceImage& color, const KernelParams& params) {
    return spatial_weight(ix, iy, jx, jy, params.sigma_s) *
           color_weight(color, ix, iy, jx, jy, params.sigma_c);
}

/// Bounded exponential penalty 2*lambda^2*(1 - exp(-x^2/(2 lambda^2))).
/// Monotone nondecreasing in x_sq and saturating at 2*lambda^2, which is
/// what keeps outliers from dominating the energy.
inline double robust_norm(double x_sq, double lambda) {
    assert(x_sq >= 0.0 && lambda >= kLambdaMin);
    const double two_l_sq = 2.0 * lambda * lambda;
    return two_l_sq * (1.0 - std::exp(-x_sq / two_l_sq));
}

/// Derivative of robust_norm with respect to x_sq:
/// exp(-x^2/(2 lambda^2)), in (0, 1]. This is the reweighting kernel shared
/// by the data and smoothness weights.
inline double robust_norm_deriv(double x_sq, double lambda) {
    assert(x_sq >= 0.0 && lambda >= kLambdaMin);
    return std::exp(-x_sq / (2.0 * lambda * lambda));
}

/// Precomputed spatial weights for every patch offset (dx, dy) with
/// |dx|,|dy| <= radius. sigma_s is constant per run, so the table is filled
/// once and indexed in the assembly loops.
class SpatialKernel {
public:
    SpatialKernel(int radius, double sigma_s) : radius_(radius), side_(2 * radius + 1) {
        table_.resize(static_cast<size_t>(side_) * side_);
        for (int dy = -radius; dy <= radius; ++dy)
            for (int dx = -radius; dx <= radius; ++dx)
                table_[offset(dx, dy)] = spatial_weight(0, 0, dx, dy, sigma_s);
    }

    double at(int dx, int dy) const { return table_[offset(dx, dy)]; }
    int radius() const { return radius_; }

private:
    size_t offset(int dx, int dy) const {
        return static_cast<size_t>(dy + radius_) * side_ + (dx + radius_);
    }

    int radius_;
    int side_;
    std::vector<double> table_;
};

}  // namespace depthres

#endif  // DEPTHRES_WEIGHTS_HPP
