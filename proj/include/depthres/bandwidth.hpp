// Data-driven per-pixel bandwidth selection. The restoration energy plus a
// quadratic penalty on the bandwidth gradient is lowered by steepest
// descent on each pixel's bandwidth, alternated with the depth updates.

#ifndef DEPTHRES_BANDWIDTH_HPP
#define DEPTHRES_BANDWIDTH_HPP

#include <vector>

#include "depthres/core.hpp"

namespace depthres {

/// Per-pixel derivative of the bandwidth objective.
struct BandwidthGradient {
    int width = 0;
    int height = 0;
    std::vector<double> values;
};

/// Discrete 4-neighbor Laplacian with replicate boundary: neighbors outside
/// the grid contribute zero. Annihilates constant and affine maps.
std::vector<double> laplacian(const BandwidthMap& bw);

/// Bandwidth objective evaluated as the restoration energy plus
/// beta * sum_i |forward-difference gradient of lambda at i|^2 (replicate
/// boundary). The analytic gradient below differentiates exactly this.
double bandwidth_objective(const DepthMap& d, const DepthMap& d0,
                           const GuidanceImage& color, const BandwidthMap& bw,
                           const RestorationConfig& cfg);

/// Analytic derivative of the bandwidth objective per pixel:
///   (1-alpha) sum_j w_ij  [4 l_i (1 - d_ij) - 2 (D_i - D0_j)^2 d_ij / l_i]
/// +    alpha  sum_j wc_ij [4 l_i (1 - s_ij) - 2 (D_i - D_j)^2  s_ij / l_i]
/// - 2 beta * laplacian(lambda)_i
/// with holes in d0 skipped in the first sum. Throws ConfigError when any
/// bandwidth sits below the floor.
BandwidthGradient bandwidth_gradient(const DepthMap& d, const DepthMap& d0,
                                     const GuidanceImage& color, const BandwidthMap& bw,
                                     const RestorationConfig& cfg);

/// One steepest-descent step, clamped at the bandwidth floor:
/// lambda_i <- max(kLambdaMin, lambda_i - tau * grad_i).
BandwidthMap bandwidth_step(const BandwidthMap& bw, const BandwidthGradient& grad,
                            double tau);

}  // namespace depthres

#endif  // DEPTHRES_BANDWIDTH_HPP
