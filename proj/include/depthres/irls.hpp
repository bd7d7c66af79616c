// Robust restoration energy, its per-iteration weighted least-squares
// system, and the outer reweighting loop.
//
// The energy couples a pixel-to-patch data term against the (upsampled)
// input with a color-guided smoothness term, both penalized by the bounded
// exponential norm. Each outer iteration freezes the reweighting kernels at
// the current estimate, which turns the problem into one sparse SPD solve.

#ifndef DEPTHRES_IRLS_HPP
#define DEPTHRES_IRLS_HPP

#include <functional>
#include <vector>

#include "depthres/core.hpp"
#include "depthres/sparse.hpp"

namespace depthres {

/// Per-iteration record of the outer loop. Iteration 0 is the initial
/// state (rel_change and solver fields are NaN/zero there).
struct IterationStats {
    int iteration = 0;
    double energy = 0.0;
    double rel_change = 0.0;
    double rmse_vs_reference = -1.0;  // < 0 when no reference was given
    double elapsed_seconds = 0.0;     // cumulative since restore() started
    int pcg_iterations = 0;
    double pcg_residual = 0.0;
};

struct RestorationResult {
    DepthMap depth;
    BandwidthMap bandwidth;
    std::vector<IterationStats> history;
};

/// Called after each outer iteration; gives the CLI its live trace.
using ProgressFn = std::function<void(const IterationStats&)>;

/// Data energy: sum over pixels i and patch neighbors j of
/// w_ij * phi(|D_i - D0_j|^2, lambda_i), skipping holes in D0.
double data_energy(const DepthMap& d, const DepthMap& d0, const BandwidthMap& bw,
                   const RestorationConfig& cfg);

/// Smoothness energy: sum over pixels i and patch neighbors j != i of
/// guide_weight(i,j) * phi(|D_i - D_j|^2, lambda_i). Zero for constant maps.
double smoothness_energy(const DepthMap& d, const GuidanceImage& color,
                         const BandwidthMap& bw, const RestorationConfig& cfg);

/// (1-alpha) * data_energy + alpha * smoothness_energy.
double total_energy(const DepthMap& d, const DepthMap& d0, const GuidanceImage& color,
                    const BandwidthMap& bw, const RestorationConfig& cfg);

/// Stationarity residual per pixel, with reweighting kernels evaluated at d:
///   r_i = (1-alpha) sum_j w_ij d_ij (D_i - D0_j)
///       + 2 alpha  sum_j wc_ij s_ij (D_i - D_j)
/// where the smoothness kernel is symmetrized over the bandwidths at i and
/// j. The gradient of total_energy is exactly twice this residual.
std::vector<double> normal_equation_residual(const DepthMap& d, const DepthMap& d0,
                                             const GuidanceImage& color,
                                             const BandwidthMap& bw,
                                             const RestorationConfig& cfg);

/// Analytic gradient of total_energy with respect to the depth values.
std::vector<double> energy_gradient(const DepthMap& d, const DepthMap& d0,
                                    const GuidanceImage& color, const BandwidthMap& bw,
                                    const RestorationConfig& cfg);

/// Builds the linear system whose solution minimizes the quadratic
/// surrogate with kernels frozen at d_prev. The matrix is symmetric with
/// positive diagonal; rows keep strict diagonal dominance wherever the
/// pixel sees at least one valid data-term neighbor. Throws NumericError
/// ("underdetermined pixel") when a row would be identically zero.
SparseSystem assemble_system(const DepthMap& d_prev, const DepthMap& d0,
                             const GuidanceImage& color, const BandwidthMap& bw,
                             const RestorationConfig& cfg);

/// Full restoration: alternates optional bandwidth descent steps with one
/// reweighted solve per iteration, starting from the (already upsampled)
/// input d0, until the relative change drops below cfg.irls_rel_tol or the
/// iteration cap is reached. The returned map is clamped to [0,1] and fully
/// valid; holes in d0 are in-painted by the smoothness term.
RestorationResult restore(const DepthMap& d0, const GuidanceImage& color,
                          const RestorationConfig& cfg,
                          const DepthMap* reference = nullptr,
                          const ProgressFn& progress = nullptr);

}  // namespace depthres

#endif  // DEPTHRES_IRLS_HPP
