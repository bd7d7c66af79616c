#include "depthres/irls.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "depthres/bandwidth.hpp"
#include "depthres/parallel.hpp"
#include "depthres/weights.hpp"

namespace depthres {

namespace {

void check_same_grid(int w, int h, int w2, int h2, const char* what) {
    if (w != w2 || h != h2)
        throw ConfigError(std::string(what) + ": grid dimensions do not match");
}

// Per-pixel data-term partial: sum_j w_ij * phi(|D_i - D0_j|^2, lambda_i)
// over the clipped data patch, holes in d0 skipped.
double data_energy_at(int x, int y, const DepthMap& d, const DepthMap& d0,
                      const BandwidthMap& bw, const SpatialKernel& kernel,
                      int radius) {
    const int w = d.width, h = d.height;
    const double di = d.values[pixel_index(x, y, w)];
    const double lambda = bw.values[pixel_index(x, y, w)];
    const Neighborhood nb(radius);
    double sum = 0.0;
    for (int jy = nb.y_begin(y); jy < nb.y_end(y, h); ++jy) {
        for (int jx = nb.x_begin(x); jx < nb.x_end(x, w); ++jx) {
            const int j = pixel_index(jx, jy, w);
            if (!d0.mask[j]) continue;
            const double diff = di - d0.values[j];
            sum += kernel.at(jx - x, jy - y) * robust_norm(diff * diff, lambda);
        }
    }
    return sum;
}

double smoothness_energy_at(int x, int y, const DepthMap& d, const GuidanceImage& color,
                            const BandwidthMap& bw, const SpatialKernel& kernel,
                            const KernelParams& params, int radius) {
    const int w = d.width, h = d.height;
    const int i = pixel_index(x, y, w);
    const double di = d.values[i];
    const double lambda = bw.values[i];
    const Neighborhood nb(radius);
    double sum = 0.0;
    for (int jy = nb.y_begin(y); jy < nb.y_end(y, h); ++jy) {
        for (int jx = nb.x_begin(x); jx < nb.x_end(x, w); ++jx) {
            const int j = pixel_index(jx, jy, w);
            if (j == i) continue;
            const double wc = kernel.at(jx - x, jy - y) *
                              color_weight(color, x, y, jx, jy, params.sigma_c);
            const double diff = di - d.values[j];
            sum += wc * robust_norm(diff * diff, lambda);
        }
    }
    return sum;
}

double accumulate_rows(const std::vector<double>& partials) {
    // Fixed summation order keeps results independent of the thread count.
    return std::accumulate(partials.begin(), partials.end(), 0.0);
}

double rmse_vs(const DepthMap& a, const DepthMap& b) {
    double sum = 0.0;
    long count = 0;
    for (size_t i = 0; i < a.values.size(); ++i) {
        if (!a.mask[i] || !b.mask[i]) continue;
        const double diff = a.values[i] - b.values[i];
        sum += diff * diff;
        ++count;
    }
    if (count == 0) return -1.0;
    return 255.0 * std::sqrt(sum / count);
}

}  // namespace

double data_energy(const DepthMap& d, const DepthMap& d0, const BandwidthMap& bw,
                   const RestorationConfig& cfg) {
    check_same_grid(d.width, d.height, d0.width, d0.height, "data_energy");
    check_same_grid(d.width, d.height, bw.width, bw.height, "data_energy");
    const int radius = cfg.effective_data_radius();
    const SpatialKernel kernel(radius, cfg.sigma_s);
    std::vector<double> partial(d.size());
    const int w = d.width;
    parallel_for(0, d.size(), [&](int i) {
        partial[i] = data_energy_at(i % w, i / w, d, d0, bw, kernel, radius);
    });
    return accumulate_rows(partial);
}

double smoothness_energy(const DepthMap& d, const GuidanceImage& color,
                         const BandwidthMap& bw, const RestorationConfig& cfg) {
    check_same_grid(d.width, d.height, color.width, color.height, "smoothness_energy");
    check_same_grid(d.width, d.height, bw.width, bw.height, "smoothness_energy");
    const SpatialKernel kernel(cfg.radius, cfg.sigma_s);
    const KernelParams params{cfg.sigma_s, cfg.sigma_c};
    std::vector<double> partial(d.size());
    const int w = d.width;
    parallel_for(0, d.size(), [&](int i) {
        partial[i] = smoothness_energy_at(i % w, i / w, d, color, bw, kernel, params,
                                          cfg.radius);
    });
    return accumulate_rows(partial);
}

double total_energy(const DepthMap& d, const DepthMap& d0, const GuidanceImage& color,
                    const BandwidthMap& bw, const RestorationConfig& cfg) {
    return (1.0 - cfg.alpha) * data_energy(d, d0, bw, cfg) +
           cfg.alpha * smoothness_energy(d, color, bw, cfg);
}

std::vector<double> normal_equation_residual(const DepthMap& d, const DepthMap& d0,
                                             const GuidanceImage& color,
                                             const BandwidthMap& bw,
                                             const RestorationConfig& cfg) {
    check_same_grid(d.width, d.height, d0.width, d0.height, "normal_equation_residual");
    check_same_grid(d.width, d.height, color.width, color.height,
                    "normal_equation_residual");
    check_same_grid(d.width, d.height, bw.width, bw.height, "normal_equation_residual");
    const int w = d.width, h = d.height;
    const int rd = cfg.effective_data_radius();
    const int rs = cfg.radius;
    const SpatialKernel kernel(std::max(rd, rs), cfg.sigma_s);
    const KernelParams params{cfg.sigma_s, cfg.sigma_c};
    const double alpha = cfg.alpha;

    std::vector<double> residual(d.size());
    parallel_for(0, d.size(), [&](int i) {
        const int x = i % w, y = i / w;
        const double di = d.values[i];
        const double li = bw.values[i];
        double r = 0.0;

        const Neighborhood nd(rd);
        for (int jy = nd.y_begin(y); jy < nd.y_end(y, h); ++jy) {
            for (int jx = nd.x_begin(x); jx < nd.x_end(x, w); ++jx) {
                const int j = pixel_index(jx, jy, w);
                if (!d0.mask[j]) continue;
                const double diff = di - d0.values[j];
                const double dij = robust_norm_deriv(diff * diff, li);
                r += (1.0 - alpha) * kernel.at(jx - x, jy - y) * dij * diff;
            }
        }

        const Neighborhood ns(rs);
        for (int jy = ns.y_begin(y); jy < ns.y_end(y, h); ++jy) {
            for (int jx = ns.x_begin(x); jx < ns.x_end(x, w); ++jx) {
                const int j = pixel_index(jx, jy, w);
                if (j == i) continue;
                const double wc = kernel.at(jx - x, jy - y) *
                                  color_weight(color, x, y, jx, jy, params.sigma_c);
                const double diff = di - d.values[j];
                const double diff_sq = diff * diff;
                const double s_sym = 0.5 * (robust_norm_deriv(diff_sq, li) +
                                            robust_norm_deriv(diff_sq, bw.values[j]));
                r += 2.0 * alpha * wc * s_sym * diff;
            }
        }
        residual[i] = r;
    });
    return residual;
}

std::vector<double> energy_gradient(const DepthMap& d, const DepthMap& d0,
                                    const GuidanceImage& color, const BandwidthMap& bw,
                                    const RestorationConfig& cfg) {
    std::vector<double> grad = normal_equation_residual(d, d0, color, bw, cfg);
    for (double& g : grad) g *= 2.0;
    return grad;
}

SparseSystem assemble_system(const DepthMap& d_prev, const DepthMap& d0,
                             const GuidanceImage& color, const BandwidthMap& bw,
                             const RestorationConfig& cfg) {
    check_same_grid(d_prev.width, d_prev.height, d0.width, d0.height, "assemble_system");
    check_same_grid(d_prev.width, d_prev.height, color.width, color.height,
                    "assemble_system");
    check_same_grid(d_prev.width, d_prev.height, bw.width, bw.height, "assemble_system");

    const int w = d_prev.width, h = d_prev.height;
    const int n = d_prev.size();
    const int rd = cfg.effective_data_radius();
    const int rs = cfg.radius;
    const SpatialKernel kernel(std::max(rd, rs), cfg.sigma_s);
    const KernelParams params{cfg.sigma_s, cfg.sigma_c};
    const double alpha = cfg.alpha;

    SparseSystem sys;
    sys.a.n = n;
    sys.a.row_offsets.resize(n + 1);
    sys.rhs.assign(n, 0.0);

    // Row i holds one entry per pixel of the clipped smoothness patch
    // (including the diagonal); the data term only touches the diagonal.
    sys.a.row_offsets[0] = 0;
    {
        const Neighborhood ns(rs);
        for (int i = 0; i < n; ++i) {
            const int x = i % w, y = i / w;
            sys.a.row_offsets[i + 1] = sys.a.row_offsets[i] + ns.count(x, y, w, h);
        }
    }
    sys.a.cols.resize(sys.a.row_offsets[n]);
    sys.a.vals.resize(sys.a.row_offsets[n]);

    parallel_for(0, n, [&](int i) {
        const int x = i % w, y = i / w;
        const double di = d_prev.values[i];
        const double li = bw.values[i];

        double diag = 0.0;
        double rhs_i = 0.0;

        const Neighborhood nd(rd);
        for (int jy = nd.y_begin(y); jy < nd.y_end(y, h); ++jy) {
            for (int jx = nd.x_begin(x); jx < nd.x_end(x, w); ++jx) {
                const int j = pixel_index(jx, jy, w);
                if (!d0.mask[j]) continue;
                const double diff = di - d0.values[j];
                const double wd = kernel.at(jx - x, jy - y) *
                                  robust_norm_deriv(diff * diff, li);
                diag += (1.0 - alpha) * wd;
                rhs_i += (1.0 - alpha) * wd * d0.values[j];
            }
        }

        int k = sys.a.row_offsets[i];
        int diag_slot = -1;
        const Neighborhood ns(rs);
        for (int jy = ns.y_begin(y); jy < ns.y_end(y, h); ++jy) {
            for (int jx = ns.x_begin(x); jx < ns.x_end(x, w); ++jx) {
                const int j = pixel_index(jx, jy, w);
                if (j == i) {
                    sys.a.cols[k] = i;
                    diag_slot = k++;
                    continue;
                }
                const double wc = kernel.at(jx - x, jy - y) *
                                  color_weight(color, x, y, jx, jy, params.sigma_c);
                const double diff = di - d_prev.values[j];
                const double diff_sq = diff * diff;
                const double s_sym = 0.5 * (robust_norm_deriv(diff_sq, li) +
                                            robust_norm_deriv(diff_sq, bw.values[j]));
                const double coupling = 2.0 * alpha * wc * s_sym;
                diag += coupling;
                sys.a.cols[k] = j;
                sys.a.vals[k] = -coupling;
                ++k;
            }
        }
        if (!(diag > 0.0) || !std::isfinite(diag))
            throw NumericError("underdetermined pixel at (" + std::to_string(x) + "," +
                               std::to_string(y) + "): empty data and smoothness rows");
        sys.a.vals[diag_slot] = diag;
        sys.rhs[i] = rhs_i;
    });

    return sys;
}

RestorationResult restore(const DepthMap& d0, const GuidanceImage& color,
                          const RestorationConfig& cfg, const DepthMap* reference,
                          const ProgressFn& progress) {
    cfg.validate();
    d0.validate();
    color.validate();
    check_same_grid(d0.width, d0.height, color.width, color.height, "restore");

    const auto start = std::chrono::steady_clock::now();
    const auto elapsed = [&start] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    };

    RestorationResult result;
    result.bandwidth = BandwidthMap(d0.width, d0.height,
                                    std::max(cfg.lambda_init, kLambdaMin));
    DepthMap current = d0;

    IterationStats initial;
    initial.iteration = 0;
    initial.energy = total_energy(current, d0, color, result.bandwidth, cfg);
    initial.rel_change = std::numeric_limits<double>::quiet_NaN();
    if (reference) initial.rmse_vs_reference = rmse_vs(current, *reference);
    initial.elapsed_seconds = elapsed();
    result.history.push_back(initial);

    for (int iter = 1; iter <= cfg.irls_max_iters; ++iter) {
        if (cfg.adaptive_bandwidth) {
            for (int step = 0; step < cfg.lambda_steps_per_iter; ++step) {
                const BandwidthGradient grad =
                    bandwidth_gradient(current, d0, color, result.bandwidth, cfg);
                result.bandwidth = bandwidth_step(result.bandwidth, grad, cfg.tau);
            }
        }

        const SparseSystem sys = assemble_system(current, d0, color, result.bandwidth, cfg);
        const PcgResult solved =
            pcg_solve(sys, current.values, cfg.pcg_rel_tol, cfg.pcg_max_iters);

        double diff_sq = 0.0, prev_sq = 0.0;
        for (size_t i = 0; i < solved.x.size(); ++i) {
            const double diff = solved.x[i] - current.values[i];
            diff_sq += diff * diff;
            prev_sq += current.values[i] * current.values[i];
        }
        const double rel_change = prev_sq > 0.0 ? std::sqrt(diff_sq / prev_sq)
                                                : std::sqrt(diff_sq);

        current.values = solved.x;
        std::fill(current.mask.begin(), current.mask.end(), std::uint8_t{1});

        IterationStats stats;
        stats.iteration = iter;
        stats.energy = total_energy(current, d0, color, result.bandwidth, cfg);
        stats.rel_change = rel_change;
        if (reference) stats.rmse_vs_reference = rmse_vs(current, *reference);
        stats.elapsed_seconds = elapsed();
        stats.pcg_iterations = solved.iterations;
        stats.pcg_residual = solved.relative_residual;
        if (!std::isfinite(stats.energy))
            throw NumericError("restore: non-finite energy at iteration " +
                               std::to_string(iter));
        result.history.push_back(stats);
        if (progress) progress(stats);

        if (rel_change <= cfg.irls_rel_tol) break;
    }

    for (double& v : current.values) v = std::clamp(v, 0.0, 1.0);
    result.depth = std::move(current);
    return result;
}

}  // namespace depthres
