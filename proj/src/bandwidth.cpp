#include "depthres/bandwidth.hpp"

#include <algorithm>
#include <cmath>

#include "depthres/irls.hpp"
#include "depthres/parallel.hpp"
#include "depthres/weights.hpp"

namespace depthres {

namespace {

void check_grid(int w, int h, int w2, int h2, const char* what) {
    if (w != w2 || h != h2)
        throw ConfigError(std::string(what) + ": grid dimensions do not match");
}

// d/dlambda of the exponential penalty at fixed squared difference u:
// 4 lambda (1 - e) - (2 u / lambda) e with e = exp(-u / (2 lambda^2)).
double penalty_lambda_deriv(double u, double lambda) {
    const double e = std::exp(-u / (2.0 * lambda * lambda));
    return 4.0 * lambda * (1.0 - e) - (2.0 * u / lambda) * e;
}

}  // namespace

std::vector<double> laplacian(const BandwidthMap& bw) {
    const int w = bw.width, h = bw.height;
    std::vector<double> out(bw.size(), 0.0);
    parallel_for(0, bw.size(), [&](int i) {
        const int x = i % w, y = i / w;
        const double c = bw.values[i];
        double sum = 0.0;
        if (x > 0) sum += bw.values[i - 1] - c;
        if (x + 1 < w) sum += bw.values[i + 1] - c;
        if (y > 0) sum += bw.values[i - w] - c;
        if (y + 1 < h) sum += bw.values[i + w] - c;
        out[i] = sum;
    });
    return out;
}

double bandwidth_objective(const DepthMap& d, const DepthMap& d0,
                           const GuidanceImage& color, const BandwidthMap& bw,
                           const RestorationConfig& cfg) {
    double reg = 0.0;
    const int w = bw.width, h = bw.height;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int i = pixel_index(x, y, w);
            // Forward differences, replicate boundary (border diff is zero).
            const double gx = x + 1 < w ? bw.values[i + 1] - bw.values[i] : 0.0;
            const double gy = y + 1 < h ? bw.values[i + w] - bw.values[i] : 0.0;
            reg += gx * gx + gy * gy;
        }
    }
    return total_energy(d, d0, color, bw, cfg) + cfg.beta * reg;
}

BandwidthGradient bandwidth_gradient(const DepthMap& d, const DepthMap& d0,
                                     const GuidanceImage& color, const BandwidthMap& bw,
                                     const RestorationConfig& cfg) {
    check_grid(d.width, d.height, d0.width, d0.height, "bandwidth_gradient");
    check_grid(d.width, d.height, color.width, color.height, "bandwidth_gradient");
    check_grid(d.width, d.height, bw.width, bw.height, "bandwidth_gradient");
    for (const double l : bw.values)
        if (!(l >= kLambdaMin))
            throw ConfigError("bandwidth_gradient: bandwidth below floor");

    const int w = d.width, h = d.height;
    const int rd = cfg.effective_data_radius();
    const int rs = cfg.radius;
    const SpatialKernel kernel(std::max(rd, rs), cfg.sigma_s);
    const KernelParams params{cfg.sigma_s, cfg.sigma_c};
    const double alpha = cfg.alpha;

    const std::vector<double> lap = laplacian(bw);

    BandwidthGradient grad;
    grad.width = w;
    grad.height = h;
    grad.values.resize(d.size());

    parallel_for(0, d.size(), [&](int i) {
        const int x = i % w, y = i / w;
        const double di = d.values[i];
        const double li = bw.values[i];
        double g = 0.0;

        const Neighborhood nd(rd);
        for (int jy = nd.y_begin(y); jy < nd.y_end(y, h); ++jy) {
            for (int jx = nd.x_begin(x); jx < nd.x_end(x, w); ++jx) {
                const int j = pixel_index(jx, jy, w);
                if (!d0.mask[j]) continue;
                const double diff = di - d0.values[j];
                g += (1.0 - alpha) * kernel.at(jx - x, jy - y) *
                     penalty_lambda_deriv(diff * diff, li);
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
                g += alpha * wc * penalty_lambda_deriv(diff * diff, li);
            }
        }

        grad.values[i] = g - 2.0 * cfg.beta * lap[i];
    });
    return grad;
}

BandwidthMap bandwidth_step(const BandwidthMap& bw, const BandwidthGradient& grad,
                            double tau) {
    if (!(tau > 0.0)) throw ConfigError("bandwidth_step: tau must be > 0");
    check_grid(bw.width, bw.height, grad.width, grad.height, "bandwidth_step");
    BandwidthMap out = bw;
    for (size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = std::max(kLambdaMin, bw.values[i] - tau * grad.values[i]);
    return out;
}

}  // namespace depthres
