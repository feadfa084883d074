#include "gsim/mutual_info.hpp"

#include "gsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace gsim {

namespace {

constexpr double kLog2 = 0.6931471805599453;

void check_gray(const Raster& r, const char* name) {
    if (r.bands != 1) throw DomainError(std::string(name) + " must be grayscale");
    if (r.empty()) throw DomainError(std::string(name) + " is empty");
}

int bin_of(std::uint8_t value, int bins) {
    return static_cast<int>(value) * bins / 256;
}

double entropy_bits(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p) {
        if (v > 0.0) h -= v * std::log(v);
    }
    return h / kLog2;
}

}  // namespace

double histogram_entropy(const Raster& gray, int bins) {
    check_gray(gray, "image");
    if (bins < 2) throw DomainError("bins must be >= 2");
    std::vector<double> hist(static_cast<std::size_t>(bins), 0.0);
    for (std::uint8_t s : gray.samples) hist[bin_of(s, bins)] += 1.0;
    const double n = static_cast<double>(gray.samples.size());
    for (double& v : hist) v /= n;
    return entropy_bits(hist);
}

double mutual_information(const Raster& a, const Raster& b, int bins) {
    check_gray(a, "first image");
    check_gray(b, "second image");
    if (bins < 2) throw DomainError("bins must be >= 2");
    if (a.width != b.width || a.height != b.height) {
        throw DomainError("mutual information requires equal image sizes");
    }
    std::vector<double> joint(static_cast<std::size_t>(bins) * bins, 0.0);
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        joint[static_cast<std::size_t>(bin_of(a.samples[i], bins)) * bins +
              bin_of(b.samples[i], bins)] += 1.0;
    }
    const double n = static_cast<double>(a.samples.size());
    std::vector<double> pa(bins, 0.0), pb(bins, 0.0);
    for (int i = 0; i < bins; ++i) {
        for (int j = 0; j < bins; ++j) {
            const double p = joint[static_cast<std::size_t>(i) * bins + j] / n;
            joint[static_cast<std::size_t>(i) * bins + j] = p;
            pa[i] += p;
            pb[j] += p;
        }
    }
    double mi = 0.0;
    for (int i = 0; i < bins; ++i) {
        for (int j = 0; j < bins; ++j) {
            const double p = joint[static_cast<std::size_t>(i) * bins + j];
            if (p > 0.0) mi += p * std::log(p / (pa[i] * pb[j]));
        }
    }
    return mi / kLog2;
}

namespace {

// Masked MI between the sensed image and the reference pulled through H
// (sensed -> ref). Pixels mapping outside the reference are excluded; the
// returned overlap is the fraction that remained valid.
struct MiObjective {
    const Raster* sensed;
    const Raster* ref;
    int bins;
    int stride;  // pixel subsampling for speed

    double evaluate(const Eigen::Matrix3d& h, double* overlap_out) const {
        const int w = sensed->width;
        const int hgt = sensed->height;
        const double umax = ref->width - 1.0;
        const double vmax = ref->height - 1.0;
        std::vector<double> joint(static_cast<std::size_t>(bins) * bins, 0.0);
        long valid = 0, total = 0;
        for (int v = 0; v < hgt; v += stride) {
            for (int u = 0; u < w; u += stride) {
                ++total;
                const double x = h(0, 0) * u + h(0, 1) * v + h(0, 2);
                const double y = h(1, 0) * u + h(1, 1) * v + h(1, 2);
                const double z = h(2, 0) * u + h(2, 1) * v + h(2, 2);
                if (!(std::abs(z) > 1e-12)) continue;
                const double ru = x / z;
                const double rv = y / z;
                if (!(ru >= 0.0) || !(rv >= 0.0) || ru > umax || rv > vmax) continue;
                const double sample = sample_bilinear(*ref, ru, rv, 0);
                int rbin = static_cast<int>(sample) * bins / 256;
                if (rbin >= bins) rbin = bins - 1;
                const int sbin = bin_of(sensed->at(u, v), bins);
                joint[static_cast<std::size_t>(sbin) * bins + rbin] += 1.0;
                ++valid;
            }
        }
        if (overlap_out) {
            *overlap_out = total > 0 ? static_cast<double>(valid) / total : 0.0;
        }
        if (valid == 0) return 0.0;
        std::vector<double> pa(bins, 0.0), pb(bins, 0.0);
        const double n = static_cast<double>(valid);
        for (int i = 0; i < bins; ++i) {
            for (int j = 0; j < bins; ++j) {
                const double p = joint[static_cast<std::size_t>(i) * bins + j] / n;
                joint[static_cast<std::size_t>(i) * bins + j] = p;
                pa[i] += p;
                pb[j] += p;
            }
        }
        double mi = 0.0;
        for (int i = 0; i < bins; ++i) {
            for (int j = 0; j < bins; ++j) {
                const double p = joint[static_cast<std::size_t>(i) * bins + j];
                if (p > 0.0) mi += p * std::log(p / (pa[i] * pb[j]));
            }
        }
        return mi / kLog2;
    }
};

// Deterministic Nelder-Mead over n dimensions; minimizes f.
struct SimplexResult {
    std::vector<double> x;
    double f = 0.0;
    long evaluations = 0;
};

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          const std::vector<double>& x0, const std::vector<double>& step,
                          int max_evals, double ftol) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> verts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) verts[i + 1][i] += step[i];
    std::vector<double> fvals(n + 1);
    long evals = 0;
    for (std::size_t i = 0; i <= n; ++i) {
        fvals[i] = f(verts[i]);
        ++evals;
    }

    std::vector<std::size_t> order(n + 1);
    auto sort_order = [&] {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
    };

    while (evals < max_evals) {
        sort_order();
        const std::size_t best = order[0], worst = order[n], second_worst = order[n - 1];
        if (std::abs(fvals[worst] - fvals[best]) < ftol) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < n; ++d) centroid[d] += verts[i][d];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double coeff) {
            std::vector<double> x(n);
            for (std::size_t d = 0; d < n; ++d) {
                x[d] = centroid[d] + coeff * (verts[worst][d] - centroid[d]);
            }
            return x;
        };

        const std::vector<double> reflected = blend(-1.0);
        const double fr = f(reflected);
        ++evals;
        if (fr < fvals[best]) {
            const std::vector<double> expanded = blend(-2.0);
            const double fe = f(expanded);
            ++evals;
            if (fe < fr) {
                verts[worst] = expanded;
                fvals[worst] = fe;
            } else {
                verts[worst] = reflected;
                fvals[worst] = fr;
            }
        } else if (fr < fvals[second_worst]) {
            verts[worst] = reflected;
            fvals[worst] = fr;
        } else {
            const std::vector<double> contracted = blend(0.5);
            const double fc = f(contracted);
            ++evals;
            if (fc < fvals[worst]) {
                verts[worst] = contracted;
                fvals[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {  // shrink toward best
                    if (i == best) continue;
                    for (std::size_t d = 0; d < n; ++d) {
                        verts[i][d] = verts[best][d] + 0.5 * (verts[i][d] - verts[best][d]);
                    }
                    fvals[i] = f(verts[i]);
                    ++evals;
                }
            }
        }
    }
    sort_order();
    SimplexResult result;
    result.x = verts[order[0]];
    result.f = fvals[order[0]];
    result.evaluations = evals;
    return result;
}

Eigen::Matrix3d similarity_about(double cx, double cy, double tx, double ty, double rot,
                                 double log_scale) {
    const double s = std::exp(log_scale);
    const double c = std::cos(rot), sn = std::sin(rot);
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(0, 0) = s * c;
    m(0, 1) = -s * sn;
    m(1, 0) = s * sn;
    m(1, 1) = s * c;
    m(0, 2) = cx + tx - (m(0, 0) * cx + m(0, 1) * cy);
    m(1, 2) = cy + ty - (m(1, 0) * cx + m(1, 1) * cy);
    return m;
}

}  // namespace

MiRegistration mi_register(const Raster& sensed_gray, const Raster& reference_gray,
                           const Homography& init_sensed_to_ref, const MiRegisterConfig& cfg) {
    check_gray(sensed_gray, "sensed image");
    check_gray(reference_gray, "reference image");
    if (cfg.bins < 2) throw DomainError("bins must be >= 2");

    // Subsample so a single objective evaluation stays cheap on large frames.
    const long pixels = static_cast<long>(sensed_gray.width) * sensed_gray.height;
    int stride = 1;
    while (pixels / (stride * stride) > 24000) ++stride;
    const MiObjective objective{&sensed_gray, &reference_gray, cfg.bins, stride};

    double init_overlap = 0.0;
    const double init_mi = objective.evaluate(init_sensed_to_ref.h, &init_overlap);
    if (init_overlap < cfg.min_overlap) {
        throw RegistrationFailed("initialization maps only " +
                                 std::to_string(static_cast<int>(init_overlap * 100)) +
                                 "% of the sensed image onto the reference");
    }

    const double cx = (sensed_gray.width - 1.0) / 2.0;
    const double cy = (sensed_gray.height - 1.0) / 2.0;
    long total_evals = 0;

    auto theta_to_h = [&](const std::vector<double>& theta) {
        return Eigen::Matrix3d(init_sensed_to_ref.h *
                               similarity_about(cx, cy, theta[0], theta[1], theta[2], theta[3]));
    };
    auto objective4 = [&](const std::vector<double>& theta) {
        double overlap = 0.0;
        const double mi = objective.evaluate(theta_to_h(theta), &overlap);
        if (overlap < cfg.min_overlap) return 1.0;  // worse than any reachable -MI
        return -mi;
    };

    // Multi-start over a 3x3x3 grid of translation/rotation offsets.
    const double d = cfg.search_radius_px;
    const double r = cfg.rot_span_rad;
    std::vector<double> best_theta{0.0, 0.0, 0.0, 0.0};
    double best_f = -init_mi;
    for (double otx : {-d, 0.0, d}) {
        for (double oty : {-d, 0.0, d}) {
            for (double orot : {-r, 0.0, r}) {
                const std::vector<double> start{otx, oty, orot, 0.0};
                const std::vector<double> step{2.0, 2.0, 0.02, 0.02};
                const SimplexResult res =
                    nelder_mead(objective4, start, step, cfg.simplex_max_evals, 1e-6);
                total_evals += res.evaluations;
                if (res.f < best_f) {
                    best_f = res.f;
                    best_theta = res.x;
                }
            }
        }
    }
    Eigen::Matrix3d best_h = theta_to_h(best_theta);

    if (cfg.projective_refine) {
        // Re-parameterize as the four mapped sensed-corner positions and let
        // the simplex move all eight coordinates.
        const double w1 = sensed_gray.width - 1.0;
        const double h1 = sensed_gray.height - 1.0;
        const Eigen::Vector2d corners[4] = {{0.0, 0.0}, {w1, 0.0}, {w1, h1}, {0.0, h1}};
        Homography hbest{best_h};
        Eigen::Vector2d mapped[4];
        for (int i = 0; i < 4; ++i) mapped[i] = hbest.apply(corners[i]);

        auto objective8 = [&](const std::vector<double>& delta) {
            std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> pairs;
            pairs.reserve(4);
            for (int i = 0; i < 4; ++i) {
                pairs.emplace_back(corners[i], mapped[i] + Eigen::Vector2d(delta[2 * i],
                                                                           delta[2 * i + 1]));
            }
            Eigen::Matrix3d h;
            try {
                h = homography_from_correspondences(pairs).h;
            } catch (const DomainError&) {
                return 2.0;
            }
            double overlap = 0.0;
            const double mi = objective.evaluate(h, &overlap);
            if (overlap < cfg.min_overlap) return 1.0;
            return -mi;
        };
        const SimplexResult res = nelder_mead(objective8, std::vector<double>(8, 0.0),
                                              std::vector<double>(8, 0.7),
                                              cfg.refine_max_evals, 1e-7);
        total_evals += res.evaluations;
        if (res.f < best_f) {
            best_f = res.f;
            std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> pairs;
            for (int i = 0; i < 4; ++i) {
                pairs.emplace_back(corners[i], mapped[i] + Eigen::Vector2d(res.x[2 * i],
                                                                           res.x[2 * i + 1]));
            }
            best_h = homography_from_correspondences(pairs).h;
        }
    }

    const double best_mi = -best_f;
    if (best_mi + 1e-12 < init_mi) {
        throw RegistrationFailed("optimizer did not improve on the initialization (MI " +
                                 std::to_string(best_mi) + " vs " + std::to_string(init_mi) +
                                 " bits after " + std::to_string(total_evals) + " evaluations)");
    }

    MiRegistration out;
    out.h = normalize_homography(best_h);
    out.mi_bits = best_mi;
    out.init_mi_bits = init_mi;
    out.evaluations = total_evals;
    return out;
}

}  // namespace gsim
