#include "neumag/band.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <unsupported/Eigen/FFT>

#include "neumag/error.hpp"
#include "neumag/tridiagonal.hpp"

namespace neumag::band {

namespace {

const std::string kModule = "reduced_operators";

double fourth_order_slope(const std::function<double(double)>& f, double x, double d) {
    return (f(x - 2.0 * d) - 8.0 * f(x - d) + 8.0 * f(x + d) - f(x + 2.0 * d)) / (12.0 * d);
}

double fourth_order_curvature(const std::function<double(double)>& f, double x, double d) {
    return (-f(x - 2.0 * d) + 16.0 * f(x - d) - 30.0 * f(x) + 16.0 * f(x + d) - f(x + 2.0 * d)) / (12.0 * d * d);
}

Eigen::Matrix2d hessian_at(const BandSymbol& b, double s, double sigma, double h) {
    const double f0 = b(s, sigma);
    Eigen::Matrix2d H;
    H(0, 0) = (b(s + h, sigma) - 2.0 * f0 + b(s - h, sigma)) / (h * h);
    H(1, 1) = (b(s, sigma + h) - 2.0 * f0 + b(s, sigma - h)) / (h * h);
    H(0, 1) = (b(s + h, sigma + h) - b(s + h, sigma - h) - b(s - h, sigma + h) + b(s - h, sigma - h)) / (4.0 * h * h);
    H(1, 0) = H(0, 1);
    return H;
}

struct Interpolants {
    PeriodicInterpolant beta;
    PeriodicInterpolant E;
    PeriodicInterpolant cos_phi;
    PeriodicInterpolant sin_phi;
};

std::shared_ptr<const Interpolants> frame_interpolants(const geometry::GammaFrame& frame) {
    if (!frame.alpha0) throw InvalidArgument("band computations need a frame with E and K");
    auto out = std::make_shared<Interpolants>();
    out->beta = frame.interpolant(&geometry::GammaSample::beta);
    out->E = frame.interpolant(&geometry::GammaSample::E);
    out->cos_phi = frame.interpolant(&geometry::GammaSample::cos_phi_raw);
    out->sin_phi = frame.interpolant(&geometry::GammaSample::sin_phi_raw);
    return out;
}

}  // namespace

CurveFunction montgomery_curve(std::shared_ptr<const model::MontgomeryTable> table) {
    if (!table) throw InvalidArgument("montgomery_curve needs a table");
    CurveFunction c;
    c.value = [table](double x) { return table->value(x); };
    c.derivative = [table](double x) { return table->derivative(x); };
    c.second_derivative = [table](double x) { return table->second_derivative(x); };
    c.lo = table->lo();
    c.hi = table->hi();
    return c;
}

BandSymbol BandSymbol::from_parts(std::function<double(double)> K, std::function<double(double)> scale,
                                  CurveFunction mu, double period, double s_origin,
                                  std::pair<double, double> bracket) {
    if (!(period > 0.0)) throw InvalidArgument("band symbol period must be positive");
    BandSymbol b;
    b.K = std::move(K);
    b.scale = std::move(scale);
    b.mu = std::move(mu);
    b.period = period;
    b.s_origin = s_origin;
    const auto& dmu = b.mu.derivative;
    if (!(dmu(bracket.first) < 0.0 && dmu(bracket.second) > 0.0)) {
        throw NumericalError(kModule, "curve minimizer not bracketed");
    }
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 200;
    auto [lo, hi] = boost::math::tools::toms748_solve(dmu, bracket.first, bracket.second, tol, iters);
    b.xi_star = 0.5 * (lo + hi);
    b.mu_star = b.mu.value(b.xi_star);
    return b;
}

BandSymbol make_band_symbol(const geometry::GammaFrame& frame, const model::ModelConstants& consts,
                            std::shared_ptr<const model::MontgomeryTable> table) {
    const auto interp = frame_interpolants(frame);
    const double a13 = std::cbrt(*frame.alpha0);
    auto K = [interp, a13](double s) {
        const double beta = interp->beta(s);
        return a13 * std::cbrt(beta * beta) * std::cbrt(interp->E(s));
    };
    auto g = [interp, a13](double s) {
        const double E = interp->E(s);
        return a13 / (std::cbrt(E * E) * std::cbrt(interp->beta(s)));
    };
    return BandSymbol::from_parts(K, g, montgomery_curve(std::move(table)), frame.period(), 0.0,
                                  {consts.xi0_m2 - 0.2, consts.xi0_m2 + 0.2});
}

double band_value(double s, double sigma, const geometry::GammaFrame& frame, const model::ModelConstants& consts,
                  std::shared_ptr<const model::MontgomeryTable> table) {
    return make_band_symbol(frame, consts, std::move(table))(s, sigma);
}

// ---------------------------------------------------------------------------

BandAnalysis minimize_band(const BandSymbol& symbol, int num_scan) {
    if (num_scan < 16) throw InvalidArgument("minimize_band needs at least 16 scan points");
    const double P = symbol.period;
    const double h = P / num_scan;
    std::vector<double> k(num_scan);
    for (int j = 0; j < num_scan; ++j) k[j] = symbol.K(symbol.s_origin + j * h);
    const double k_low = *std::min_element(k.begin(), k.end());
    const double k_high = *std::max_element(k.begin(), k.end());
    const double tie = 1e-8 * std::abs(k_low);
    // Among tied minima take the first, so the choice does not hinge on rounding.
    const int j_min = static_cast<int>(
        std::find_if(k.begin(), k.end(), [&](double v) { return v - k_low <= tie; }) - k.begin());

    BandAnalysis a;
    int ties = 0;
    double margin = k_high - k_low;
    for (int j = 0; j < num_scan; ++j) {
        const double prev = k[(j + num_scan - 1) % num_scan];
        const double next = k[(j + 1) % num_scan];
        if (k[j] < prev && k[j] <= next) {
            if (k[j] - k_low <= tie) {
                ++ties;
            } else {
                a.has_second_minimum = true;
                margin = std::min(margin, k[j] - k_low);
            }
        }
    }
    if (ties > 1) {
        a.has_second_minimum = true;
        margin = 0.0;
    }
    a.uniqueness_margin = margin * symbol.mu_star;

    // Outer minimization over s of K(s) mu_star.
    const double s0 = symbol.s_origin + j_min * h;
    auto [s_brent, k_brent] = boost::math::tools::brent_find_minima(symbol.K, s0 - h, s0 + h, 40);
    (void)k_brent;
    const double d = 1e-3 * P / (2.0 * std::numbers::pi);
    const auto dK = [&](double s) { return fourth_order_slope(symbol.K, s, d); };
    double s_min = s_brent;
    const double w = std::max(1e-6 * P, 4.0 * std::abs(s_brent - s0) + 1e-3 * h);
    if (dK(s_brent - w) < 0.0 && dK(s_brent + w) > 0.0) {
        boost::math::tools::eps_tolerance<double> tol(50);
        std::uintmax_t iters = 200;
        auto [lo, hi] = boost::math::tools::toms748_solve(dK, s_brent - w, s_brent + w, tol, iters);
        s_min = 0.5 * (lo + hi);
    }

    a.s_min = s_min;
    a.scale_at_min = symbol.scale(s_min);
    a.sigma_min = symbol.xi_star / a.scale_at_min;
    a.b_min = symbol(s_min, a.sigma_min);
    a.K_min = symbol.K(s_min);
    a.K_second_derivative = fourth_order_curvature(symbol.K, s_min, d);
    a.mu_second_derivative = symbol.mu.second_derivative(symbol.xi_star);
    a.scale_derivative_at_min = fourth_order_slope(symbol.scale, s_min, d);
    a.mixed_term_predicted = a.K_min * a.scale_derivative_at_min * symbol.xi_star * a.mu_second_derivative;

    const Eigen::Matrix2d H1 = hessian_at(symbol, s_min, a.sigma_min, 1e-3);
    const Eigen::Matrix2d H2 = hessian_at(symbol, s_min, a.sigma_min, 2e-3);
    a.hess = (4.0 * H1 - H2) / 3.0;
    a.det_hess = a.hess.determinant();
    if (!(a.hess(0, 0) > 0.0 && a.det_hess > 0.0)) throw NumericalError(kModule, "degenerate band minimum");
    a.harmonic_gap_coefficient = std::sqrt(a.det_hess);

    a.s_min = symbol.s_origin + std::fmod(std::fmod(s_min - symbol.s_origin, P) + P, P);
    return a;
}

BandAnalysis minimize_band(const geometry::GammaFrame& frame, const model::ModelConstants& consts,
                           std::shared_ptr<const model::MontgomeryTable> table) {
    return minimize_band(make_band_symbol(frame, consts, std::move(table)));
}

// ---------------------------------------------------------------------------

model::Discretization reduced_discretization(double s, double sigma, const geometry::GammaFrame& frame,
                                             const model::ModelConstants& consts, int num_points) {
    const auto interp = frame_interpolants(frame);
    const double beta = interp->beta(s);
    const double E = interp->E(s);
    const double alpha0 = *frame.alpha0;
    (void)consts;
    const double length = std::pow(E * E / (alpha0 * beta * beta), 1.0 / 6.0);
    const double g = std::cbrt(alpha0) / (std::cbrt(E * E) * std::cbrt(beta));
    const double half_width = std::sqrt(2.0 * std::abs(g * sigma)) + 10.0;
    model::Discretization d = model::Discretization::montgomery(num_points, half_width * length);
    d.num_points = std::max(num_points, static_cast<int>(std::ceil(num_points * half_width / 16.0)));
    return d;
}

double reduced_ground_energy_direct(double s, double sigma, const geometry::GammaFrame& frame,
                                    const model::ModelConstants& consts, const model::Discretization& disc,
                                    const ReducedOptions& options) {
    disc.validate();
    if (disc.domain_kind != model::DomainKind::full_line) {
        throw InvalidArgument("reduced operator needs a full-line discretization");
    }
    const auto interp = frame_interpolants(frame);
    const double alpha0 = consts.alpha0;
    const double beta = interp->beta(s);
    const double c = interp->cos_phi(s);
    const double sn = interp->sin_phi(s);
    const double norm = std::hypot(c, sn);
    const double cphi = c / norm;
    const double sphi = sn / norm;
    const double E = alpha0 * sphi * sphi + cphi * cphi;
    const double cross = cphi * sphi * (1.0 - alpha0);

    const auto solve = [&](const model::Discretization& d, std::vector<double>* grid) {
        const double h = d.step();
        const double R = d.truncation_radius;
        const std::size_t n = static_cast<std::size_t>(d.num_points - 1);
        std::vector<double> r(n);
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = -R + static_cast<double>(i + 1) * h;
            p[i] = sigma - 0.5 * beta * r[i] * r[i];
        }
        // Hermitian tridiagonal: real diagonal, complex off-diagonal.
        std::vector<double> diag(n);
        std::vector<std::complex<double>> off(n - 1);
        if (!options.expand_cross_term) {
            // E (D + A)^2 + (alpha0/E) p^2 with A = cross p / E, Peierls phases
            // theta_k = int_{r_k}^{r_{k+1}} A dr (exact for a quadratic p).
            const auto prim = [&](double x) { return cross / E * (sigma * x - beta * x * x * x / 6.0); };
            for (std::size_t i = 0; i < n; ++i) diag[i] = 2.0 * E / (h * h) + alpha0 / E * p[i] * p[i];
            for (std::size_t i = 0; i + 1 < n; ++i) {
                double theta = prim(r[i + 1]) - prim(r[i]);
                if (options.gauge) theta += options.gauge(r[i + 1]) - options.gauge(r[i]);
                off[i] = -E / (h * h) * std::polar(1.0, -theta);
            }
        } else {
            // E D^2 + cross (D p + p D) + q p^2 with central differences.
            const double q = alpha0 * cphi * cphi + sphi * sphi;
            for (std::size_t i = 0; i < n; ++i) diag[i] = 2.0 * E / (h * h) + q * p[i] * p[i];
            for (std::size_t i = 0; i + 1 < n; ++i) {
                off[i] = std::complex<double>(-E / (h * h), -cross * (p[i] + p[i + 1]) / (2.0 * h));
                if (options.gauge) off[i] *= std::polar(1.0, -(options.gauge(r[i + 1]) - options.gauge(r[i])));
            }
        }
        // A diagonal unitary similarity maps each off-diagonal b_k to |b_k|.
        SymTridiagonal m;
        m.diag = diag;
        m.off.resize(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) m.off[i] = -std::abs(off[i]);
        Eigenpair pair = lowest_eigenpair(m);
        if (!std::isfinite(pair.value)) throw NumericalError(kModule, "reduced eigensolver failed");
        if (grid) {
            double edge = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (std::abs(r[i]) > 0.9 * R) edge += pair.vector[i] * pair.vector[i];
            }
            if (edge > 1e-10) {
                throw NumericalError(kModule, "truncation insufficient: boundary mass " + std::to_string(edge));
            }
            *grid = r;
        }
        return pair.value;
    };

    std::vector<double> grid;
    const double coarse = solve(disc, nullptr);
    const double fine = solve(disc.refined(), &grid);
    return (4.0 * fine - coarse) / 3.0;
}

// ---------------------------------------------------------------------------

std::pair<double, double> quantization_curve_range(const BandSymbol& symbol, double epsilon, int num_points) {
    const double w = 2.0 * std::numbers::pi / symbol.period;
    const double sigma_lo = -epsilon * w * (num_points / 2);
    const double sigma_hi = epsilon * w * (num_points / 2 - 1);
    double g_lo = std::numeric_limits<double>::infinity();
    double g_hi = -g_lo;
    for (int p = 0; p < 2 * num_points; ++p) {
        const double g = symbol.scale(symbol.s_origin + 0.5 * p * symbol.period / num_points);
        g_lo = std::min(g_lo, g);
        g_hi = std::max(g_hi, g);
    }
    const double a = std::min({g_lo * sigma_lo, g_hi * sigma_lo, g_lo * sigma_hi, g_hi * sigma_hi});
    const double b = std::max({g_lo * sigma_lo, g_hi * sigma_lo, g_lo * sigma_hi, g_hi * sigma_hi});
    return {a, b};
}

QuantizedBand quantize_band(const BandSymbol& symbol, double epsilon, int num_points) {
    if (!(epsilon > 0.0 && epsilon <= 0.3)) throw InvalidArgument("epsilon must lie in (0, 0.3]");
    if (num_points < 128 || (num_points & (num_points - 1)) != 0) {
        throw InvalidArgument("num_points must be a power of two >= 128");
    }
    const auto [need_lo, need_hi] = quantization_curve_range(symbol, epsilon, num_points);
    if (need_lo < symbol.mu.lo || need_hi > symbol.mu.hi) {
        throw NumericalError(kModule, "band table range exceeded: need [" + std::to_string(need_lo) + ", " +
                                          std::to_string(need_hi) + "]");
    }

    const int N = num_points;
    const double w = 2.0 * std::numbers::pi / symbol.period;
    const double ds = symbol.period / N;

    // For each half-grid midpoint, C[p][q] = (1/N) sum_m b(s_p, eps w_m) e^{2 pi i m q / N}.
    Eigen::FFT<double> fft;
    std::vector<std::vector<std::complex<double>>> C(2 * N);
    std::vector<std::complex<double>> in(N);
    for (int p = 0; p < 2 * N; ++p) {
        const double s = symbol.s_origin + 0.5 * p * ds;
        const double K = symbol.K(s);
        const double g = symbol.scale(s);
        for (int k = 0; k < N; ++k) {
            const int m = k < N / 2 ? k : k - N;
            in[k] = K * symbol.mu.value(g * epsilon * w * m);
        }
        fft.inv(C[p], in);
    }

    QuantizedBand out;
    out.epsilon = epsilon;
    out.num_points = N;
    out.matrix.resize(N, N);
    for (int j = 0; j < N; ++j) {
        for (int k = 0; k < N; ++k) {
            int q = ((j - k) % N + N) % N;
            if (q >= N / 2) q -= N;
            const int p = ((2 * k + q) % (2 * N) + 2 * N) % (2 * N);
            out.matrix(j, k) = C[p][(q + N) % N];
        }
    }
    out.matrix = (0.5 * (out.matrix + out.matrix.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(out.matrix, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError(kModule, "quantized band eigensolver failed");
    out.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + N);
    return out;
}

double harmonic_levels(const BandAnalysis& analysis, double epsilon, int n) {
    if (n < 1) throw InvalidArgument("harmonic level index must be >= 1");
    return analysis.b_min + (2.0 * n - 1.0) * 0.5 * epsilon * analysis.harmonic_gap_coefficient;
}

}  // namespace neumag::band
