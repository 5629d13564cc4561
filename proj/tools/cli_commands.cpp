#include "cli_commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "neumag/asymptotics.hpp"
#include "neumag/band.hpp"
#include "neumag/error.hpp"
#include "neumag/model_operators.hpp"
#include "neumag/montgomery_table.hpp"
#include "neumag/shooting.hpp"
#include "neumag/surface_geometry.hpp"

#ifndef NEUMAG_VERSION
#define NEUMAG_VERSION "0.0.0"
#endif

namespace neumag::cli {

using nlohmann::json;

namespace {

double sig12(double v) {
    if (!std::isfinite(v)) return v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

json sig12(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) out.push_back(sig12(x));
    return out;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw InvalidArgument("not a number: '" + item + "'");
        }
        if (item.find_first_not_of(" \t", used) != std::string::npos) {
            throw InvalidArgument("not a number: '" + item + "'");
        }
        out.push_back(v);
    }
    return out;
}

// ---------------------------------------------------------------------------

class Session {
public:
    Session(RunConfig cfg, std::ostream& out) : cfg_(std::move(cfg)), out_(out) {
        std::filesystem::create_directories(cfg_.out);
    }

    const RunConfig& cfg() const { return cfg_; }

    const model::ModelConstants& constants() {
        if (!consts_) {
            consts_ = model::model_constants(model::Discretization::de_gennes(cfg_.resolution),
                                             model::Discretization::montgomery(cfg_.resolution));
        }
        return *consts_;
    }

    const geometry::Surface& surface() {
        if (!surface_) surface_ = surface_from_json(cfg_.surface);
        return *surface_;
    }

    const geometry::GammaFrame& frame() {
        if (!frame_) frame_ = geometry::gamma_frame(surface(), cfg_.num_samples, constants().alpha0);
        return *frame_;
    }

    /// Montgomery table covering [-|x|, |x|] for x = widest mu-argument of
    /// the quantization runs (and at least [-3, 4]).
    std::shared_ptr<const model::MontgomeryTable> table() {
        if (!table_) {
            const auto& fr = frame();
            const double a13 = std::cbrt(constants().alpha0);
            double g_max = 0.0;
            for (const auto& g : fr.samples) g_max = std::max(g_max, a13 / (std::cbrt(g.E * g.E) * std::cbrt(g.beta)));
            const double eps_max = *std::max_element(cfg_.epsilon.begin(), cfg_.epsilon.end());
            const double reach = 1.02 * g_max * eps_max * std::numbers::pi * cfg_.quantize_points / fr.period() + 0.1;
            table_ = std::make_shared<const model::MontgomeryTable>(model::MontgomeryTable::build(
                std::min(-3.0, -reach), std::max(4.0, reach), model::Discretization::montgomery(cfg_.resolution)));
        }
        return table_;
    }

    const band::BandSymbol& symbol() {
        if (!symbol_) symbol_ = band::make_band_symbol(frame(), constants(), table());
        return *symbol_;
    }

    const band::BandAnalysis& analysis() {
        if (!analysis_) analysis_ = band::minimize_band(symbol());
        return *analysis_;
    }

    json meta(const std::string& command) const {
        return {{"tool", "neumag"}, {"version", NEUMAG_VERSION}, {"config_hash", cfg_.hash()}, {"command", command}};
    }

    std::string csv_header(const std::string& command) const {
        return "# tool: neumag " + std::string(NEUMAG_VERSION) + "\n# config_hash: " + cfg_.hash() +
               "\n# command: " + command + "\n";
    }

    void write_json(const std::string& name, const std::string& command, json body) {
        body["meta"] = meta(command);
        const auto path = cfg_.out / name;
        std::ofstream f(path);
        f << body.dump(2) << "\n";
        if (!f) throw std::runtime_error("cannot write " + path.string());
        out_ << "wrote " << path.string() << "\n";
    }

    std::ofstream open_csv(const std::string& name, const std::string& command) {
        const auto path = cfg_.out / name;
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        f << csv_header(command);
        f << std::setprecision(12);
        out_ << "wrote " << path.string() << "\n";
        return f;
    }

    std::ostream& out() { return out_; }

private:
    RunConfig cfg_;
    std::ostream& out_;
    std::optional<model::ModelConstants> consts_;
    std::optional<geometry::Surface> surface_;
    std::optional<geometry::GammaFrame> frame_;
    std::shared_ptr<const model::MontgomeryTable> table_;
    std::optional<band::BandSymbol> symbol_;
    std::optional<band::BandAnalysis> analysis_;
};

json constants_json(const model::ModelConstants& c) {
    return {{"theta0", sig12(c.theta0)},       {"xi0", sig12(c.xi0)},         {"alpha0", sig12(c.alpha0)},
            {"theta0_m2", sig12(c.theta0_m2)}, {"xi0_m2", sig12(c.xi0_m2)}, {"curv_m2", sig12(c.curv_m2)}};
}

json report_json(const geometry::AssumptionsReport& r) {
    return {{"linear_vanishing", r.linear_vanishing},
            {"K_unique_nondegenerate_min", r.K_unique_nondegenerate_min},
            {"s_min", sig12(r.s_min)},
            {"K_min", sig12(r.K_min)},
            {"K_second_derivative", sig12(r.K_second_derivative)},
            {"beta_min", sig12(r.beta_min)},
            {"num_global_minima", r.num_global_minima},
            {"second_minimum_margin", sig12(r.second_minimum_margin)}};
}

json analysis_json(const band::BandAnalysis& a) {
    return {{"s_min", sig12(a.s_min)},
            {"sigma_min", sig12(a.sigma_min)},
            {"b_min", sig12(a.b_min)},
            {"hess", {{sig12(a.hess(0, 0)), sig12(a.hess(0, 1))}, {sig12(a.hess(1, 0)), sig12(a.hess(1, 1))}}},
            {"det_hess", sig12(a.det_hess)},
            {"harmonic_gap_coefficient", sig12(a.harmonic_gap_coefficient)},
            {"diagnostics",
             {{"K_min", sig12(a.K_min)},
              {"K_second_derivative", sig12(a.K_second_derivative)},
              {"mixed_term_predicted", sig12(a.mixed_term_predicted)},
              {"uniqueness_margin", sig12(a.uniqueness_margin)},
              {"has_second_minimum", a.has_second_minimum}}},
            {"excluded", "subprincipal shifts of the harmonic levels are not computed"}};
}

// ---------------------------------------------------------------------------

int cmd_constants(Session& S) {
    const auto& c = S.constants();
    json body = constants_json(c);
    S.write_json("constants.json", "constants", body);
    body.erase("meta");
    S.out() << body.dump(2) << "\n";
    return kExitOk;
}

int cmd_curve(Session& S) {
    auto f = S.open_csv("curve.csv", "curve");
    f << "xi,mu1_dg,mu1_montgomery\n";
    const auto dg = model::Discretization::de_gennes(S.cfg().resolution);
    const auto mg = model::Discretization::montgomery(S.cfg().resolution);
    for (int i = 0; i <= 80; ++i) {
        const double xi = -1.0 + 0.05 * i;
        f << xi << "," << model::de_gennes_extrapolated(xi, dg).value << ","
          << model::montgomery_extrapolated(xi, mg).value << "\n";
    }
    return kExitOk;
}

int cmd_geometry(Session& S) {
    const auto& fr = S.frame();
    auto f = S.open_csv("geometry.csv", "geometry");
    f << "s,phi,beta,kappa_g,E,K\n";
    for (const auto& g : fr.samples) {
        f << g.s << "," << g.phi << "," << g.beta << "," << g.kappa_g << "," << g.E << "," << g.K << "\n";
    }
    const auto report = geometry::verify_assumptions(fr);
    json body = {{"L", sig12(fr.half_length)},
                 {"s_min", sig12(report.s_min)},
                 {"K_min", sig12(report.K_min)},
                 {"assumptions_report", report_json(report)}};
    S.write_json("geometry.json", "geometry", body);
    return kExitOk;
}

int cmd_band(Session& S) {
    const auto& a = S.analysis();
    const auto& b = S.symbol();
    auto f = S.open_csv("band.csv", "band");
    f << "s,sigma,b\n";
    const int ns = 64;
    const int nsig = 41;
    for (int i = 0; i < ns; ++i) {
        const double s = b.period * i / ns;
        for (int j = 0; j < nsig; ++j) {
            const double sigma = a.sigma_min - 1.5 + 3.0 * j / (nsig - 1);
            f << s << "," << sigma << "," << b(s, sigma) << "\n";
        }
    }
    S.write_json("band.json", "band", analysis_json(a));
    return kExitOk;
}

int cmd_quantize(Session& S) {
    const auto& a = S.analysis();
    json runs = json::array();
    const int keep = std::max(8, 2 * S.cfg().n_max);
    for (double eps : S.cfg().epsilon) {
        const auto q = band::quantize_band(S.symbol(), eps, S.cfg().quantize_points);
        std::vector<double> head(q.eigenvalues.begin(), q.eigenvalues.begin() + keep);
        std::vector<double> harmonic;
        for (int n = 1; n <= keep; ++n) harmonic.push_back(band::harmonic_levels(a, eps, n));
        runs.push_back({{"epsilon", eps}, {"eigenvalues", sig12(head)}, {"harmonic_levels", sig12(harmonic)}});
    }
    json body = {{"num_points", S.cfg().quantize_points}, {"b_min", sig12(a.b_min)}, {"runs", runs}};
    S.write_json("quantize.json", "quantize", body);
    return kExitOk;
}

void write_profile(Session& S, const asymptotics::EigenfunctionProfile& p) {
    const std::string name = "profile_n" + std::to_string(p.n) + ".bin";
    const auto path = S.cfg().out / name;
    json header = {{"meta", S.meta("predict")},
                   {"n", p.n},
                   {"h", p.h},
                   {"shape", {p.t_samples.size(), p.r_samples.size(), p.s_samples.size()}},
                   {"layout", "row-major (t, r, s), float64 little-endian, follows the header line"},
                   {"t", p.t_samples},
                   {"r", p.r_samples},
                   {"s", p.s_samples},
                   {"scales",
                    {{"r_scale", p.r_scale},
                     {"s_scale", p.s_scale},
                     {"s_scale_hessian", p.s_scale_hessian},
                     {"s_scale_relative_difference", p.s_scale_relative_difference}}}};
    std::ofstream f(path, std::ios::binary);
    f << header.dump() << "\n";
    f.write(reinterpret_cast<const char*>(p.values.data()),
            static_cast<std::streamsize>(p.values.size() * sizeof(double)));
    if (!f) throw std::runtime_error("cannot write " + path.string());
    S.out() << "wrote " << path.string() << "\n";
}

int cmd_predict(Session& S) {
    const auto& a = S.analysis();
    std::vector<asymptotics::EigenvaluePrediction> rows;
    for (double h : S.cfg().h) {
        for (int n = 1; n <= S.cfg().n_max; ++n) {
            rows.push_back(asymptotics::predict_eigenvalue(n, h, S.constants(), S.frame(), a));
        }
    }
    auto f = S.open_csv("predict.csv", "predict");
    f << "# unknown: d0 h^{3/2} + d1 h^{5/3} not included; remainder o(h^{5/3})\n";
    f << "n,h,term_h,term_h43,term_h53,gap\n";
    for (const auto& p : rows) {
        f << p.n << "," << p.h << "," << p.term_h << "," << p.term_h43 << "," << p.term_h53 << "," << p.gap_to_next
          << "\n";
    }
    const double h0 = S.cfg().h.front();
    for (int n = 1; n <= std::min(S.cfg().n_max, 10); ++n) {
        const auto grids = asymptotics::default_profile_grids(n, h0, S.constants(), S.frame(), a);
        write_profile(S, asymptotics::eigenfunction_profile(n, h0, S.constants(), S.frame(), a, grids,
                                                            model::Discretization::de_gennes(S.cfg().resolution),
                                                            model::Discretization::montgomery(S.cfg().resolution)));
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct Check {
    std::string name;
    std::string status;  // PASS, FAIL, SKIP
    std::string detail;
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

int cmd_validate(Session& S) {
    std::vector<Check> checks;
    const auto bound = [&](const std::string& name, double value, double tol) {
        const bool ok = std::isfinite(value) && value <= tol;
        checks.push_back({name, ok ? "PASS" : "FAIL", sci(value) + " <= " + sci(tol)});
        return ok;
    };
    const auto flag = [&](const std::string& name, bool ok, const std::string& detail) {
        checks.push_back({name, ok ? "PASS" : "FAIL", detail});
    };
    const auto guarded = [&](const std::string& name, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            checks.push_back({name, "FAIL", e.what()});
        }
    };

    guarded("model constants", [&] {
        const auto& c = S.constants();
        c.validate();
        flag("model constants invariants", true, "theta0 = " + std::to_string(c.theta0));
        bound("stationarity |mu(xi0) - xi0^2|", std::abs(c.theta0 - c.xi0 * c.xi0), 1e-6);
        const auto dg = model::Discretization::de_gennes(S.cfg().resolution);
        double worst = 0.0;
        for (double xi : {0.3, c.xi0, 1.2}) {
            worst = std::max(worst, std::abs(model::de_gennes_extrapolated(xi, dg).value -
                                             model::mu1_de_gennes_shooting(xi)));
        }
        bound("shooting vs finite differences", worst, 1e-7);
        bound("mu_dG(0) = 1", std::abs(model::de_gennes_extrapolated(0.0, dg).value - 1.0), 2e-4);
        const auto fine = model::model_constants(dg.refined(), model::Discretization::montgomery(2 * S.cfg().resolution));
        bound("constants at N vs 2N",
              std::max({std::abs(fine.theta0 - c.theta0), std::abs(fine.xi0 - c.xi0), std::abs(fine.alpha0 - c.alpha0),
                        std::abs(fine.theta0_m2 - c.theta0_m2), std::abs(fine.xi0_m2 - c.xi0_m2)}),
              1e-7);
        double ortho = 0.0;
        for (int m = 0; m <= 5; ++m) {
            for (int n = 0; n <= 5; ++n) {
                double sum = 0.0;
                const double dx = 1e-3;
                for (int k = -20000; k <= 20000; ++k) {
                    sum += model::hermite_function(m, k * dx) * model::hermite_function(n, k * dx) * dx;
                }
                ortho = std::max(ortho, std::abs(sum - (m == n ? 1.0 : 0.0)));
            }
        }
        bound("Hermite orthonormality", ortho, 1e-7);
    });

    guarded("geometry", [&] {
        const auto& fr = S.frame();
        double unit = 0.0, orth = 0.0, direct = 0.0, tangent = 0.0, trig = 0.0, recompute = 0.0;
        double beta_min = fr.samples[0].beta;
        const double a0 = *fr.alpha0;
        for (const auto& g : fr.samples) {
            unit = std::max({unit, std::abs(g.dr_gamma.norm() - 1.0), std::abs(g.ds_gamma.norm() - 1.0)});
            orth = std::max(orth, std::abs(g.dr_gamma.dot(g.ds_gamma)));
            Eigen::Matrix3d m;
            m << g.dr_gamma, g.ds_gamma, g.normal;
            direct = std::max(direct, std::abs(m.determinant() - 1.0));
            tangent = std::max(tangent, std::abs(g.normal.z()));
            trig = std::max(trig, std::abs(std::cos(g.phi) * std::cos(g.phi) + std::sin(g.phi) * std::sin(g.phi) - 1.0));
            const double E = a0 * g.sin_phi_raw * g.sin_phi_raw + g.cos_phi_raw * g.cos_phi_raw;
            const double K = std::cbrt(a0 * g.beta * g.beta * E);
            recompute = std::max({recompute, std::abs(E - g.E), std::abs(K - g.K)});
            beta_min = std::min(beta_min, g.beta);
        }
        bound("frame unit vectors", unit, 1e-10);
        bound("frame orthogonality", orth, 1e-10);
        bound("frame direct triple", direct, 1e-9);
        bound("normal . e3 on contour", tangent, 1e-8);
        bound("cos^2 + sin^2 of phi", trig, 1e-9);
        bound("E, K recomputation", recompute, 1e-12);
        flag("beta > 0 (linear vanishing)", beta_min > 0.0, "min beta = " + sci(beta_min));
        bound("closure", (fr.samples.front().gamma - fr.samples.back().gamma).norm(), 1e-9);

        const double r_max = 0.2 * S.surface().length_scale();
        const int steps = std::max(4, static_cast<int>(std::ceil(400.0 * r_max)));
        const auto chart = geometry::geodesic_extend(S.surface(), fr, r_max, steps);
        bound("geodesic speed drift", chart.max_speed_drift, 1e-9);
        bound("geodesic surface distance", chart.max_surface_distance, 1e-10);
        double alpha1 = 0.0, ds_alpha = 0.0, dr_alpha = 0.0, norm34 = 0.0, gauss = 0.0, residual = 0.0;
        const auto i0 = static_cast<std::size_t>(chart.zero_index);
        const std::size_t m = fr.distinct();
        for (std::size_t j = 0; j < chart.ns(); ++j) {
            alpha1 = std::max(alpha1, std::abs(chart.alpha[chart.index(i0, j)] - 1.0));
            const std::size_t jp = (j + 1) % m;
            const std::size_t jm = (j + m - 1) % m;
            ds_alpha = std::max(ds_alpha, std::abs(chart.alpha[chart.index(i0, jp)] - chart.alpha[chart.index(i0, jm)]) /
                                              (2.0 * fr.spacing()));
            dr_alpha = std::max(dr_alpha, std::abs(chart.dr_alpha(j) +
                                                   2.0 * geometry::frenet_geodesic_curvature(fr, chart.s_grid[j])));
            for (std::size_t i = 0; i < chart.nr(); ++i) {
                const std::size_t idx = chart.index(i, j);
                const Eigen::Vector3d b = chart.b_frame[idx];
                norm34 = std::max(norm34, std::abs(b.x() * b.x() + chart.alpha[idx] * b.y() * b.y() + b.z() * b.z() - 1.0));
                gauss = std::max(gauss, std::abs(chart.dr_gamma[idx].dot(chart.ds_gamma[idx])));
            }
            residual = std::max(residual, geometry::cancellation_residual(chart, chart.s_grid[j]));
        }
        bound("alpha(0,s) = 1", alpha1, 1e-9);
        bound("d_s alpha(0,s) = 0", ds_alpha, 1e-7);
        bound("d_r alpha(0,s) + 2 kappa_g", dr_alpha, 1e-5);
        bound("field normalization on t = 0", norm34, 1e-8);
        bound("<dr_gamma, ds_gamma> on chart", gauss, 1e-8);
        bound("cancellation residual", residual, 1e-4);

        const auto& surf = S.surface();
        if (surf.kind() == geometry::SurfaceKind::ellipsoid) {
            const auto ax = surf.axes();
            if (ax[0] == ax[1] && ax[1] == ax[2]) {
                double cos2 = 0.0;
                for (std::size_t idx = 0; idx < chart.alpha.size(); ++idx) {
                    const double c = std::cos(chart.r_grid[idx % chart.nr()] / ax[0]);
                    cos2 = std::max(cos2, std::abs(chart.alpha[idx] - c * c));
                }
                bound("sphere alpha = cos^2 r", cos2, 1e-8);
            }
            if (surf.rotation().isIdentity(0.0)) {
                double best = 0.0;
                double beta_major = 0.0;
                for (const auto& g : fr.samples) {
                    const double x = g.gamma.norm();
                    if (x > best) {
                        best = x;
                        beta_major = g.beta;
                    }
                }
                bound("|beta| = a / c^2 at the major axis", std::abs(std::abs(beta_major) - std::max(ax[0], ax[1]) / (ax[2] * ax[2])), 1e-6);
            }
        }
    });

    guarded("flux", [&] {
        const auto& surf = S.surface();
        if (!surf.z_symmetric()) {
            checks.push_back({"mean circulation", "SKIP", "surface is not z-symmetric"});
            return;
        }
        const double f = geometry::mean_circulation(surf);
        if (surf.kind() == geometry::SurfaceKind::ellipsoid) {
            const auto ax = surf.axes();
            bound("mean circulation vs pi a b / |contour|",
                  std::abs(f - std::numbers::pi * ax[0] * ax[1] / S.frame().period()), 1e-6);
        } else {
            flag("mean circulation converged", std::isfinite(f), "value " + sci(f));
        }
    });

    guarded("band", [&] {
        const auto& c = S.constants();
        const auto& sym = S.symbol();
        double worst = 0.0;
        for (int i = 0; i < 3; ++i) {
            for (int j = -1; j <= 1; j += 2) {
                const double s = sym.period * (0.1 + 0.3 * i);
                const double sigma = c.xi0_m2 / sym.scale(s) + 0.3 * j;
                const auto disc = band::reduced_discretization(s, sigma, S.frame(), c, S.cfg().resolution);
                const double direct = band::reduced_ground_energy_direct(s, sigma, S.frame(), c, disc);
                const double v = sym(s, sigma);
                worst = std::max(worst, std::abs(direct - v) / v);
            }
        }
        bound("direct reduced operator vs band", worst, 1e-6);

        const auto report = geometry::verify_assumptions(S.frame());
        if (report.num_global_minima > 2) {
            checks.push_back({"band minimum and quantized levels", "SKIP", "K is constant along the contour"});
            return;
        }
        const auto& a = S.analysis();
        bound("b_min = K_min Theta0^[2]", std::abs(a.b_min - report.K_min * c.theta0_m2), 1e-8);
        const double closed = c.xi0_m2 / sym.scale(a.s_min);
        bound("sigma_min closed form", std::abs(a.sigma_min - closed), 1e-7);
        flag("band Hessian positive definite", a.hess(0, 0) > 0.0 && a.det_hess > 0.0, "det = " + sci(a.det_hess));

        // Harmonic levels at the smallest epsilon. A symbol with m tied wells
        // has eigenvalues in near-degenerate groups of m.
        const double eps = S.cfg().epsilon.back();
        const auto q = band::quantize_band(S.symbol(), eps, S.cfg().quantize_points);
        const int wells = std::max(1, report.num_global_minima);
        double worst_level = 0.0;
        for (int n = 1; n <= 3; ++n) {
            const double target = (2.0 * n - 1.0) * a.harmonic_gap_coefficient / 2.0;
            for (int w = 0; w < wells; ++w) {
                const double got = (q.eigenvalues[wells * (n - 1) + w] - a.b_min) / eps;
                worst_level = std::max(worst_level, std::abs(got - target) / target);
            }
        }
        bound("quantized levels vs harmonic (relative, " + std::to_string(wells) + " well(s))", worst_level, 0.05);
    });

    guarded("asymptotics", [&] {
        const auto report = geometry::verify_assumptions(S.frame());
        if (!report.linear_vanishing || !report.K_unique_nondegenerate_min) {
            checks.push_back({"expansion and profile checks", "SKIP",
                              "K minimum not unique (" + std::to_string(report.num_global_minima) + " tied minima)"});
            return;
        }
        const auto& a = S.analysis();
        double spread = 0.0;
        const double coeff = a.harmonic_gap_coefficient;
        for (double h : S.cfg().h) {
            for (int n = 1; n <= S.cfg().n_max; ++n) {
                const auto p = asymptotics::predict_eigenvalue(n, h, S.constants(), S.frame(), a);
                spread = std::max(spread, std::abs(p.gap_to_next / std::pow(h, 5.0 / 3.0) - coeff) / coeff);
            }
        }
        bound("gap / h^{5/3} constant", spread, 1e-12);
        const double h = S.cfg().h.front();
        int bad_nodes = 0;
        double norm_err = 0.0;
        for (int n = 1; n <= std::min(S.cfg().n_max, 6); ++n) {
            const auto grids = asymptotics::default_profile_grids(n, h, S.constants(), S.frame(), a, 24, 24, 160);
            const auto p = asymptotics::eigenfunction_profile(n, h, S.constants(), S.frame(), a, grids);
            if (asymptotics::count_sign_changes(p.w_s) != n - 1) ++bad_nodes;
            norm_err = std::max({norm_err, std::abs(asymptotics::grid_norm(p.t_samples, p.u_t) - 1.0),
                                 std::abs(asymptotics::grid_norm(p.r_samples, p.v_r) - 1.0),
                                 std::abs(asymptotics::grid_norm(p.s_samples, p.w_s) - 1.0)});
        }
        flag("profile node counts", bad_nodes == 0, std::to_string(bad_nodes) + " mismatches");
        bound("profile factor normalization", norm_err, 1e-6);
    });

    int failures = 0;
    json table = json::array();
    for (const auto& c : checks) {
        if (c.status == "FAIL") ++failures;
        S.out() << std::left << std::setw(5) << c.status << " " << std::setw(58) << c.name << " " << c.detail << "\n";
        table.push_back({{"check", c.name}, {"status", c.status}, {"detail", c.detail}});
    }
    S.out() << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed") << "\n";
    S.write_json("validate.json", "validate", {{"checks", table}, {"failures", failures}});
    return failures == 0 ? kExitOk : kExitNumerical;
}

}  // namespace

// ---------------------------------------------------------------------------

void RunConfig::validate() {
    if (resolution < 3) throw InvalidArgument("resolution must be >= 3");
    if (n_max < 1) throw InvalidArgument("nmax must be >= 1");
    if (num_samples < 16) throw InvalidArgument("num_samples must be >= 16");
    if (quantize_points < 128 || (quantize_points & (quantize_points - 1)) != 0) {
        throw InvalidArgument("quantize_points must be a power of two >= 128");
    }
    if (epsilon.empty()) throw InvalidArgument("epsilon list is empty");
    if (h.empty()) throw InvalidArgument("h list is empty");
    for (double e : epsilon) {
        if (!(e > 0.0 && e <= 0.3)) throw InvalidArgument("epsilon values must lie in (0, 0.3]");
    }
    for (double x : h) {
        if (!(x > 0.0 && x < 1.0)) throw InvalidArgument("h values must lie in (0, 1)");
    }
    std::sort(epsilon.begin(), epsilon.end(), std::greater<>());
    std::sort(h.begin(), h.end(), std::greater<>());
    epsilon.erase(std::unique(epsilon.begin(), epsilon.end()), epsilon.end());
    h.erase(std::unique(h.begin(), h.end()), h.end());
    surface_from_json(surface);
}

json RunConfig::to_json() const {
    return {{"surface", surface}, {"resolution", resolution}, {"epsilon", epsilon},
            {"h", h},             {"n_max", n_max},           {"num_samples", num_samples},
            {"quantize_points", quantize_points}, {"deterministic", deterministic}};
}

std::string RunConfig::hash() const {
    const std::string text = to_json().dump();
    std::uint64_t x = 14695981039346656037ull;
    for (unsigned char ch : text) {
        x ^= ch;
        x *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

geometry::Surface surface_from_json(const json& desc) {
    if (desc.is_string()) return geometry::Surface::preset(desc.get<std::string>());
    if (!desc.is_object() || !desc.contains("kind")) throw InvalidArgument("surface description needs a 'kind'");
    const std::string kind = desc.at("kind").get<std::string>();
    try {
        if (kind == "preset") return geometry::Surface::preset(desc.at("name").get<std::string>());
        if (kind == "ellipsoid") {
            return geometry::Surface::ellipsoid(desc.at("a").get<double>(), desc.at("b").get<double>(),
                                                desc.at("c").get<double>());
        }
        if (kind == "sphere") return geometry::Surface::sphere(desc.value("R", 1.0));
        if (kind == "egg") {
            return geometry::Surface::egg(desc.value("a", 2.0), desc.value("b", 1.0), desc.value("c", 1.0),
                                          desc.value("k", 0.2));
        }
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed surface description: ") + e.what());
    }
    throw InvalidArgument("unknown surface kind '" + kind + "'");
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Semiclassical eigenvalue asymptotics of the Neumann magnetic Laplacian", "neumag"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print this help and exit");
    app.set_version_flag("--version", std::string("neumag ") + NEUMAG_VERSION);

    std::string surface_flag;
    std::string config_flag;
    std::string out_flag;
    int resolution_flag = 0;
    std::optional<std::string> epsilon_flag;
    std::optional<std::string> h_flag;
    int nmax_flag = 0;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"constants", "model constants as JSON"},
        {"curve", "de Gennes and Montgomery curves as CSV"},
        {"geometry", "contour coefficients as CSV plus a JSON summary"},
        {"band", "band function grid as CSV plus its analysis as JSON"},
        {"quantize", "low eigenvalues of the quantized band"},
        {"predict", "expansion terms as CSV plus eigenfunction profiles"},
        {"validate", "run the invariant suite and print a pass/fail table"}};
    std::vector<std::string> names;
    std::vector<CLI::App*> subs;
    for (const auto& [name, about] : commands) {
        names.push_back(name);
        CLI::App* sub = app.add_subcommand(name, about);
        sub->set_help_flag("--help", "print this help and exit");
        sub->add_option("--surface", surface_flag, "preset name or JSON surface description");
        sub->add_option("--config", config_flag, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--out", out_flag, "output directory");
        sub->add_option("--resolution", resolution_flag, "grid points of the model eigensolves");
        sub->add_option("--epsilon", epsilon_flag, "comma-separated epsilon list");
        sub->add_option("--h", h_flag, "comma-separated h list");
        sub->add_option("--nmax", nmax_flag, "number of levels");
        subs.push_back(sub);
    }

    try {
        std::vector<std::string> args;
        for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << std::string("neumag ") + NEUMAG_VERSION << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    std::string command;
    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (subs[i]->parsed()) command = names[i];
    }

    RunConfig cfg;
    try {
        if (!config_flag.empty()) {
            std::ifstream f(config_flag);
            const json j = json::parse(f);
            if (j.contains("surface")) cfg.surface = j.at("surface");
            if (j.contains("resolution")) cfg.resolution = j.at("resolution").get<int>();
            if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<std::vector<double>>();
            if (j.contains("h")) cfg.h = j.at("h").get<std::vector<double>>();
            if (j.contains("h_list")) cfg.h = j.at("h_list").get<std::vector<double>>();
            if (j.contains("n_max")) cfg.n_max = j.at("n_max").get<int>();
            if (j.contains("num_samples")) cfg.num_samples = j.at("num_samples").get<int>();
            if (j.contains("quantize_points")) cfg.quantize_points = j.at("quantize_points").get<int>();
            if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
        }
        if (!surface_flag.empty()) {
            cfg.surface = surface_flag.front() == '{' ? json::parse(surface_flag) : json(surface_flag);
        }
        if (!out_flag.empty()) cfg.out = out_flag;
        if (resolution_flag != 0) cfg.resolution = resolution_flag;
        if (epsilon_flag) cfg.epsilon = parse_list(*epsilon_flag);
        if (h_flag) cfg.h = parse_list(*h_flag);
        if (nmax_flag != 0) cfg.n_max = nmax_flag;
        cfg.validate();
    } catch (const json::exception& e) {
        err << "usage error: malformed JSON: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        Session session(cfg, out);
        if (command == "constants") return cmd_constants(session);
        if (command == "curve") return cmd_curve(session);
        if (command == "geometry") return cmd_geometry(session);
        if (command == "band") return cmd_band(session);
        if (command == "quantize") return cmd_quantize(session);
        if (command == "predict") return cmd_predict(session);
        return cmd_validate(session);
    } catch (const NumericalError& e) {
        err << "numerical failure in " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace neumag::cli
