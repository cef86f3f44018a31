#pragma once

#include "monopole/euclidean.hpp"
#include "monopole/hyperbolic.hpp"
#include "monopole/metric.hpp"
#include "monopole/scattering.hpp"
#include "monopole/spectral.hpp"
#include "monopole/symplectic.hpp"
#include "monopole/twistor.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Dense>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace monopole::cli {

using nlohmann::json;
using hyperbolic::BoundaryPoint;
using hyperbolic::MultiCenterPotential;
using hyperbolic::PointUHS;

enum ExitCode : int { Pass = 0, CheckFailure = 1, UsageError = 2 };

/// Invalid configuration or arguments; maps to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- configuration

struct MonopoleConfig {
    std::vector<PointUHS> centers{PointUHS(0.2, -0.1, 0.8)};
    std::vector<int> charges{1};
    double mass = 0.5;
    std::optional<double> lambda; ///< when set, V = lambda + sum l_i G_i with the charges as given

    /// Potential of the moduli-space metric: lambda = 1 + 2m with doubled charges, unless lambda is set.
    MultiCenterPotential metric_potential() const {
        if (lambda) return MultiCenterPotential(*lambda, centers, charges);
        return MultiCenterPotential::moduli(mass, centers, charges);
    }
    /// Monopole data with the undoubled charges l_i, as consumed by the spectral lift.
    MultiCenterPotential monopole() const { return MultiCenterPotential(1.0 + 2.0 * mass, centers, charges, mass); }
};

struct RunConfig {
    std::uint64_t seed = 20240611;
    std::string only;
    std::string out;
    MonopoleConfig monopole;
    json raw = json::object();

    /// Section of the raw document, or an empty object.
    json section(const std::string& name) const {
        return raw.contains(name) && raw[name].is_object() ? raw[name] : json::object();
    }
};

namespace detail {

inline double number(const json& j, const char* what) {
    if (!j.is_number()) throw ConfigError(std::string(what) + " must be a number");
    return j.get<double>();
}

inline PointUHS point(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) throw ConfigError(std::string(what) + " must be [x, y, z]");
    try {
        return PointUHS(number(j[0], what), number(j[1], what), number(j[2], what));
    } catch (const DomainError&) {
        throw ConfigError(std::string(what) + " must have z > 0");
    }
}

inline cplx complex_value(const json& j, const char* what) {
    if (j.is_number()) return j.get<double>();
    if (!j.is_array() || j.size() != 2) throw ConfigError(std::string(what) + " must be a number or [re, im]");
    return {number(j[0], what), number(j[1], what)};
}

inline std::array<double, 3> vec3(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) throw ConfigError(std::string(what) + " must be a 3-vector");
    return {number(j[0], what), number(j[1], what), number(j[2], what)};
}

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json point_json(const PointUHS& p) { return json::array({p.x(), p.y(), p.z()}); }

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

} // namespace detail

inline MonopoleConfig parse_monopole(const json& j) {
    MonopoleConfig m;
    if (j.is_null()) return m;
    if (!j.is_object()) throw ConfigError("monopole must be an object");
    if (j.contains("centers")) {
        if (!j["centers"].is_array()) throw ConfigError("monopole.centers must be an array");
        m.centers.clear();
        for (const auto& c : j["centers"]) m.centers.push_back(detail::point(c, "monopole.centers[i]"));
    }
    if (j.contains("charges")) {
        if (!j["charges"].is_array()) throw ConfigError("monopole.charges must be an array");
        m.charges.clear();
        for (const auto& c : j["charges"]) {
            if (!c.is_number_integer() || c.get<int>() < 1) throw ConfigError("charges must be positive integers");
            m.charges.push_back(c.get<int>());
        }
    }
    if (j.contains("mass")) m.mass = detail::number(j["mass"], "monopole.mass");
    if (j.contains("lambda")) m.lambda = detail::number(j["lambda"], "monopole.lambda");
    try {
        (void)m.metric_potential();
        (void)m.monopole();
    } catch (const std::logic_error& e) {
        throw ConfigError(std::string("invalid monopole: ") + e.what());
    }
    return m;
}

inline RunConfig load_config(const std::string& path) {
    RunConfig rc;
    if (path.empty()) return rc;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    try {
        rc.raw = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!rc.raw.is_object()) throw ConfigError("config must be a JSON object");
    if (rc.raw.contains("seed")) {
        if (!rc.raw["seed"].is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
        rc.seed = rc.raw["seed"].get<std::uint64_t>();
    }
    if (rc.raw.contains("only")) rc.only = rc.raw["only"].get<std::string>();
    if (rc.raw.contains("out")) rc.out = rc.raw["out"].get<std::string>();
    rc.monopole = parse_monopole(rc.raw.contains("monopole") ? rc.raw["monopole"] : json());
    return rc;
}

// ---------------------------------------------------------------- verification

struct CheckRecord {
    std::string id;
    std::string anchor;
    double measured = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    std::string relation; ///< "abs_le": |measured - expected| <= tolerance; "gt": measured > expected
    bool pass = false;
    double runtime_ms = 0.0;
};

inline void to_json(json& j, const CheckRecord& r) {
    j = json{{"id", r.id},           {"anchor", r.anchor},         {"measured", r.measured},
             {"expected", r.expected}, {"tolerance", r.tolerance}, {"relation", r.relation},
             {"pass", r.pass},       {"runtime_ms", r.runtime_ms}};
}

struct Check {
    std::string module;
    std::string id;
    std::string anchor;
    double expected;
    double tolerance;
    std::string relation;
    std::function<double()> measure;
};

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : gen_(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen_); }
    cplx box(double a) { return {uniform(-a, a), uniform(-a, a)}; }
    PointUHS point() { return PointUHS(uniform(-1.5, 1.5), uniform(-1.5, 1.5), uniform(0.3, 2.5)); }

private:
    std::mt19937_64 gen_;
};

namespace checks {

inline double pythagoras(std::uint64_t seed, int samples) {
    Sampler s(seed);
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        const hyperbolic::OrientedGeodesic g(BoundaryPoint::finite(s.box(3.0)), BoundaryPoint::finite(s.box(3.0)));
        const double t = s.uniform(-3.0, 3.0);
        const double lhs = hyperbolic::cosh_dist(hyperbolic::geodesic_point(g, hyperbolic::O, t), hyperbolic::O);
        const double rhs = hyperbolic::cosh_dist(hyperbolic::geodesic_point(g, hyperbolic::O, 0.0), hyperbolic::O) * std::cosh(t);
        worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
    return worst;
}

inline double busemann_limit(std::uint64_t seed) {
    Sampler s(seed);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const BoundaryPoint u = BoundaryPoint::finite(s.box(2.0));
        const PointUHS base = s.point(), x = s.point();
        const auto frame = hyperbolic::rotation_to_infinity(u);
        const PointUHS b = frame(base);
        const PointUHS far(b.x(), b.y(), b.z() * std::exp(30.0));
        worst = std::max(worst, std::abs(30.0 - hyperbolic::dist(frame(x), far) - hyperbolic::busemann(u, base, x)));
    }
    return worst;
}

inline double green_laplacian(std::uint64_t seed) {
    Sampler s(seed);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        const PointUHS p = s.point(), x = s.point();
        if (hyperbolic::dist(p, x) < 0.3) continue;
        auto lap = [&](double h) {
            auto G = [&](double dx, double dy, double dz) {
                return hyperbolic::green(p, PointUHS(x.x() + dx, x.y() + dy, x.z() + dz));
            };
            const double c = G(0, 0, 0);
            const double fxx = (G(h, 0, 0) - 2 * c + G(-h, 0, 0)) / (h * h);
            const double fyy = (G(0, h, 0) - 2 * c + G(0, -h, 0)) / (h * h);
            const double fzz = (G(0, 0, h) - 2 * c + G(0, 0, -h)) / (h * h);
            const double fz = (G(0, 0, h) - G(0, 0, -h)) / (2 * h);
            return hyperbolic::laplacian_from_derivatives(x.z(), fxx, fyy, fzz, fz);
        };
        const double h = 2e-3 * x.z();
        worst = std::max(worst, std::abs((4 * lap(h / 2) - lap(h)) / 3.0));
    }
    return worst;
}

inline double factor_roundtrip(std::uint64_t seed) {
    Sampler s(seed);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const PointUHS q = s.point();
        const int n = 1 + static_cast<int>(s.uniform(0, 4));
        std::vector<PointUHS> centers;
        std::vector<int> charges;
        while (static_cast<int>(centers.size()) < n) {
            const PointUHS c = s.point();
            if (hyperbolic::dist(c, q) < 0.2) continue;
            centers.push_back(c);
            charges.push_back(1 + static_cast<int>(s.uniform(0, 3)));
        }
        const MultiCenterPotential V(1.0, centers, charges);
        const auto sd = spectral::lift_twistor_line(q, V, std::polar(1.0, s.uniform(0, 2 * pi)));
        worst = std::max(worst, spectral::lift_product_residual(sd, V));
    }
    return worst;
}

inline double kahler_max(const MonopoleConfig& m, const std::function<double(const metric::KahlerStructure&,
                                                                              const metric::MFramePoint&, double)>& f) {
    const auto V = m.metric_potential();
    double worst = 0.0;
    const std::vector<BoundaryPoint> gauges{BoundaryPoint::infinity(),          BoundaryPoint::finite(0.0),
                                            BoundaryPoint::finite({0.3, 0.7}),  BoundaryPoint::finite(-2.0),
                                            BoundaryPoint::finite({1.0, -1.0}), BoundaryPoint::finite({-0.5, 2.0})};
    for (const auto& u : gauges)
        for (const metric::MFramePoint& p0 : {metric::MFramePoint{0.9, 0.4, 1.3, 0.2}, metric::MFramePoint{-0.7, 0.2, 0.6, 1.0}}) {
            const metric::KahlerStructure K(V, u);
            const auto p = K.to_rotated(p0);
            worst = std::max(worst, f(K, p, metric::default_step(K.potential(), p)));
        }
    return worst;
}

inline double symplectic_contour_residue(std::uint64_t seed, int instances) {
    using namespace symplectic;
    Sampler s(seed);
    auto poly = [&](int d, double a) {
        std::vector<cplx> c(d + 1);
        for (auto& v : c) v = s.box(a);
        return Polynomial(std::move(c));
    };
    double worst = 0.0;
    for (int t = 0; t < instances; ++t) {
        const int k = 1 + static_cast<int>(s.uniform(0, 3));
        SheetData S;
        for (int i = 0; i < k; ++i)
            S.sheets.push_back({poly(4, 1.0), poly(4, 0.04) + Polynomial::constant(std::polar(s.uniform(1, 2), s.uniform(0, 2 * pi)))});
        const MarkedDivisor D(std::polar(s.uniform(1.5, 3.0), s.uniform(0, 2 * pi)));
        auto tangent = [&] {
            std::vector<SheetTangent> q;
            for (int i = 0; i < k; ++i) q.push_back({poly(3, 1.0), poly(3, 1.0)});
            return marked_tangent(D, q);
        };
        const auto X = tangent(), Y = tangent();
        worst = std::max(worst, std::abs(omega_D_contour(X, Y, S, D) - omega_D_residue(X, Y, S, D)));
    }
    return worst;
}

} // namespace checks

inline std::vector<Check> verification_checks(const RunConfig& rc) {
    using namespace std::placeholders;
    const auto vcfg = rc.section("verify");
    const double broken = vcfg.contains("broken_dirac") ? detail::number(vcfg["broken_dirac"], "verify.broken_dirac") : 0.0;
    const int samples = vcfg.contains("samples") ? vcfg["samples"].get<int>() : 1000;
    const std::uint64_t seed = rc.seed;
    const MonopoleConfig m = rc.monopole;
    std::vector<Check> c;

    // hyperbolic
    c.push_back({"hyperbolic", "hyperbolic.distance_axis", "hyperbolic distance on the vertical axis", 1.0, 1e-12, "abs_le",
                 [] { return hyperbolic::dist(PointUHS(0, 0, 1), PointUHS(0, 0, std::exp(1.0))); }});
    c.push_back({"hyperbolic", "hyperbolic.pythagoras", "cosh rho(gamma(t), p) = cosh rho(gamma(0), p) cosh t", 0.0, 1e-10,
                 "abs_le", [=] { return checks::pythagoras(seed, samples); }});
    c.push_back({"hyperbolic", "hyperbolic.busemann_limit", "Busemann function as a limit along a geodesic ray", 0.0,
                 1e-6, "abs_le", [=] { return checks::busemann_limit(seed); }});
    c.push_back({"hyperbolic", "hyperbolic.busemann_normalization", "horospherical height q_u(O) = 1", 1.0, 1e-15, "abs_le",
                 [] { return hyperbolic::horospherical_height(BoundaryPoint::finite({0.4, -1.1}), hyperbolic::O, hyperbolic::O); }});
    c.push_back({"hyperbolic", "hyperbolic.green_laplacian", "Green's function of the hyperbolic Laplacian", 0.0, 1e-6,
                 "abs_le", [=] { return checks::green_laplacian(seed); }});

    // twistor
    c.push_back({"twistor", "twistor.theta_integral", "integral of theta over a twistor line", 4 * pi, 1e-8, "abs_le",
                 [] { return std::abs(twistor::gamma_L_integral()); }});

    // spectral
    c.push_back({"spectral", "spectral.factorization", "factorization p-tilde = x y on a twistor line", 0.0, 1e-10, "abs_le",
                 [=] { return checks::factor_roundtrip(seed); }});
    c.push_back({"spectral", "spectral.lift_configuration", "lifted twistor line xy = p-tilde(u)", 0.0, 1e-10, "abs_le", [=] {
                     const auto V = m.monopole();
                     return spectral::lift_product_residual(spectral::lift_twistor_line(PointUHS(0.35, -0.6, 1.7), V), V);
                 }});
    c.push_back({"spectral", "spectral.genus", "genus of the spectral curve, k = 5", 16.0, 0.0, "abs_le",
                 [] { return static_cast<double>(spectral::genus_of_spectral_curve(5)); }});

    // metric
    c.push_back({"metric", "metric.scalar_curvature", "scalar-flat Kahler metric", 0.0, 1e-4, "abs_le", [=] {
                     return checks::kahler_max(m, [](const auto& K, const auto& p, double h) {
                         return std::abs(metric::curvature(K.metric_sampler(p), p, h).scalar);
                     });
                 }});
    c.push_back({"metric", "metric.weyl_self_dual", "anti-self-dual conformal structure", 0.0, 1e-4, "abs_le", [=] {
                     return checks::kahler_max(m, [](const auto& K, const auto& p, double h) {
                         return metric::curvature(K.metric_sampler(p), p, h).weyl_sd_norm;
                     });
                 }});
    c.push_back({"metric", "metric.kahler_closed", "Kahler form is closed", 0.0, 1e-6, "abs_le", [=] {
                     return checks::kahler_max(m, [broken](const auto& K0, const auto& p, double h) {
                         const metric::KahlerStructure K(K0.potential(), BoundaryPoint::infinity(), broken);
                         return metric::dOmega_residual(K.Omega_sampler(p), p, h);
                     });
                 }});
    c.push_back({"metric", "metric.integrable", "complex structure J is integrable", 0.0, 1e-6, "abs_le", [=] {
                     return checks::kahler_max(m, [](const auto& K, const auto& p, double h) {
                         return metric::nijenhuis_residual(K.J_sampler(p), p, h);
                     });
                 }});
    c.push_back({"metric", "metric.connection_curvature", "d omega = *dV", 0.0, 1e-8, "abs_le", [=] {
                     const auto V = m.metric_potential();
                     const metric::DiracConnection w(V, broken);
                     double r = 0.0;
                     for (const auto& p : {PointUHS(0.9, 0.4, 1.3), PointUHS(-0.7, 0.2, 0.6), PointUHS(0.1, 1.5, 2.2)}) {
                         const metric::MFramePoint fp{p.x(), p.y(), p.z(), 0.0};
                         r = std::max(r, metric::domega_star_dv_residual(V, w, p, metric::default_step(V, fp)));
                     }
                     return r;
                 }});
    c.push_back({"metric", "metric.hodge_identities", "Hodge star identities of the circle bundle", 0.0, 1e-10, "abs_le", [=] {
                     const auto V = m.metric_potential();
                     const metric::DiracConnection w(V);
                     const metric::DiracConnection wi(V, broken);
                     return metric::hodge_identity_residuals(V, w, wi, {0.9, 0.4, 1.3, 0.2});
                 }});
    c.push_back({"metric", "metric.flat_limit", "V = 1 gives the flat metric", 0.0, 1e-5, "abs_le", [] {
                     const metric::KahlerStructure K(MultiCenterPotential(1.0, {}, {}), BoundaryPoint::infinity());
                     const metric::MFramePoint p{0.9, 0.4, 1.3, 0.2};
                     return curvature::curvature(K.metric_sampler(p), p.vec(), 1e-3).riemann_norm;
                 }});
    c.push_back({"metric", "metric.abelian_charge", "abelian charge 2 lim rho V at the first center",
                 static_cast<double>(m.metric_potential().charges().at(0)), 1e-6, "abs_le",
                 [=] { return metric::abelian_charge(m.metric_potential(), 0); }});

    // euclidean
    c.push_back({"euclidean", "euclidean.l2_overlap", "L^2 is trivial on a charge-one curve", 0.0, 1e-10, "abs_le", [=] {
                     Sampler s(seed);
                     double worst = 0.0;
                     for (int k = 0; k < 50; ++k) {
                         const euclidean::L2Trivialization t{{s.uniform(-2, 2), s.uniform(-2, 2), s.uniform(-2, 2)}};
                         for (int j = 0; j < 64; ++j) worst = std::max(worst, t.overlap_defect(std::polar(1.0, 2 * pi * j / 64)));
                     }
                     return worst;
                 }});
    c.push_back({"euclidean", "euclidean.patch_roundtrip", "patching of L^2 minus the zero section", 0.0, 1e-14, "abs_le", [=] {
                     Sampler s(seed);
                     double worst = 0.0;
                     for (int k = 0; k < 100; ++k) {
                         const cplx z = s.box(2) + 0.05, e = s.box(2), u = s.box(2) + 0.05;
                         const auto t = euclidean::l2_patch_transition(z, e, u);
                         const auto b = euclidean::l2_patch_inverse(t.zeta, t.eta, t.u);
                         worst = std::max({worst, std::abs(b.zeta - z) / (1 + std::abs(z)),
                                           std::abs(b.eta - e) / ((1 + std::abs(e)) * (1 + std::norm(z))),
                                           std::abs(b.u - u) / (10 * (1 + std::abs(u)))});
                     }
                     return worst;
                 }});

    // symplectic
    c.push_back({"symplectic", "symplectic.contour_vs_residue", "omega_D by residues and by contour integration", 0.0, 1e-8,
                 "abs_le", [=] { return checks::symplectic_contour_residue(seed, 100); }});
    c.push_back({"symplectic", "symplectic.hand_example", "|omega_D - 1| on the k = 1 example", 0.0, 1e-12, "abs_le", [] {
                     using namespace symplectic;
                     const SheetData S{{{Polynomial({0.0}), Polynomial({1.0})}}};
                     const MarkedDivisor D(cplx(2.0, 0.5));
                     const auto X1 = marked_tangent(D, {{Polynomial({1.0}), Polynomial({0.0})}});
                     const auto X2 = marked_tangent(D, {{Polynomial({0.0}), Polynomial({1.0})}});
                     return std::abs(omega_D_contour(X1, X2, S, D) - 1.0);
                 }});

    // scattering
    c.push_back({"scattering", "scattering.spectral_line", "lines through the center are spectral", 0.0, 1e-6, "abs_le", [] {
                     const scattering::PSMonopole ps;
                     double worst = 0.0;
                     for (const cplx zeta : {cplx(0.0), cplx(0.3, -0.8), cplx(2.0, 1.0)})
                         worst = std::max(worst, scattering::spectral_indicator(ps.along({0, 0, 0}, euclidean::line_direction(zeta))));
                     return worst;
                 }});
    c.push_back({"scattering", "scattering.non_spectral_line", "line at distance 1 is not spectral", 0.1, 0.0, "gt", [] {
                     const scattering::PSMonopole ps;
                     return scattering::spectral_indicator(ps.along({1.0, 0.0, 0.0}, {0.0, 0.6, 0.8}));
                 }});
    c.push_back({"scattering", "scattering.m_gamma_bound", "M_gamma is bounded on far lines", 0.0, 4.0, "abs_le", [] {
                     const scattering::PSMonopole ps;
                     double worst = 0.0;
                     for (double b : {5.0, 10.0, 20.0}) worst = std::max(worst, scattering::m_gamma_norm(ps.along({b, 0.0, 0.0}, {0.0, 0.6, 0.8})));
                     return worst;
                 }});
    c.push_back({"scattering", "scattering.growth_exponent", "growth |z|^l ||H(z)|| bounded, l = 2", 2.0, 0.1, "abs_le", [] {
                     const MultiCenterPotential V(1.0, {PointUHS(0.3, 0.2, 1.4), PointUHS(-2.0, 1.0, 0.5)}, {2, 1});
                     std::vector<double> zs;
                     for (int k = 0; k < 10; ++k) zs.push_back(std::pow(10.0, -2.0 - 3.0 * k / 9));
                     return scattering::abelian_growth_exponent(V, 0, 0.5, zs).slope;
                 }});
    return c;
}

inline const std::vector<std::string>& modules() {
    static const std::vector<std::string> m{"hyperbolic", "twistor", "spectral", "metric", "euclidean", "symplectic", "scattering"};
    return m;
}

inline CheckRecord run_check(const Check& c) {
    CheckRecord r{c.id, c.anchor, 0.0, c.expected, c.tolerance, c.relation, false, 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    try {
        r.measured = c.measure();
        r.pass = c.relation == "gt" ? r.measured > c.expected : std::abs(r.measured - c.expected) <= c.tolerance;
    } catch (const std::exception&) {
        r.measured = std::numeric_limits<double>::quiet_NaN();
        r.pass = false;
    }
    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

// ---------------------------------------------------------------- subcommands

inline std::ostream& open_out(const std::string& path, std::ofstream& file, std::ostream& fallback) {
    if (path.empty()) return fallback;
    file.open(path);
    if (!file) throw ConfigError("cannot open output file " + path);
    return file;
}

inline int cmd_verify(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    if (!rc.only.empty() && std::find(modules().begin(), modules().end(), rc.only) == modules().end())
        throw ConfigError("unknown module for --only: " + rc.only);
    json records = json::array();
    bool all = true;
    for (const auto& c : verification_checks(rc)) {
        if (!rc.only.empty() && c.module != rc.only) continue;
        const CheckRecord r = run_check(c);
        if (!r.pass) err << "FAIL " << r.id << ": measured " << r.measured << "\n";
        all = all && r.pass;
        records.push_back(r);
    }
    const json report{{"seed", rc.seed}, {"only", rc.only}, {"pass", all}, {"records", records}};
    std::ofstream f;
    open_out(rc.out, f, out) << report.dump(2) << "\n";
    return all ? Pass : CheckFailure;
}

inline int cmd_metric(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    const json cfg = rc.section("metric");
    const auto V = rc.monopole.metric_potential();
    const BoundaryPoint u = cfg.contains("gauge") && !cfg["gauge"].is_null()
                                ? BoundaryPoint::finite(detail::complex_value(cfg["gauge"], "metric.gauge"))
                                : BoundaryPoint::infinity();
    const double theta = cfg.contains("theta") ? detail::number(cfg["theta"], "metric.theta") : 0.0;
    const json grid = cfg.contains("grid") ? cfg["grid"] : json::object();
    auto axis = [&](const char* name, std::array<double, 3> def) {
        std::array<double, 3> a = def;
        if (grid.contains(name)) a = detail::vec3(grid[name], "metric.grid axis");
        const int n = static_cast<int>(a[2]);
        if (n < 1 || a[2] != n) throw ConfigError("grid axis count must be a positive integer");
        std::vector<double> v;
        for (int k = 0; k < n; ++k) v.push_back(n == 1 ? a[0] : a[0] + (a[1] - a[0]) * k / (n - 1));
        return v;
    };
    const auto xs = axis("x", {-1.0, 1.0, 3}), ys = axis("y", {-1.0, 1.0, 3}), zs = axis("z", {0.5, 2.0, 3});
    for (double z : zs)
        if (!(z > 0.0)) throw ConfigError("grid heights must be positive");
    const metric::KahlerStructure K(V, u);
    std::ofstream f;
    std::ostream& os = open_out(rc.out, f, out);
    os << "x,y,z,theta,scalar,ricci,weyl_sd,weyl_asd,step\n" << std::setprecision(12);
    int skipped = 0;
    for (double x : xs)
        for (double y : ys)
            for (double z : zs) {
                const metric::MFramePoint p0{x, y, z, theta};
                bool near_center = false;
                for (const auto& c : V.centers()) near_center = near_center || hyperbolic::dist(c, p0.base()) < 0.05;
                if (near_center) {
                    err << "warning: skipping grid point (" << x << ", " << y << ", " << z << ") next to a center\n";
                    ++skipped;
                    continue;
                }
                try {
                    const auto p = K.to_rotated(p0);
                    const double h = metric::default_step(K.potential(), p);
                    const auto r = metric::curvature(K.metric_sampler(p), p, h);
                    os << x << ',' << y << ',' << z << ',' << theta << ',' << r.scalar << ',' << r.ricci_norm << ','
                       << r.weyl_sd_norm << ',' << r.weyl_asd_norm << ',' << r.step << '\n';
                } catch (const std::domain_error& e) {
                    err << "warning: skipping grid point (" << x << ", " << y << ", " << z << "): " << e.what() << "\n";
                    ++skipped;
                }
            }
    if (skipped > 0) err << "skipped " << skipped << " grid points\n";
    return Pass;
}

inline int cmd_scatter(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    const json cfg = rc.section("scatter");
    const std::string mode = cfg.value("mode", std::string("abelian"));
    std::ofstream f;
    std::ostream& os = open_out(rc.out, f, out);
    os << std::setprecision(12);
    json summary{{"seed", rc.seed}, {"mode", mode}};
    if (mode == "abelian") {
        const auto V = rc.monopole.metric_potential();
        const std::size_t i = cfg.value("center", 0u);
        const double delta = cfg.contains("delta") ? detail::number(cfg["delta"], "scatter.delta") : 0.5;
        std::vector<double> zs;
        if (cfg.contains("impacts")) {
            for (const auto& z : cfg["impacts"]) zs.push_back(detail::number(z, "scatter.impacts[i]"));
        } else {
            for (int k = 0; k < 10; ++k) zs.push_back(std::pow(10.0, -2.0 - 3.0 * k / 9));
        }
        if (zs.empty()) throw ConfigError("empty geodesic family");
        if (i >= V.size()) throw ConfigError("scatter.center out of range");
        for (double z : zs)
            if (!(z > 0.0 && z < delta)) throw ConfigError("impact parameters must lie in (0, delta)");
        if (zs.size() < 2) throw ConfigError("a fit needs at least two impact parameters");
        const auto fit = scattering::abelian_growth_exponent(V, i, delta, zs);
        os << "impact,log_inverse_impact,log_norm\n";
        for (std::size_t k = 0; k < zs.size(); ++k) os << zs[k] << ',' << std::log(1.0 / zs[k]) << ',' << fit.log_norms[k] << '\n';
        summary["fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}};
        summary["charge"] = V.charges()[i];
    } else if (mode == "ps") {
        if (!cfg.contains("lines") || !cfg["lines"].is_array() || cfg["lines"].empty()) throw ConfigError("empty geodesic family");
        scattering::PSMonopole ps;
        if (cfg.contains("center")) ps.center = detail::vec3(cfg["center"], "scatter.center");
        os << "x0,y0,z0,dx,dy,dz,indicator,m_gamma\n";
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0, k = 0;
        for (const auto& l : cfg["lines"]) {
            const auto x0 = detail::vec3(l.at("point"), "scatter.lines[i].point");
            auto d = detail::vec3(l.at("direction"), "scatter.lines[i].direction");
            const double n = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
            if (n == 0.0) throw ConfigError("line direction must be nonzero");
            for (double& v : d) v /= n;
            const auto dd = scattering::decaying_data(ps.along(x0, d));
            const double ind = scattering::spectral_indicator(dd);
            os << x0[0] << ',' << x0[1] << ',' << x0[2] << ',' << d[0] << ',' << d[1] << ',' << d[2] << ',' << ind << ',';
            try {
                os << scattering::m_gamma_norm(dd);
            } catch (const IllConditionedError&) {
                os << "inf";
            }
            os << '\n';
            if (ind < best) best = ind, arg = k;
            ++k;
        }
        summary["lines"] = k;
        summary["min_indicator"] = best;
        summary["argmin"] = arg;
    } else {
        throw ConfigError("scatter.mode must be \"abelian\" or \"ps\"");
    }
    const std::string fit_out = cfg.value("fit_out", rc.out.empty() ? std::string() : rc.out + ".json");
    if (fit_out.empty()) {
        err << summary.dump(2) << "\n";
    } else {
        std::ofstream jf(fit_out);
        if (!jf) throw ConfigError("cannot open " + fit_out);
        jf << summary.dump(2) << "\n";
    }
    return Pass;
}

inline int cmd_spectral(const RunConfig& rc, std::ostream& out, std::ostream&) {
    const json cfg = rc.section("spectral");
    const PointUHS q = cfg.contains("q") ? detail::point(cfg["q"], "spectral.q") : PointUHS(0.35, -0.6, 1.7);
    const double phase_angle = cfg.contains("phase") ? detail::number(cfg["phase"], "spectral.phase") : 0.0;
    const auto V = rc.monopole.monopole();
    spectral::SpectralDataC1 s = [&] {
        try {
            return spectral::lift_twistor_line(q, V, std::polar(1.0, phase_angle));
        } catch (const DegenerateError& e) {
            throw ConfigError(std::string("spectral.q: ") + e.what());
        }
    }();
    auto coeffs = [](const Polynomial& p) {
        json a = json::array();
        for (int k = 0; k <= p.degree(); ++k) a.push_back(detail::complex_json(p[k]));
        return a;
    };
    json quads = json::array(), divisor = json::array(), sdiv = json::array();
    for (const auto& qr : s.quadratics) quads.push_back({{"a", detail::complex_json(qr.a())}, {"b", qr.b()}});
    for (const auto& d : s.divisor) divisor.push_back({{"root", detail::complex_json(d.root)}, {"multiplicity", d.multiplicity}});
    for (const auto& d : s.sigma_divisor()) sdiv.push_back({{"root", detail::complex_json(d.root)}, {"multiplicity", d.multiplicity}});
    const json doc{{"seed", rc.seed},
                   {"q", detail::point_json(s.q)},
                   {"mass", s.mass},
                   {"lambda", s.lambda},
                   {"rotated_chart", s.rotated},
                   {"doubled_charges", s.doubled_charges},
                   {"quadratics", quads},
                   {"x", coeffs(s.lift.x)},
                   {"y", coeffs(s.lift.y)},
                   {"phase", detail::complex_json(s.lift.phase)},
                   {"phase_modulus", std::abs(s.lift.phase)},
                   {"divisor", divisor},
                   {"sigma_divisor", sdiv},
                   {"residual", spectral::lift_product_residual(s, V)},
                   {"reality_defect", spectral::reality_defect(s.lift)}};
    std::ofstream f;
    open_out(rc.out, f, out) << doc.dump(2) << "\n";
    return Pass;
}

inline int cmd_symplectic(const RunConfig& rc, std::ostream& out, std::ostream&) {
    using namespace symplectic;
    const json cfg = rc.section("symplectic");
    const int k = cfg.value("k", 2);
    const int nodes = cfg.value("nodes", 2048);
    const double radius = cfg.contains("radius") ? detail::number(cfg["radius"], "symplectic.radius") : 1.0;
    const cplx zeta0 = cfg.contains("zeta0") ? detail::complex_value(cfg["zeta0"], "symplectic.zeta0") : cplx(2.0, 0.5);
    if (k < 1) throw ConfigError("symplectic.k must be positive");
    if (nodes < 64) throw ConfigError("symplectic.nodes must be at least 64");
    if (zeta0 == cplx(0.0)) throw ConfigError("symplectic.zeta0 must be nonzero");
    if (std::abs(std::abs(zeta0) - radius) < 1e-6) throw ConfigError("symplectic.zeta0 lies on the contour");

    Sampler s(rc.seed);
    auto poly = [&](int d, double a) {
        std::vector<cplx> c(d + 1);
        for (auto& v : c) v = s.box(a);
        return Polynomial(std::move(c));
    };
    SheetData S;
    for (int i = 0; i < k; ++i)
        S.sheets.push_back({poly(4, 1.0), poly(4, 0.04) + Polynomial::constant(std::polar(s.uniform(1, 2), s.uniform(0, 2 * pi)))});
    const MarkedDivisor D(zeta0);
    auto tangent = [&] {
        std::vector<SheetTangent> q;
        for (int i = 0; i < k; ++i) q.push_back({poly(3, 1.0), poly(3, 1.0)});
        return marked_tangent(D, q);
    };
    const TangentVector X1 = tangent(), X2 = tangent();
    auto coeffs = [](const Polynomial& p) {
        json a = json::array();
        for (int j = 0; j <= p.degree(); ++j) a.push_back(detail::complex_json(p[j]));
        return a;
    };
    json inputs{{"k", k}, {"zeta0", detail::complex_json(zeta0)}, {"radius", radius}, {"sheets", json::array()},
                {"X1", json::array()}, {"X2", json::array()}};
    for (int i = 0; i < k; ++i) {
        inputs["sheets"].push_back({{"eta", coeffs(S.sheets[i].eta)}, {"u", coeffs(S.sheets[i].u)}});
        inputs["X1"].push_back({{"eta", coeffs(X1.sheets[i].eta)}, {"u", coeffs(X1.sheets[i].u)}});
        inputs["X2"].push_back({{"eta", coeffs(X2.sheets[i].eta)}, {"u", coeffs(X2.sheets[i].u)}});
    }
    const cplx res = omega_D_residue(X1, X2, S, D);
    const cplx con = omega_D_contour(X1, X2, S, D, nodes, radius);
    const json doc{{"seed", rc.seed},
                   {"inputs_hash", detail::hex(detail::fnv1a(inputs.dump()))},
                   {"residue", detail::complex_json(res)},
                   {"contour", detail::complex_json(con)},
                   {"nodes", nodes},
                   {"discrepancy", std::abs(res - con)},
                   {"inputs", inputs}};
    std::ofstream f;
    open_out(rc.out, f, out) << doc.dump(2) << "\n";
    return Pass;
}

// ---------------------------------------------------------------- entry point

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical checks for charge-one hyperbolic monopoles and their moduli spaces", "monopole_cli"};
    app.require_subcommand(1);
    std::string config_path, only, out_path;
    std::optional<std::uint64_t> seed;
    std::string chosen;
    for (const char* name : {"verify", "metric", "scatter", "spectral", "symplectic"}) {
        static const std::map<std::string, std::string> help{
            {"verify", "Run the verification suite and print a JSON report"},
            {"metric", "Sample curvature of the Kahler metric on a grid (CSV)"},
            {"scatter", "Scattering experiments: abelian growth fits or spectral-line scans (CSV + JSON)"},
            {"spectral", "Spectral data of a charge-one configuration on one twistor line (JSON)"},
            {"symplectic", "omega_D by residues and by contour integration on synthetic data (JSON)"}};
        auto* sub = app.add_subcommand(name, help.at(name));
        sub->add_option("--config", config_path, "JSON configuration file");
        sub->add_option("--seed", seed, "Random seed (overrides the config)");
        sub->add_option("--only", only, "Restrict verify to one module");
        sub->add_option("--out", out_path, "Output file (default: standard output)");
        sub->callback([&chosen, name] { chosen = name; });
    }
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Pass;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return UsageError;
    }
    try {
        RunConfig rc = load_config(config_path);
        if (seed) rc.seed = *seed;
        if (!only.empty()) rc.only = only;
        if (!out_path.empty()) rc.out = out_path;
        if (chosen == "verify") return cmd_verify(rc, out, err);
        if (chosen == "metric") return cmd_metric(rc, out, err);
        if (chosen == "scatter") return cmd_scatter(rc, out, err);
        if (chosen == "spectral") return cmd_spectral(rc, out, err);
        return cmd_symplectic(rc, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return UsageError;
    } catch (const json::exception& e) {
        err << "config error: " << e.what() << "\n";
        return UsageError;
    } catch (const std::logic_error& e) {
        err << "error: " << e.what() << "\n";
        return UsageError;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return CheckFailure;
    }
}

} // namespace monopole::cli
