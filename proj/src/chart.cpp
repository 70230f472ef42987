#include "thinshell/chart.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace thinshell {

std::string to_string(ChartKind kind) {
    switch (kind) {
    case ChartKind::Plane: return "plane";
    case ChartKind::Cylinder: return "cylinder";
    case ChartKind::Sphere: return "sphere";
    case ChartKind::Torus: return "torus";
    case ChartKind::Graph: return "graph";
    }
    return "?";
}

std::optional<ChartKind> chart_kind_from_string(const std::string& name) {
    if (name == "plane") return ChartKind::Plane;
    if (name == "cylinder") return ChartKind::Cylinder;
    if (name == "sphere") return ChartKind::Sphere;
    if (name == "torus") return ChartKind::Torus;
    if (name == "graph") return ChartKind::Graph;
    return std::nullopt;
}

class SurfaceChart::Kernel {
public:
    virtual ~Kernel() = default;
    virtual ChartKind kind() const = 0;
    virtual Vec3 position(double u, double v) const = 0;
    virtual Vec3 d1(double u, double v) const = 0;
    virtual Vec3 d2(double u, double v) const = 0;
    virtual Vec3 d11(double u, double v) const = 0;
    virtual Vec3 d12(double u, double v) const = 0;
    virtual Vec3 d22(double u, double v) const = 0;
    virtual Vec3 normal(double u, double v) const = 0;
    virtual double max_principal_curvature() const = 0;
    virtual bool constant_curvature() const { return false; }

    double q1min = 0.0, q1max = 1.0, q2min = 0.0, q2max = 1.0;
    bool periodic1 = false, periodic2 = false;
};

namespace {

class PlaneKernel final : public SurfaceChart::Kernel {
public:
    ChartKind kind() const override { return ChartKind::Plane; }
    Vec3 position(double u, double v) const override { return {u, v, 0.0}; }
    Vec3 d1(double, double) const override { return {1.0, 0.0, 0.0}; }
    Vec3 d2(double, double) const override { return {0.0, 1.0, 0.0}; }
    Vec3 d11(double, double) const override { return {}; }
    Vec3 d12(double, double) const override { return {}; }
    Vec3 d22(double, double) const override { return {}; }
    Vec3 normal(double, double) const override { return {0.0, 0.0, 1.0}; }
    double max_principal_curvature() const override { return 0.0; }
    bool constant_curvature() const override { return true; }
};

// Arclength parametrization: q1 = s in [0, 2*pi*R), q2 = z.  The induced
// metric is the identity and kappa_ss = +1/R with the outward normal.
class CylinderKernel final : public SurfaceChart::Kernel {
public:
    explicit CylinderKernel(double radius) : r_(radius) {}
    ChartKind kind() const override { return ChartKind::Cylinder; }
    Vec3 position(double s, double z) const override {
        return {r_ * std::cos(s / r_), r_ * std::sin(s / r_), z};
    }
    Vec3 d1(double s, double) const override {
        return {-std::sin(s / r_), std::cos(s / r_), 0.0};
    }
    Vec3 d2(double, double) const override { return {0.0, 0.0, 1.0}; }
    Vec3 d11(double s, double) const override {
        return {-std::cos(s / r_) / r_, -std::sin(s / r_) / r_, 0.0};
    }
    Vec3 d12(double, double) const override { return {}; }
    Vec3 d22(double, double) const override { return {}; }
    Vec3 normal(double s, double) const override {
        return {std::cos(s / r_), std::sin(s / r_), 0.0};
    }
    double max_principal_curvature() const override { return 1.0 / r_; }
    bool constant_curvature() const override { return true; }

private:
    double r_;
};

// Colatitude/longitude chart with the polar caps excluded (coordinate
// singularity at theta = 0, pi).  q1 = theta, q2 = phi.
class SphereKernel final : public SurfaceChart::Kernel {
public:
    explicit SphereKernel(double radius) : a_(radius) {}
    ChartKind kind() const override { return ChartKind::Sphere; }
    Vec3 position(double t, double p) const override {
        return {a_ * std::sin(t) * std::cos(p), a_ * std::sin(t) * std::sin(p),
                a_ * std::cos(t)};
    }
    Vec3 d1(double t, double p) const override {
        return {a_ * std::cos(t) * std::cos(p), a_ * std::cos(t) * std::sin(p),
                -a_ * std::sin(t)};
    }
    Vec3 d2(double t, double p) const override {
        return {-a_ * std::sin(t) * std::sin(p), a_ * std::sin(t) * std::cos(p), 0.0};
    }
    Vec3 d11(double t, double p) const override { return position(t, p) * -1.0; }
    Vec3 d12(double t, double p) const override {
        return {-a_ * std::cos(t) * std::sin(p), a_ * std::cos(t) * std::cos(p), 0.0};
    }
    Vec3 d22(double t, double p) const override {
        return {-a_ * std::sin(t) * std::cos(p), -a_ * std::sin(t) * std::sin(p), 0.0};
    }
    Vec3 normal(double t, double p) const override { return position(t, p) / a_; }
    double max_principal_curvature() const override { return 1.0 / a_; }
    bool constant_curvature() const override { return true; }

private:
    double a_;
};

// q1 = angle around the symmetry axis, q2 = angle around the tube.
class TorusKernel final : public SurfaceChart::Kernel {
public:
    TorusKernel(double major, double minor) : rM_(major), rm_(minor) {}
    ChartKind kind() const override { return ChartKind::Torus; }
    Vec3 position(double u, double v) const override {
        const double w = rM_ + rm_ * std::cos(v);
        return {w * std::cos(u), w * std::sin(u), rm_ * std::sin(v)};
    }
    Vec3 d1(double u, double v) const override {
        const double w = rM_ + rm_ * std::cos(v);
        return {-w * std::sin(u), w * std::cos(u), 0.0};
    }
    Vec3 d2(double u, double v) const override {
        return {-rm_ * std::sin(v) * std::cos(u), -rm_ * std::sin(v) * std::sin(u),
                rm_ * std::cos(v)};
    }
    Vec3 d11(double u, double v) const override {
        const double w = rM_ + rm_ * std::cos(v);
        return {-w * std::cos(u), -w * std::sin(u), 0.0};
    }
    Vec3 d12(double u, double v) const override {
        return {rm_ * std::sin(v) * std::sin(u), -rm_ * std::sin(v) * std::cos(u), 0.0};
    }
    Vec3 d22(double u, double v) const override {
        return {-rm_ * std::cos(v) * std::cos(u), -rm_ * std::cos(v) * std::sin(u),
                -rm_ * std::sin(v)};
    }
    Vec3 normal(double u, double v) const override {
        return {std::cos(v) * std::cos(u), std::cos(v) * std::sin(u), std::sin(v)};
    }
    double max_principal_curvature() const override {
        // Tube curvature 1/r, and the azimuthal one peaks at the inner equator.
        return std::max(1.0 / rm_, 1.0 / (rM_ - rm_));
    }

private:
    double rM_, rm_;
};

// Height graph z = h(x, y) with h a truncated Fourier series; normal chosen
// with positive z component.
class GraphKernel final : public SurfaceChart::Kernel {
public:
    explicit GraphKernel(std::vector<FourierTerm> terms) : terms_(std::move(terms)) {}
    ChartKind kind() const override { return ChartKind::Graph; }

    Vec3 position(double u, double v) const override { return {u, v, h(u, v, 0, 0)}; }
    Vec3 d1(double u, double v) const override { return {1.0, 0.0, h(u, v, 1, 0)}; }
    Vec3 d2(double u, double v) const override { return {0.0, 1.0, h(u, v, 0, 1)}; }
    Vec3 d11(double u, double v) const override { return {0.0, 0.0, h(u, v, 2, 0)}; }
    Vec3 d12(double u, double v) const override { return {0.0, 0.0, h(u, v, 1, 1)}; }
    Vec3 d22(double u, double v) const override { return {0.0, 0.0, h(u, v, 0, 2)}; }
    Vec3 normal(double u, double v) const override {
        const double hx = h(u, v, 1, 0), hy = h(u, v, 0, 1);
        const double w = std::sqrt(1.0 + hx * hx + hy * hy);
        return {-hx / w, -hy / w, 1.0 / w};
    }
    double max_principal_curvature() const override {
        // No closed form; probe the domain.
        double best = 0.0;
        const int n = 96;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double u = q1min + (q1max - q1min) * i / n;
                const double v = q2min + (q2max - q2min) * j / n;
                best = std::max(best, principal_bound(u, v));
            }
        }
        return best;
    }

private:
    // Derivative of order (du, dv) of the height function.
    double h(double u, double v, int du, int dv) const {
        double acc = 0.0;
        for (const auto& t : terms_) {
            const double arg = t.k1 * u + t.k2 * v + t.phase;
            const int order = du + dv;
            double factor = t.amplitude;
            for (int d = 0; d < du; ++d) factor *= t.k1;
            for (int d = 0; d < dv; ++d) factor *= t.k2;
            const double trig = (order % 4 == 0)   ? std::cos(arg)
                                : (order % 4 == 1) ? -std::sin(arg)
                                : (order % 4 == 2) ? -std::cos(arg)
                                                   : std::sin(arg);
            acc += factor * trig;
        }
        return acc;
    }

    double principal_bound(double u, double v) const {
        // |principal curvature| <= spectral norm of the shape operator;
        // use the mixed tensor built from the analytic derivatives.
        const Vec3 b1 = d1(u, v), b2 = d2(u, v), n = normal(u, v);
        const double g11 = b1.dot(b1), g12 = b1.dot(b2), g22 = b2.dot(b2);
        const double det = g11 * g22 - g12 * g12;
        const double k11 = -n.dot(d11(u, v));
        const double k12 = -n.dot(d12(u, v));
        const double k22 = -n.dot(d22(u, v));
        const double m11 = (g22 * k11 - g12 * k12) / det;
        const double m12 = (g22 * k12 - g12 * k22) / det;
        const double m21 = (-g12 * k11 + g11 * k12) / det;
        const double m22 = (-g12 * k12 + g11 * k22) / det;
        const double tr = m11 + m22, dt = m11 * m22 - m12 * m21;
        const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - dt));
        return std::max(std::abs(tr / 2.0 + disc), std::abs(tr / 2.0 - disc));
    }

    std::vector<FourierTerm> terms_;
};

bool nearly_equal(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

} // namespace

ChartKind SurfaceChart::kind() const { return kernel_->kind(); }

std::string SurfaceChart::describe() const {
    std::ostringstream os;
    os << to_string(kernel_->kind()) << " [" << kernel_->q1min << "," << kernel_->q1max
       << "]x[" << kernel_->q2min << "," << kernel_->q2max << "]"
       << (kernel_->periodic1 ? " periodic1" : "") << (kernel_->periodic2 ? " periodic2" : "");
    return os.str();
}

Vec3 SurfaceChart::position(double q1, double q2) const { return kernel_->position(q1, q2); }
Vec3 SurfaceChart::d1(double q1, double q2) const { return kernel_->d1(q1, q2); }
Vec3 SurfaceChart::d2(double q1, double q2) const { return kernel_->d2(q1, q2); }
Vec3 SurfaceChart::d11(double q1, double q2) const { return kernel_->d11(q1, q2); }
Vec3 SurfaceChart::d12(double q1, double q2) const { return kernel_->d12(q1, q2); }
Vec3 SurfaceChart::d22(double q1, double q2) const { return kernel_->d22(q1, q2); }
Vec3 SurfaceChart::normal(double q1, double q2) const { return kernel_->normal(q1, q2); }

double SurfaceChart::q1min() const { return kernel_->q1min; }
double SurfaceChart::q1max() const { return kernel_->q1max; }
double SurfaceChart::q2min() const { return kernel_->q2min; }
double SurfaceChart::q2max() const { return kernel_->q2max; }
bool SurfaceChart::periodic1() const { return kernel_->periodic1; }
bool SurfaceChart::periodic2() const { return kernel_->periodic2; }

double SurfaceChart::max_principal_curvature() const {
    return kernel_->max_principal_curvature();
}

bool SurfaceChart::constant_curvature() const { return kernel_->constant_curvature(); }

double SurfaceChart::mean_curvature(double q1, double q2) const {
    const Vec3 b1 = d1(q1, q2), b2 = d2(q1, q2), n = normal(q1, q2);
    const double g11 = b1.dot(b1), g12 = b1.dot(b2), g22 = b2.dot(b2);
    const double det = g11 * g22 - g12 * g12;
    const double k11 = -n.dot(d11(q1, q2));
    const double k12 = -n.dot(d12(q1, q2));
    const double k22 = -n.dot(d22(q1, q2));
    return (g22 * k11 - 2.0 * g12 * k12 + g11 * k22) / det;
}

double SurfaceChart::gauss_curvature(double q1, double q2) const {
    const Vec3 b1 = d1(q1, q2), b2 = d2(q1, q2), n = normal(q1, q2);
    const double g11 = b1.dot(b1), g12 = b1.dot(b2), g22 = b2.dot(b2);
    const double det = g11 * g22 - g12 * g12;
    const double k11 = -n.dot(d11(q1, q2));
    const double k12 = -n.dot(d12(q1, q2));
    const double k22 = -n.dot(d22(q1, q2));
    // Twice the determinant of the shape operator.
    return 2.0 * (k11 * k22 - k12 * k12) / det;
}

Grid2D SurfaceChart::make_grid(int n1, int n2) const {
    return Grid2D::make(n1, n2, q1min(), q1max(), q2min(), q2max(), periodic1(),
                        periodic2());
}

SurfaceChart build_chart(const ChartSpec& spec) {
    std::shared_ptr<SurfaceChart::Kernel> k;
    switch (spec.kind) {
    case ChartKind::Plane: {
        auto kern = std::make_shared<PlaneKernel>();
        kern->q1min = spec.q1min;
        kern->q1max = spec.q1max;
        kern->q2min = spec.q2min;
        kern->q2max = spec.q2max;
        kern->periodic1 = spec.periodic1.value_or(true);
        kern->periodic2 = spec.periodic2.value_or(true);
        k = kern;
        break;
    }
    case ChartKind::Cylinder: {
        if (!(spec.radius > 0.0))
            throw ChartError("cylinder: radius must be positive");
        auto kern = std::make_shared<CylinderKernel>(spec.radius);
        kern->q1min = 0.0;
        kern->q1max = 2.0 * M_PI * spec.radius; // natural arclength period
        kern->q2min = spec.q2min;
        kern->q2max = spec.q2max;
        kern->periodic1 = spec.periodic1.value_or(true);
        kern->periodic2 = spec.periodic2.value_or(true);
        if (!kern->periodic1)
            throw ChartError("cylinder: the angular axis is periodic by construction");
        k = kern;
        break;
    }
    case ChartKind::Sphere: {
        if (!(spec.radius > 0.0))
            throw ChartError("sphere: radius must be positive");
        if (!(spec.polar_cap > 0.0) || !(spec.polar_cap < M_PI / 2.0))
            throw ChartError("sphere: polar cap must lie in (0, pi/2)");
        auto kern = std::make_shared<SphereKernel>(spec.radius);
        kern->q1min = spec.polar_cap;
        kern->q1max = M_PI - spec.polar_cap;
        kern->q2min = 0.0;
        kern->q2max = 2.0 * M_PI;
        kern->periodic1 = false;
        kern->periodic2 = true;
        if (spec.periodic1.value_or(false))
            throw ChartError("sphere: the colatitude axis cannot be periodic");
        k = kern;
        break;
    }
    case ChartKind::Torus: {
        if (!(spec.major_radius > 0.0) || !(spec.minor_radius > 0.0))
            throw ChartError("torus: radii must be positive");
        if (!(spec.major_radius > spec.minor_radius))
            throw ChartError("torus: major radius must exceed minor radius");
        auto kern = std::make_shared<TorusKernel>(spec.major_radius, spec.minor_radius);
        kern->q1min = 0.0;
        kern->q1max = 2.0 * M_PI;
        kern->q2min = 0.0;
        kern->q2max = 2.0 * M_PI;
        kern->periodic1 = true;
        kern->periodic2 = true;
        if (!spec.periodic1.value_or(true) || !spec.periodic2.value_or(true))
            throw ChartError("torus: both axes are periodic by construction");
        k = kern;
        break;
    }
    case ChartKind::Graph: {
        auto kern = std::make_shared<GraphKernel>(spec.terms);
        kern->q1min = spec.q1min;
        kern->q1max = spec.q1max;
        kern->q2min = spec.q2min;
        kern->q2max = spec.q2max;
        kern->periodic1 = spec.periodic1.value_or(false);
        kern->periodic2 = spec.periodic2.value_or(false);
        // A periodic axis must be an exact period of every term.
        for (const auto& t : spec.terms) {
            const double L1 = spec.q1max - spec.q1min;
            const double L2 = spec.q2max - spec.q2min;
            if (kern->periodic1 && !nearly_equal(t.k1 * L1 / (2.0 * M_PI),
                                                 std::round(t.k1 * L1 / (2.0 * M_PI))))
                throw ChartError("graph: wavevector k1 incommensurate with periodic domain");
            if (kern->periodic2 && !nearly_equal(t.k2 * L2 / (2.0 * M_PI),
                                                 std::round(t.k2 * L2 / (2.0 * M_PI))))
                throw ChartError("graph: wavevector k2 incommensurate with periodic domain");
        }
        k = kern;
        break;
    }
    default:
        throw ChartError("unknown chart kind");
    }

    if (!(k->q1max > k->q1min) || !(k->q2max > k->q2min))
        throw ChartError("chart: empty parameter box");

    SurfaceChart chart;
    chart.kernel_ = std::move(k);
    return chart;
}

} // namespace thinshell
