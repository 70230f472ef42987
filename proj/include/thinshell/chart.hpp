#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "thinshell/grid.hpp"
#include "thinshell/vec3.hpp"

namespace thinshell {

enum class ChartKind { Plane, Cylinder, Sphere, Torus, Graph };

std::string to_string(ChartKind kind);
std::optional<ChartKind> chart_kind_from_string(const std::string& name);

// One Fourier term of a graph-chart height function:
//   amplitude * cos(k1*q1 + k2*q2 + phase)
struct FourierTerm {
    double k1 = 0.0, k2 = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;
};

// Description of an analytic surface chart.  Domain and periodicity entries
// are optional for kinds that fix them (cylinder angle, sphere, torus).
struct ChartSpec {
    ChartKind kind = ChartKind::Plane;
    double radius = 1.0;               // cylinder bend radius / sphere radius
    double major_radius = 2.0;         // torus
    double minor_radius = 0.5;         // torus
    double polar_cap = 0.3;            // sphere: excluded colatitude at each pole
    std::vector<FourierTerm> terms;    // graph height function
    double q1min = 0.0, q1max = 1.0;   // plane/graph box; cylinder axial extent via q2
    double q2min = 0.0, q2max = 1.0;
    std::optional<bool> periodic1, periodic2;
};

// Analytic surface embedding X(q1,q2) with first and second derivatives and a
// fixed unit-normal orientation:
//   - cylinder, sphere, torus: outward normal
//   - plane, graph: normal with positive z component
// The orientation is what pins the sign of the second fundamental form; the
// cylinder chart comes out with kappa_s^s = +1/R.
class SurfaceChart {
public:
    class Kernel; // implementation per kind

    ChartKind kind() const;
    std::string describe() const;

    Vec3 position(double q1, double q2) const;
    Vec3 d1(double q1, double q2) const;
    Vec3 d2(double q1, double q2) const;
    Vec3 d11(double q1, double q2) const;
    Vec3 d12(double q1, double q2) const;
    Vec3 d22(double q1, double q2) const;
    Vec3 normal(double q1, double q2) const;

    double q1min() const;
    double q1max() const;
    double q2min() const;
    double q2max() const;
    bool periodic1() const;
    bool periodic2() const;

    // Largest |principal curvature| over the domain; bounds the admissible
    // shell thickness through eps * max_kappa < 1.
    double max_principal_curvature() const;

    // True when the shape operator is covariantly constant over the chart
    // (plane, cylinder, sphere).  The expansion-verification oracle requires
    // this.
    bool constant_curvature() const;

    // Mean curvature and Gaussian curvature at a point, from the analytic
    // second derivatives.  Convenience for oracles; the per-grid fields live
    // in GeometryFields.
    double mean_curvature(double q1, double q2) const;
    double gauss_curvature(double q1, double q2) const;

    // Grid over the full chart domain with matching periodicity flags.
    Grid2D make_grid(int n1, int n2) const;

private:
    friend SurfaceChart build_chart(const ChartSpec& spec);
    std::shared_ptr<const Kernel> kernel_;
};

// Validates the description and returns an evaluable chart.
// Throws ChartError on unknown kind, non-positive radii, torus with
// major <= minor, or periodicity/domain mismatch.
SurfaceChart build_chart(const ChartSpec& spec);

} // namespace thinshell
