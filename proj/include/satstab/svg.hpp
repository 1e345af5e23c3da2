#pragma once

// Deterministic SVG emission: phase-plane plots with the certified ellipse
// overlaid on plant-state trajectories, and input time series with the
// saturation levels marked. Text output with fixed formatting so identical
// inputs produce identical bytes.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "satstab/certify.hpp"
#include "satstab/hybrid_sim.hpp"
#include "satstab/symmat.hpp"

namespace satstab::svg {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Closed polyline tracing { x : x' N x = mu }, axes from the eigen
// decomposition of N.
inline std::vector<Point> ellipse_points(const Matrix& N, double mu, int segments = 128) {
    const EigResult e = sym_eig(SymMatrix::from(N, 1e-9));
    const double a = std::sqrt(mu / e.values[0]);
    const double b = std::sqrt(mu / e.values[1]);
    std::vector<Point> pts;
    pts.reserve(segments + 1);
    constexpr double two_pi = 6.283185307179586;
    for (int k = 0; k <= segments; ++k) {
        const double th = two_pi * k / segments;
        const double u = a * std::cos(th);
        const double v = b * std::sin(th);
        pts.push_back({e.vectors(0, 0) * u + e.vectors(0, 1) * v,
                       e.vectors(1, 0) * u + e.vectors(1, 1) * v});
    }
    return pts;
}

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

struct Frame {
    double xmin, xmax, ymin, ymax;
    double width, height;

    double px(double x) const { return (x - xmin) / (xmax - xmin) * width; }
    double py(double y) const { return height - (y - ymin) / (ymax - ymin) * height; }
};

inline void polyline(std::ostream& os, const Frame& f, const std::vector<Point>& pts,
                     const std::string& color, double stroke_width,
                     const std::string& dash = "") {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
       << fmt(stroke_width) << "\"";
    if (!dash.empty())
        os << " stroke-dasharray=\"" << dash << "\"";
    os << " points=\"";
    for (std::size_t k = 0; k < pts.size(); ++k) {
        if (k)
            os << ' ';
        os << fmt(f.px(pts[k].x)) << ',' << fmt(f.py(pts[k].y));
    }
    os << "\"/>\n";
}

inline const char* trajectory_color(std::size_t k) {
    static const char* palette[] = {"#c0392b", "#27ae60", "#8e44ad",
                                    "#d35400", "#16a085", "#2c3e50"};
    return palette[k % 6];
}

}  // namespace detail

// Phase-plane plot (plant states 1 and 2) with the basin slice overlaid.
// Requires a two-dimensional plant state.
inline void write_phase_plane(std::ostream& os, const certify::BasinEstimate& basin,
                              const std::vector<sim::HybridTrajectory>& trajectories) {
    const std::vector<Point> ell = ellipse_points(basin.N, basin.mu_bar);
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    auto grow = [&](double x, double y) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    };
    for (const Point& p : ell)
        grow(p.x, p.y);
    for (const auto& tr : trajectories)
        for (const auto& smp : tr.samples)
            grow(smp.state.xp[0], smp.state.xp[1]);
    const double mx = 0.08 * std::max(xmax - xmin, 1e-6);
    const double my = 0.08 * std::max(ymax - ymin, 1e-6);
    detail::Frame f{xmin - mx, xmax + mx, ymin - my, ymax + my, 640.0, 480.0};

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 480\">\n";
    os << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    // axes through the origin
    detail::polyline(os, f, {{f.xmin, 0.0}, {f.xmax, 0.0}}, "#cccccc", 1.0);
    detail::polyline(os, f, {{0.0, f.ymin}, {0.0, f.ymax}}, "#cccccc", 1.0);
    detail::polyline(os, f, ell, "#2e6da4", 2.0);
    for (std::size_t k = 0; k < trajectories.size(); ++k) {
        std::vector<Point> pts;
        pts.reserve(trajectories[k].samples.size());
        for (const auto& smp : trajectories[k].samples)
            pts.push_back({smp.state.xp[0], smp.state.xp[1]});
        detail::polyline(os, f, pts, detail::trajectory_color(k), 1.2);
    }
    os << "</svg>\n";
}

// Input time series with the saturation levels as dashed horizontal lines.
inline void write_input_series(std::ostream& os, const Vector& ubar,
                               const std::vector<sim::HybridTrajectory>& trajectories) {
    double tmax = 1e-9, umin = 0.0, umax = 0.0;
    for (const auto& tr : trajectories)
        for (const auto& smp : tr.samples) {
            tmax = std::max(tmax, smp.t);
            for (double u : smp.u) {
                umin = std::min(umin, u);
                umax = std::max(umax, u);
            }
        }
    for (double u : ubar) {
        umin = std::min(umin, -u);
        umax = std::max(umax, u);
    }
    const double mu = 0.1 * std::max(umax - umin, 1e-6);
    detail::Frame f{0.0, tmax, umin - mu, umax + mu, 640.0, 320.0};

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 320\">\n";
    os << "<rect width=\"640\" height=\"320\" fill=\"white\"/>\n";
    detail::polyline(os, f, {{0.0, 0.0}, {tmax, 0.0}}, "#cccccc", 1.0);
    for (double u : ubar) {
        detail::polyline(os, f, {{0.0, u}, {tmax, u}}, "#888888", 1.0, "6,4");
        detail::polyline(os, f, {{0.0, -u}, {tmax, -u}}, "#888888", 1.0, "6,4");
    }
    for (std::size_t k = 0; k < trajectories.size(); ++k) {
        const std::size_t nu = trajectories[k].samples.empty()
                                   ? 0
                                   : trajectories[k].samples.front().u.size();
        for (std::size_t ch = 0; ch < nu; ++ch) {
            std::vector<Point> pts;
            pts.reserve(trajectories[k].samples.size());
            for (const auto& smp : trajectories[k].samples)
                pts.push_back({smp.t, smp.u[ch]});
            detail::polyline(os, f, pts, detail::trajectory_color(k), 1.2);
        }
    }
    os << "</svg>\n";
}

inline void write_phase_plane(const std::string& path, const certify::BasinEstimate& basin,
                              const std::vector<sim::HybridTrajectory>& trajectories) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    write_phase_plane(out, basin, trajectories);
}

inline void write_input_series(const std::string& path, const Vector& ubar,
                               const std::vector<sim::HybridTrajectory>& trajectories) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    write_input_series(out, ubar, trajectories);
}

}  // namespace satstab::svg
