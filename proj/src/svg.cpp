#include "homctl/svg.hpp"

#include "homctl/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace homctl {

namespace {

constexpr double kWidth = 900.0;
constexpr double kPanelHeight = 220.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kGap = 40.0;
constexpr std::size_t kMaxPoints = 2000;
constexpr std::array<const char*, 8> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

void panel(std::ostringstream& os, const Trajectory& traj, double y0, const std::string& label, std::size_t series,
           const std::function<double(std::size_t, std::size_t)>& value, const char* prefix) {
    const double plot_w = kWidth - kLeft - kRight;
    const double t0 = traj.times.front();
    const double t1 = std::max(traj.times.back(), t0 + 1e-12);
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        for (std::size_t s = 0; s < series; ++s) {
            const double v = value(k, s);
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    if (hi - lo < 1e-300) hi = lo + 1.0;
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    auto px = [&](double t) { return kLeft + (t - t0) / (t1 - t0) * plot_w; };
    auto py = [&](double v) { return y0 + (hi - v) / (hi - lo) * kPanelHeight; };

    os << "<g class=\"panel\">\n";
    os << "<rect x=\"" << kLeft << "\" y=\"" << y0 << "\" width=\"" << plot_w << "\" height=\"" << kPanelHeight
       << "\" fill=\"none\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << kLeft << "\" y=\"" << y0 - 8 << "\" font-size=\"13\">" << escape(label) << "</text>\n";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(hi - pad) + 4 << "\" font-size=\"10\" text-anchor=\"end\">"
       << fmt(hi - pad) << "</text>\n";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(lo + pad) + 4 << "\" font-size=\"10\" text-anchor=\"end\">"
       << fmt(lo + pad) << "</text>\n";
    os << "<text x=\"" << kLeft << "\" y=\"" << y0 + kPanelHeight + 14 << "\" font-size=\"10\">" << fmt(t0)
       << "</text>\n";
    os << "<text x=\"" << kLeft + plot_w << "\" y=\"" << y0 + kPanelHeight + 14
       << "\" font-size=\"10\" text-anchor=\"end\">" << fmt(t1) << " s</text>\n";
    if (lo < 0.0 && hi > 0.0) {
        os << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + plot_w << "\" y1=\"" << py(0.0) << "\" y2=\"" << py(0.0)
           << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
    }
    const std::size_t stride = std::max<std::size_t>(1, traj.size() / kMaxPoints);
    for (std::size_t s = 0; s < series; ++s) {
        const char* color = kColors[s % kColors.size()];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.3\" points=\"";
        for (std::size_t k = 0; k < traj.size(); k += stride) {
            os << fmt(px(traj.times[k])) << ',' << fmt(py(value(k, s))) << ' ';
        }
        os << fmt(px(traj.times.back())) << ',' << fmt(py(value(traj.size() - 1, s)));
        os << "\"/>\n";
        os << "<text x=\"" << kLeft + plot_w - 10 - 40.0 * static_cast<double>(series - 1 - s) << "\" y=\"" << y0 + 14
           << "\" font-size=\"11\" fill=\"" << color << "\" text-anchor=\"end\">" << prefix << s + 1 << "</text>\n";
    }
    os << "</g>\n";
}

}  // namespace

std::string render_trajectory_svg(const Trajectory& traj, const std::string& title) {
    if (traj.empty()) throw PreconditionError("render_trajectory_svg: empty trajectory");
    const std::size_t n = static_cast<std::size_t>(traj.states.front().size());
    const std::size_t m = static_cast<std::size_t>(traj.inputs.front().size());
    const double height = kTop + 3.0 * (kPanelHeight + kGap) + 10.0;
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << kWidth << ' ' << height << "\" font-family=\"sans-serif\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty()) {
        os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">" << escape(title)
           << "</text>\n";
    }
    double y = kTop;
    panel(os, traj, y, "states", n, [&](std::size_t k, std::size_t s) { return traj.states[k][static_cast<Eigen::Index>(s)]; }, "x");
    y += kPanelHeight + kGap;
    panel(os, traj, y, "control inputs", m, [&](std::size_t k, std::size_t s) { return traj.inputs[k][static_cast<Eigen::Index>(s)]; }, "u");
    y += kPanelHeight + kGap;
    panel(os, traj, y, "canonical homogeneous norm", 1, [&](std::size_t k, std::size_t) { return traj.vnorm[k]; }, "V");
    os << "</svg>\n";
    return os.str();
}

void write_trajectory_svg(const std::filesystem::path& path, const Trajectory& traj, const std::string& title) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << render_trajectory_svg(traj, title);
}

}  // namespace homctl
