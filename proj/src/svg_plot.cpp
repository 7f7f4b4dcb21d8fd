#include "ptrack/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace ptrack {
namespace {

constexpr double kPanelW = 360.0;
constexpr double kPanelH = 260.0;
constexpr double kMargin = 40.0;
constexpr double kFloorDb = -60.0;

const char* const kPathColours[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

double max_power(const Lattice& lat)
{
    double p = 0.0;
    for (const auto& frame : lat.frames)
        for (const ChirpAtom& a : frame)
            p = std::max(p, a.power);
    return p;
}

struct Axes {
    double x0, y0, w, h;
    double t_max;
    PlotRange range;

    double x(double seconds) const { return x0 + w * seconds / t_max; }
    double y(double hz) const { return y0 + h * (1.0 - (hz - range.f_lo) / (range.f_hi - range.f_lo)); }
};

double hz(double omega, double fs) { return omega * fs / (2.0 * std::numbers::pi); }

void draw_panel(std::ostringstream& os, const Lattice& lat, const PathSet* paths, PlotRange range,
                const std::string& title, double ox, double oy, double ref_power)
{
    const double fs = lat.fs > 0.0 ? lat.fs : 1.0;
    const double t_max = std::max(1e-9, (lat.frame_center(std::max<Index>(lat.frame_count() - 1, 0)) +
                                         0.5 * double(lat.win_len)) / fs);
    const Axes ax{ox + kMargin, oy + 24.0, kPanelW - kMargin - 10.0, kPanelH - 24.0 - kMargin, t_max, range};

    os << "<g>\n";
    os << "<text x=\"" << num(ox + kPanelW / 2) << "\" y=\"" << num(oy + 16) << "\" text-anchor=\"middle\" font-size=\"13\">"
       << escape(title) << "</text>\n";
    os << "<rect x=\"" << num(ax.x0) << "\" y=\"" << num(ax.y0) << "\" width=\"" << num(ax.w) << "\" height=\""
       << num(ax.h) << "\" fill=\"white\" stroke=\"black\"/>\n";
    for (double f = std::ceil(range.f_lo / 500.0) * 500.0; f <= range.f_hi; f += 500.0)
        os << "<text x=\"" << num(ax.x0 - 4) << "\" y=\"" << num(ax.y(f) + 4)
           << "\" text-anchor=\"end\" font-size=\"9\">" << f << "</text>\n";
    os << "<text x=\"" << num(ax.x0 + ax.w / 2) << "\" y=\"" << num(ax.y0 + ax.h + 26)
       << "\" text-anchor=\"middle\" font-size=\"10\">time (s), 0 to " << num(t_max) << "</text>\n";

    os << "<clipPath id=\"c" << long(ox) << '_' << long(oy) << "\"><rect x=\"" << num(ax.x0) << "\" y=\""
       << num(ax.y0) << "\" width=\"" << num(ax.w) << "\" height=\"" << num(ax.h) << "\"/></clipPath>\n";
    os << "<g clip-path=\"url(#c" << long(ox) << '_' << long(oy) << ")\">\n";

    // Atoms: a segment spanning one hop with the estimated slope.
    const double half = 0.5 * double(std::max<Index>(lat.hop, 1));
    for (const auto& frame : lat.frames) {
        for (const ChirpAtom& a : frame) {
            double db = ref_power > 0.0 && a.power > 0.0 ? 10.0 * std::log10(a.power / ref_power) : kFloorDb;
            db = std::clamp(db, kFloorDb, 0.0);
            const int grey = int(std::lround(255.0 * db / kFloorDb));
            const double tc = lat.frame_center(a.frame);
            os << "<line x1=\"" << num(ax.x((tc - half) / fs)) << "\" y1=\""
               << num(ax.y(hz(a.omega - a.psi * half, fs))) << "\" x2=\"" << num(ax.x((tc + half) / fs))
               << "\" y2=\"" << num(ax.y(hz(a.omega + a.psi * half, fs))) << "\" stroke=\"rgb(" << grey << ','
               << grey << ',' << grey << ")\" stroke-width=\"2\"/>\n";
        }
    }

    if (paths != nullptr) {
        const FrameLayout layout = lat.layout();
        for (std::size_t p = 0; p < paths->paths.size(); ++p) {
            const char* colour = kPathColours[p % std::size(kPathColours)];
            os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
            for (Index m : paths->paths[p].nodes) {
                const ChirpAtom& a = lat.node(layout, m);
                os << num(ax.x(lat.frame_center(a.frame) / fs)) << ',' << num(ax.y(hz(a.omega, fs))) << ' ';
            }
            os << "\"/>\n";
        }
    }
    os << "</g>\n</g>\n";
}

std::string document(double w, double h, const std::string& body)
{
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
       << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\" font-family=\"sans-serif\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << body << "</svg>\n";
    return os.str();
}

std::string snr_label(double snr)
{
    if (!std::isfinite(snr))
        return "clean";
    std::ostringstream os;
    os << snr << " dB";
    return os.str();
}

} // namespace

std::string plot_panel_svg(const Lattice& lat, const PathSet* paths, PlotRange range, const std::string& title)
{
    std::ostringstream body;
    draw_panel(body, lat, paths, range, title, 0.0, 0.0, max_power(lat));
    return document(kPanelW, kPanelH, body.str());
}

std::string plot_experiment_svg(const ExperimentResult& res, const ExperimentConfig& cfg)
{
    std::vector<const TrialResult*> rows;
    for (std::size_t s = 0; s < cfg.eval.snr_list.size(); ++s) {
        const std::size_t first = s * std::size_t(cfg.eval.trials);
        if (first < res.trials.size())
            rows.push_back(&res.trials[first]);
    }

    double ref = 0.0;
    for (const TrialResult* t : rows)
        ref = std::max(ref, max_power(t->lattice));

    const PlotRange range{std::max(0.0, cfg.peaks.f_min - 50.0), cfg.peaks.f_max + 50.0};
    std::ostringstream body;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const TrialResult& t = *rows[r];
        const double oy = double(r) * kPanelH;
        const std::string snr = snr_label(t.snr_db);
        draw_panel(body, t.lattice, nullptr, range, "atoms, " + snr, 0.0, oy, ref);
        draw_panel(body, t.lattice, &t.lp, range, "LP, " + snr, kPanelW, oy, ref);
        draw_panel(body, t.lattice, &t.greedy, range, "greedy, " + snr, 2 * kPanelW, oy, ref);
    }
    return document(3 * kPanelW, std::max<double>(1.0, double(rows.size())) * kPanelH, body.str());
}

} // namespace ptrack
