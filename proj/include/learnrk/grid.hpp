#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "learnrk/learnability.hpp"
#include "learnrk/util.hpp"

namespace learnrk {

struct Region {
    double re_min = -6.0;
    double re_max = 2.0;
    double im_min = -6.0;
    double im_max = 6.0;
    int nx = 600;
    int ny = 600;
};

inline void check_region(const Region& r) {
    if (!(r.re_min < r.re_max) || !(r.im_min < r.im_max)) {
        throw InvalidArgumentError("region bounds must satisfy re_min < re_max, im_min < im_max");
    }
    if (r.nx < 2 || r.ny < 2) {
        throw InvalidArgumentError("grid resolution must be at least 2x2");
    }
    for (double v : {r.re_min, r.re_max, r.im_min, r.im_max}) {
        if (!std::isfinite(v)) throw NonFiniteError("region bounds must be finite");
    }
}

/// A sampled coefficient surface over the z-plane (h = 1 by convention, so a
/// node value stands for every (lambda, h) with h*lambda = z).
struct CoefficientField {
    Region region;
    Metric metric = Metric::LAlpha;
    RootPolicy policy;
    std::string method;
    std::vector<std::optional<double>> values;  // ny*nx, re varies fastest

    double x_at(int i) const {
        return region.re_min +
               (region.re_max - region.re_min) * static_cast<double>(i) /
                   static_cast<double>(region.nx - 1);
    }
    double y_at(int j) const {
        return region.im_min +
               (region.im_max - region.im_min) * static_cast<double>(j) /
                   static_cast<double>(region.ny - 1);
    }
    const std::optional<double>& at(int j, int i) const {
        return values[static_cast<std::size_t>(j) * static_cast<std::size_t>(region.nx) +
                      static_cast<std::size_t>(i)];
    }
};

inline int thread_count_from_env() {
    if (const char* raw = std::getenv("LEARNRK_THREADS")) {
        int n = std::atoi(raw);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

inline CoefficientField evaluate_field(const ButcherTableau& tableau, const Region& region,
                                       Metric metric, const RootPolicy& policy) {
    check_region(region);
    if (policy.kind == RootPolicyKind::All) {
        throw InvalidArgumentError("field evaluation needs a selecting policy (closest or index)");
    }

    CoefficientField field;
    field.region = region;
    field.metric = metric;
    field.policy = policy;
    field.method = tableau.name;
    field.values.assign(static_cast<std::size_t>(region.nx) * static_cast<std::size_t>(region.ny),
                        std::nullopt);

    const RationalStabilityFunction R = stability_function(tableau);
    auto run_rows = [&](int j_begin, int j_end) {
        for (int j = j_begin; j < j_end; ++j) {
            for (int i = 0; i < region.nx; ++i) {
                Complex z(field.x_at(i), field.y_at(j));
                field.values[static_cast<std::size_t>(j) * static_cast<std::size_t>(region.nx) +
                             static_cast<std::size_t>(i)] =
                    node_metric(R, z, 1.0, policy, metric);
            }
        }
    };

    const int threads = std::min(thread_count_from_env(), region.ny);
    if (threads <= 1) {
        run_rows(0, region.ny);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        const int chunk = (region.ny + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const int lo = t * chunk;
            const int hi = std::min(region.ny, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run_rows, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    return field;
}

inline std::string export_csv(const CoefficientField& field) {
    std::string out = "re,im,value\n";
    for (int j = 0; j < field.region.ny; ++j) {
        const std::string im = format_double17(field.y_at(j));
        for (int i = 0; i < field.region.nx; ++i) {
            out += format_double17(field.x_at(i));
            out.push_back(',');
            out += im;
            out.push_back(',');
            if (const auto& v = field.at(j, i)) out += format_double17(*v);
            out.push_back('\n');
        }
    }
    return out;
}

struct CsvRow {
    double re = 0.0;
    double im = 0.0;
    std::optional<double> value;
};

inline std::vector<CsvRow> import_csv(std::string_view text) {
    std::vector<CsvRow> rows;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != "re,im,value") throw ParseError("expected header 're,im,value'");
            header_seen = true;
            continue;
        }
        std::size_t c1 = line.find(',');
        std::size_t c2 = c1 == std::string_view::npos ? std::string_view::npos
                                                      : line.find(',', c1 + 1);
        if (c1 == std::string_view::npos || c2 == std::string_view::npos) {
            throw ParseError("csv row must have three columns");
        }
        CsvRow row;
        row.re = parse_double_strict(line.substr(0, c1));
        row.im = parse_double_strict(line.substr(c1 + 1, c2 - c1 - 1));
        std::string_view v = line.substr(c2 + 1);
        if (!v.empty()) row.value = parse_double_strict(v);
        rows.push_back(row);
    }
    if (!header_seen) throw ParseError("csv document is empty");
    return rows;
}

namespace detail {

struct Segment {
    double x1, y1, x2, y2;
};

/// Marching squares on log10(value) for one threshold. Cells touching an
/// undefined node emit nothing.
inline std::vector<Segment> iso_segments(const CoefficientField& field, double threshold) {
    std::vector<Segment> segments;
    const int nx = field.region.nx;
    const int ny = field.region.ny;

    auto logval = [&](int j, int i) -> std::optional<double> {
        const auto& v = field.at(j, i);
        if (!v) return std::nullopt;
        return std::log10(std::max(*v, 1e-300));
    };
    auto interp = [&](double a, double b, double pa, double pb) {
        // Position of the crossing between nodes with values a, b.
        double t = (threshold - a) / (b - a);
        t = std::clamp(t, 0.0, 1.0);
        return pa + t * (pb - pa);
    };

    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            auto v00 = logval(j, i), v10 = logval(j, i + 1);
            auto v01 = logval(j + 1, i), v11 = logval(j + 1, i + 1);
            if (!v00 || !v10 || !v01 || !v11) continue;

            const double x0 = field.x_at(i), x1 = field.x_at(i + 1);
            const double y0 = field.y_at(j), y1 = field.y_at(j + 1);
            int mask = 0;
            if (*v00 >= threshold) mask |= 1;
            if (*v10 >= threshold) mask |= 2;
            if (*v11 >= threshold) mask |= 4;
            if (*v01 >= threshold) mask |= 8;
            if (mask == 0 || mask == 15) continue;

            // Edge crossings: bottom (00-10), top (01-11), left (00-01), right (10-11).
            auto ex_b = interp(*v00, *v10, x0, x1);
            auto ex_t = interp(*v01, *v11, x0, x1);
            auto ey_l = interp(*v00, *v01, y0, y1);
            auto ey_r = interp(*v10, *v11, y0, y1);

            auto add = [&](double ax, double ay, double bx, double by) {
                segments.push_back({ax, ay, bx, by});
            };
            switch (mask) {
                case 1: case 14: add(x0, ey_l, ex_b, y0); break;
                case 2: case 13: add(ex_b, y0, x1, ey_r); break;
                case 3: case 12: add(x0, ey_l, x1, ey_r); break;
                case 4: case 11: add(x1, ey_r, ex_t, y1); break;
                case 6: case 9:  add(ex_b, y0, ex_t, y1); break;
                case 7: case 8:  add(x0, ey_l, ex_t, y1); break;
                case 5: case 10: {
                    // Saddle: the cell-center average decides which diagonal
                    // pair of corners the high region connects through.
                    double center = (*v00 + *v10 + *v01 + *v11) / 4.0;
                    bool center_high = center >= threshold;
                    if ((mask == 5) == center_high) {
                        add(ex_b, y0, x1, ey_r);
                        add(x0, ey_l, ex_t, y1);
                    } else {
                        add(x0, ey_l, ex_b, y0);
                        add(x1, ey_r, ex_t, y1);
                    }
                    break;
                }
                default: break;
            }
        }
    }
    return segments;
}

}  // namespace detail

/// Static SVG with iso-lines of log10(value) at the given levels.
inline std::string render_contours(const CoefficientField& field,
                                   const std::vector<double>& levels) {
    if (levels.empty()) throw InvalidArgumentError("levels must be nonempty");
    for (std::size_t k = 0; k < levels.size(); ++k) {
        if (!(levels[k] > 0.0)) throw InvalidArgumentError("levels must be positive");
        if (k > 0 && !(levels[k] > levels[k - 1])) {
            throw InvalidArgumentError("levels must be strictly ascending");
        }
    }
    bool any_defined = false;
    for (const auto& v : field.values) {
        if (v) {
            any_defined = true;
            break;
        }
    }
    if (!any_defined) throw InvalidArgumentError("field is entirely undefined");

    const double W = 720.0, H = 720.0, m = 60.0;
    const Region& r = field.region;
    auto px = [&](double x) { return m + (x - r.re_min) / (r.re_max - r.re_min) * (W - 2 * m); };
    auto py = [&](double y) { return H - m - (y - r.im_min) / (r.im_max - r.im_min) * (H - 2 * m); };
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    static const char* kPalette[] = {"#1b6ca8", "#2a9d8f", "#e9c46a", "#e76f51",
                                     "#9b5de5", "#444444"};

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"720\" "
           "viewBox=\"0 0 720 720\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"720\" height=\"720\" fill=\"white\"/>\n";
    svg += "<rect x=\"" + fmt(m) + "\" y=\"" + fmt(m) + "\" width=\"" + fmt(W - 2 * m) +
           "\" height=\"" + fmt(H - 2 * m) + "\" fill=\"none\" stroke=\"#222\"/>\n";

    // Axis ticks: five per axis, labeled in data coordinates.
    for (int k = 0; k <= 4; ++k) {
        double x = r.re_min + (r.re_max - r.re_min) * k / 4.0;
        double y = r.im_min + (r.im_max - r.im_min) * k / 4.0;
        svg += "<line x1=\"" + fmt(px(x)) + "\" y1=\"" + fmt(H - m) + "\" x2=\"" + fmt(px(x)) +
               "\" y2=\"" + fmt(H - m + 6) + "\" stroke=\"#222\"/>\n";
        svg += "<text x=\"" + fmt(px(x)) + "\" y=\"" + fmt(H - m + 20) +
               "\" font-size=\"12\" text-anchor=\"middle\">" + fmt(x) + "</text>\n";
        svg += "<line x1=\"" + fmt(m - 6) + "\" y1=\"" + fmt(py(y)) + "\" x2=\"" + fmt(m) +
               "\" y2=\"" + fmt(py(y)) + "\" stroke=\"#222\"/>\n";
        svg += "<text x=\"" + fmt(m - 10) + "\" y=\"" + fmt(py(y) + 4) +
               "\" font-size=\"12\" text-anchor=\"end\">" + fmt(y) + "</text>\n";
    }
    svg += "<text x=\"" + fmt(W / 2) + "\" y=\"" + fmt(H - 14) +
           "\" font-size=\"14\" text-anchor=\"middle\">Re z</text>\n";
    svg += "<text x=\"16\" y=\"" + fmt(H / 2) + "\" font-size=\"14\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 16 " + fmt(H / 2) + ")\">Im z</text>\n";
    svg += "<text x=\"" + fmt(W / 2) + "\" y=\"" + fmt(m - 24) +
           "\" font-size=\"14\" text-anchor=\"middle\">" + field.method + " " +
           metric_name(field.metric) + "</text>\n";

    for (std::size_t k = 0; k < levels.size(); ++k) {
        const double threshold = std::log10(levels[k]);
        auto segments = detail::iso_segments(field, threshold);
        const char* color = kPalette[k % (sizeof kPalette / sizeof kPalette[0])];
        svg += "<g stroke=\"" + std::string(color) + "\" stroke-width=\"1\" fill=\"none\" "
               "data-level=\"" + format_double(levels[k]) + "\">\n";
        if (!segments.empty()) {
            std::string d;
            for (const auto& s : segments) {
                d += "M" + fmt(px(s.x1)) + " " + fmt(py(s.y1)) + "L" + fmt(px(s.x2)) + " " +
                     fmt(py(s.y2));
            }
            svg += "<path d=\"" + d + "\"/>\n";
        }
        svg += "</g>\n";
        // Legend swatch per level.
        double ly = m + 16.0 + 16.0 * static_cast<double>(k);
        svg += "<line x1=\"" + fmt(W - m - 70) + "\" y1=\"" + fmt(ly) + "\" x2=\"" +
               fmt(W - m - 50) + "\" y2=\"" + fmt(ly) + "\" stroke=\"" + color + "\" "
               "stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fmt(W - m - 44) + "\" y=\"" + fmt(ly + 4) +
               "\" font-size=\"11\">" + format_double(levels[k]) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace learnrk
