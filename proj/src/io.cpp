#include "optrace/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "optrace/error.hpp"

namespace optrace {
namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string xml_escape(const std::string& s) {
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

std::string fmt_short(double x) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 4);
    return std::string(buf, r.ptr);
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string format_double(double x) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

double parse_double(std::string_view s) {
    double v = 0.0;
    const auto t = trim(s);
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (!t.empty() && *first == '+') ++first;
    auto r = std::from_chars(first, last, v);
    if (t.empty() || r.ec != std::errc() || r.ptr != last) {
        throw ValidationError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

void CsvTable::add_header(std::string key, std::string value) {
    header.emplace_back(std::move(key), std::move(value));
}

void CsvTable::add_row(const std::vector<double>& values) {
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values) row.push_back(format_double(v));
    rows.push_back(std::move(row));
}

std::size_t CsvTable::column_index(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw ValidationError("no column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> CsvTable::column(const std::string& name) const {
    const auto j = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(parse_double(r.at(j)));
    return out;
}

std::string CsvTable::header_value(const std::string& key) const {
    for (const auto& [k, v] : header)
        if (k == key) return v;
    return {};
}

void write_csv(std::ostream& os, const CsvTable& table) {
    for (const auto& [k, v] : table.header) os << "# " << k << '=' << v << '\n';
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
        if (j) os << ',';
        os << table.columns[j];
    }
    os << '\n';
    for (const auto& r : table.rows) {
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (j) os << ',';
            os << r[j];
        }
        os << '\n';
    }
}

CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    bool have_columns = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto body = trim(std::string_view(line).substr(1));
            const auto eq = body.find('=');
            if (eq == std::string::npos) {
                t.add_header(body, "");
            } else {
                t.add_header(trim(std::string_view(body).substr(0, eq)),
                             trim(std::string_view(body).substr(eq + 1)));
            }
            continue;
        }
        auto cells = split_commas(line);
        if (!have_columns) {
            t.columns = std::move(cells);
            have_columns = true;
        } else {
            if (cells.size() != t.columns.size()) throw ValidationError("ragged CSV row: " + line);
            t.rows.push_back(std::move(cells));
        }
    }
    if (!have_columns) throw ValidationError("CSV has no header row");
    return t;
}

void write_csv_file(const std::string& path, const CsvTable& table) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open '" + path + "' for writing");
    write_csv(f, table);
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open '" + path + "'");
    return read_csv(f);
}

CsvTable curves_to_csv(const std::vector<DensityCurve>& curves,
                       const std::vector<std::pair<std::string, std::string>>& extra_header) {
    if (curves.empty()) throw ValidationError("no curves to write");
    const auto& grid = curves.front().grid();
    for (const auto& c : curves) {
        if (c.grid() != grid) throw ValidationError("curves written to one CSV must share a grid");
    }
    CsvTable t;
    for (const auto& [k, v] : extra_header) t.add_header(k, v);
    const bool single = curves.size() == 1;
    for (std::size_t k = 0; k < curves.size(); ++k) {
        const auto& m = curves[k].meta();
        const std::string prefix = single ? "" : std::to_string(k + 1) + ".";
        t.add_header(prefix + "provenance", to_string(m.provenance));
        for (const auto& [key, val] : m.params) t.add_header(prefix + key, val);
        t.add_header(prefix + "norm_estimate", format_double(curves[k].norm_estimate()));
    }
    t.columns.push_back("w");
    for (std::size_t k = 0; k < curves.size(); ++k) {
        t.columns.push_back(single ? "density" : "density_" + std::to_string(k + 1));
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> row{grid[i]};
        for (const auto& c : curves) row.push_back(c.values()[i]);
        t.add_row(row);
    }
    return t;
}

std::vector<DensityCurve> curves_from_csv(const CsvTable& table) {
    const auto grid = table.column("w");
    std::vector<DensityCurve> out;
    const bool single = table.columns.size() == 2;
    for (std::size_t j = 1; j < table.columns.size(); ++j) {
        const std::string prefix = single ? "" : std::to_string(j) + ".";
        CurveMeta meta;
        for (const auto& [k, v] : table.header) {
            if (k.rfind(prefix, 0) != 0) continue;
            const std::string key = k.substr(prefix.size());
            if (!single && key.find('.') != std::string::npos) continue;
            if (key == "provenance") {
                for (auto p : {Provenance::analytic, Provenance::quadrature, Provenance::mc,
                               Provenance::limiting}) {
                    if (to_string(p) == v) meta.provenance = p;
                }
            } else if (key != "norm_estimate") {
                meta.set(key, v);
            }
        }
        out.emplace_back(grid, table.column(table.columns[j]), std::move(meta));
    }
    return out;
}

void write_svg(std::ostream& os, const PlotSpec& plot) {
    const double W = plot.width, H = plot.height;
    const double ml = 64, mr = 150, mt = 36, mb = 48;
    double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
    auto tx = [&](double x) { return plot.log_x ? std::log10(x) : x; };
    auto ty = [&](double y) { return plot.log_y ? std::log10(y) : y; };
    auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!plot.log_x || x > 0) && (!plot.log_y || y > 0);
    };
    for (const auto& s : plot.series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    }
    if (!(x0 < x1)) { x0 = 0; x1 = 1; }
    if (!(y0 < y1)) { y0 = y0 - 0.5; y1 = y0 + 1; }
    if (!plot.log_y && y0 > 0) y0 = 0;
    y1 += 0.05 * (y1 - y0);
    const double pw = W - ml - mr, ph = H - mt - mb;
    auto px = [&](double x) { return ml + (tx(x) - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return mt + ph - (ty(y) - y0) / (y1 - y0) * ph; };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
       << xml_escape(plot.title) << "</text>\n";
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
        const double sx = ml + pw * k / 4.0, sy = mt + ph - ph * k / 4.0;
        const std::string lx = plot.log_x ? "1e" + fmt_short(fx) : fmt_short(fx);
        const std::string ly = plot.log_y ? "1e" + fmt_short(fy) : fmt_short(fy);
        os << "<text x=\"" << sx << "\" y=\"" << mt + ph + 16 << "\" text-anchor=\"middle\">" << lx
           << "</text>\n";
        os << "<text x=\"" << ml - 6 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\">" << ly
           << "</text>\n";
    }
    os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
       << xml_escape(plot.x_label) << "</text>\n";
    os << "<text x=\"14\" y=\"" << mt + ph / 2 << "\" transform=\"rotate(-90 14 " << mt + ph / 2
       << ")\" text-anchor=\"middle\">" << xml_escape(plot.y_label) << "</text>\n";

    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const auto& s = plot.series[k];
        const char* col = kPalette[k % std::size(kPalette)];
        if (s.markers) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!usable(s.x[i], s.y[i])) continue;
                os << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
                   << "\" r=\"1.6\" fill=\"" << col << "\"/>\n";
            }
        } else {
            os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.4\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!usable(s.x[i], s.y[i])) continue;
                os << px(s.x[i]) << ',' << std::clamp(py(s.y[i]), mt, mt + ph) << ' ';
            }
            os << "\"/>\n";
        }
        const double ly = mt + 14 + 16.0 * k;
        os << "<line x1=\"" << W - mr + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - mr + 30
           << "\" y2=\"" << ly - 4 << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << W - mr + 36 << "\" y=\"" << ly << "\">" << xml_escape(s.label)
           << "</text>\n";
    }
    os << "</svg>\n";
}

void write_svg_file(const std::string& path, const PlotSpec& plot) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open '" + path + "' for writing");
    write_svg(f, plot);
}

void write_grid_svg(std::ostream& os, const GridPlotSpec& plot) {
    static const char* fills[] = {"#dddddd", "#9ecae1", "#fdae6b", "#a1d99b"};
    const std::size_t nr = plot.row_ticks.size(), nc = plot.col_ticks.size();
    const double cw = 120, ch = 60, ml = 90, mt = 50;
    const double W = ml + cw * nc + 20, H = mt + ch * nr + 50;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
       << xml_escape(plot.title) << "</text>\n";
    for (std::size_t r = 0; r < nr; ++r) {
        // Highest row value on top.
        const double y = mt + ch * static_cast<double>(nr - 1 - r);
        os << "<text x=\"" << ml - 6 << "\" y=\"" << y + ch / 2 + 4 << "\" text-anchor=\"end\">"
           << xml_escape(plot.row_label + "=" + plot.row_ticks[r]) << "</text>\n";
        for (std::size_t c = 0; c < nc; ++c) {
            const double x = ml + cw * static_cast<double>(c);
            const int cls = r < plot.cell_class.size() && c < plot.cell_class[r].size()
                                ? plot.cell_class[r][c]
                                : 0;
            os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw << "\" height=\"" << ch
               << "\" fill=\"" << fills[std::clamp(cls, 0, 3)] << "\" stroke=\"black\"/>\n";
            if (r < plot.cell_text.size() && c < plot.cell_text[r].size()) {
                os << "<text x=\"" << x + cw / 2 << "\" y=\"" << y + ch / 2 + 4
                   << "\" text-anchor=\"middle\">" << xml_escape(plot.cell_text[r][c]) << "</text>\n";
            }
        }
    }
    for (std::size_t c = 0; c < nc; ++c) {
        os << "<text x=\"" << ml + cw * (static_cast<double>(c) + 0.5) << "\" y=\"" << mt + ch * nr + 16
           << "\" text-anchor=\"middle\">" << xml_escape(plot.col_ticks[c]) << "</text>\n";
    }
    os << "<text x=\"" << ml + cw * nc / 2 << "\" y=\"" << H - 8 << "\" text-anchor=\"middle\">"
       << xml_escape(plot.col_label) << "</text>\n";
    os << "</svg>\n";
}

void write_grid_svg_file(const std::string& path, const GridPlotSpec& plot) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open '" + path + "' for writing");
    write_grid_svg(f, plot);
}

}  // namespace optrace
