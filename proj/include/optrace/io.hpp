#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "optrace/core.hpp"

/// CSV and SVG plumbing. Locale independent throughout.
namespace optrace {

/// Shortest round-trip text with at most 17 significant digits.
std::string format_double(double x);
/// Strict parse of a complete token; throws ValidationError.
double parse_double(std::string_view s);

struct CsvTable {
    /// `# key=value` lines preceding the column header.
    std::vector<std::pair<std::string, std::string>> header;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_header(std::string key, std::string value);
    void add_row(const std::vector<double>& values);
    std::size_t column_index(const std::string& name) const;
    std::vector<double> column(const std::string& name) const;
    std::string header_value(const std::string& key) const;
};

void write_csv(std::ostream& os, const CsvTable& table);
CsvTable read_csv(std::istream& is);
void write_csv_file(const std::string& path, const CsvTable& table);
CsvTable read_csv_file(const std::string& path);

/// One or more curves as `w,density[_k]` columns. Curves must share a grid.
/// Metadata of curve k goes to `# k.key=value` lines (plain `key=value` for a
/// single curve).
CsvTable curves_to_csv(const std::vector<DensityCurve>& curves,
                       const std::vector<std::pair<std::string, std::string>>& extra_header = {});
/// Inverse of curves_to_csv (values and metadata; normalization rule is
/// reconstructed as the default trapezoid).
std::vector<DensityCurve> curves_from_csv(const CsvTable& table);

// --- SVG ---------------------------------------------------------------

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;
};

struct PlotSpec {
    std::string title;
    std::string x_label = "w";
    std::string y_label = "density";
    bool log_x = false;
    bool log_y = false;
    std::vector<PlotSeries> series;
    int width = 640;
    int height = 420;
};

void write_svg(std::ostream& os, const PlotSpec& plot);
void write_svg_file(const std::string& path, const PlotSpec& plot);

/// Labelled colour grid, one cell per (row, column) entry.
struct GridPlotSpec {
    std::string title;
    std::string row_label;
    std::string col_label;
    std::vector<std::string> row_ticks;
    std::vector<std::string> col_ticks;
    /// cell_text[r][c] drawn inside the cell; cell_class selects the colour.
    std::vector<std::vector<std::string>> cell_text;
    std::vector<std::vector<int>> cell_class;
};

void write_grid_svg(std::ostream& os, const GridPlotSpec& plot);
void write_grid_svg_file(const std::string& path, const GridPlotSpec& plot);

}  // namespace optrace
