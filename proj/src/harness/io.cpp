#include <algorithm>
#include <charconv>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "resonance/error.hpp"
#include "resonance/harness.hpp"

namespace resonance {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

void write_file(const std::string& path, std::string_view bytes) {
    const std::filesystem::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::Io, "cannot open '" + path + "' for writing: " + std::strerror(errno));
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    f.close();
    if (!f) fail(ErrorCode::Io, "write to '" + path + "' failed");
}

namespace {

void put_cell(std::ostringstream& os, const RunRecord& r) {
    const Cell& c = r.cell;
    os << to_string(r.experiment) << ',' << format_double(c.mu) << ',' << format_double(c.eta) << ','
       << format_double(c.freq_or_period) << ',' << format_double(c.variance) << ',' << c.dim << ','
       << c.samples_per_step << ',' << format_double(c.beta1);
}

}  // namespace

void write_records_csv(const std::vector<RunRecord>& records, const std::string& path) {
    std::ostringstream os;
    os << kRecordsHeader << '\n';
    for (const RunRecord& r : records) {
        put_cell(os, r);
        os << ',' << r.seed << ',' << format_double(r.metric) << ',' << (r.diverged ? 1 : 0) << ','
           << (r.diverged ? r.diverge_step : 0) << '\n';
    }
    write_file(path, os.str());
}

void write_summary_csv(const std::vector<CellSummary>& summary, const std::string& path) {
    std::ostringstream os;
    os << "mu,eta,freq_or_period,variance,dim,samples_per_step,beta1,runs,diverged_runs,mean_metric,max_metric\n";
    for (const CellSummary& s : summary) {
        const Cell& c = s.cell;
        os << format_double(c.mu) << ',' << format_double(c.eta) << ',' << format_double(c.freq_or_period) << ','
           << format_double(c.variance) << ',' << c.dim << ',' << c.samples_per_step << ','
           << format_double(c.beta1) << ',' << s.runs << ',' << s.diverged << ','
           << format_double(s.mean_metric) << ',' << format_double(s.max_metric) << '\n';
    }
    write_file(path, os.str());
}

void write_grid_csv(const HeatmapGrid& grid, const std::string& path) {
    require(grid.values.size() == grid.rows() * grid.cols(), "write_grid_csv: grid is not rectangular");
    std::ostringstream os;
    os << grid.row_axis << ',' << grid.col_axis << ",value\n";
    for (std::size_t r = 0; r < grid.rows(); ++r)
        for (std::size_t c = 0; c < grid.cols(); ++c)
            os << format_double(grid.row_values[r]) << ',' << format_double(grid.col_values[c]) << ','
               << format_double(grid.at(r, c)) << '\n';
    write_file(path, os.str());
}

namespace {

double parse_field(std::string_view s, const std::string& path, std::size_t line) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && s.front() == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        fail(ErrorCode::Io, path + ":" + std::to_string(line) + ": bad number '" + std::string(s) + "'");
    return v;
}

}  // namespace

HeatmapGrid read_grid_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::Io, "cannot open '" + path + "': " + std::strerror(errno));
    std::string line;
    if (!std::getline(f, line)) fail(ErrorCode::Io, path + ": empty file");
    const auto h1 = line.find(',');
    const auto h2 = h1 == std::string::npos ? h1 : line.find(',', h1 + 1);
    if (h2 == std::string::npos || line.substr(h2 + 1) != "value")
        fail(ErrorCode::Io, path + ": header must be '<row axis>,<column axis>,value'");

    HeatmapGrid g;
    g.row_axis = line.substr(0, h1);
    g.col_axis = line.substr(h1 + 1, h2 - h1 - 1);
    g.provenance = "csv";
    std::vector<double> rows, cols, vals;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos) fail(ErrorCode::Io, path + ":" + std::to_string(lineno) + ": expected 3 fields");
        const std::string_view sv(line);
        rows.push_back(parse_field(sv.substr(0, c1), path, lineno));
        cols.push_back(parse_field(sv.substr(c1 + 1, c2 - c1 - 1), path, lineno));
        vals.push_back(parse_field(sv.substr(c2 + 1), path, lineno));
    }
    // Row-major order: the column axis repeats within the first row.
    std::size_t ncols = 0;
    while (ncols < rows.size() && rows[ncols] == rows[0]) ++ncols;
    if (ncols == 0 || rows.size() % ncols != 0) fail(ErrorCode::Io, path + ": grid is not rectangular");
    const std::size_t nrows = rows.size() / ncols;
    g.col_values.assign(cols.begin(), cols.begin() + static_cast<std::ptrdiff_t>(ncols));
    for (std::size_t r = 0; r < nrows; ++r) {
        g.row_values.push_back(rows[r * ncols]);
        for (std::size_t c = 0; c < ncols; ++c)
            if (rows[r * ncols + c] != g.row_values[r] || cols[r * ncols + c] != g.col_values[c])
                fail(ErrorCode::Io, path + ": grid is not rectangular");
    }
    g.values = std::move(vals);
    return g;
}

void write_contours_csv(const std::vector<Contour>& contours, const HeatmapGrid& axes, const std::string& path) {
    std::ostringstream os;
    os << "level,contour,closed,point," << axes.row_axis << ',' << axes.col_axis << '\n';
    for (std::size_t i = 0; i < contours.size(); ++i) {
        const Contour& c = contours[i];
        for (std::size_t p = 0; p < c.points.size(); ++p)
            os << format_double(c.level) << ',' << i << ',' << (c.closed ? 1 : 0) << ',' << p << ','
               << format_double(c.points[p].first) << ',' << format_double(c.points[p].second) << '\n';
    }
    write_file(path, os.str());
}

void write_psd_csv(const std::vector<PsdPoint>& psd, const std::string& path) {
    std::ostringstream os;
    os << "freq,power\n";
    for (const PsdPoint& p : psd) os << format_double(p.freq) << ',' << format_double(p.power) << '\n';
    write_file(path, os.str());
}

std::string render_pgm(const HeatmapGrid& grid, double lo, double hi) {
    require(hi > lo, "render_pgm: hi must exceed lo");
    require(grid.values.size() == grid.rows() * grid.cols(), "render_pgm: grid is not rectangular");
    std::string out = "P5\n" + std::to_string(grid.cols()) + " " + std::to_string(grid.rows()) + "\n255\n";
    out.reserve(out.size() + grid.values.size());
    for (double v : grid.values) {
        double px = 0.0;
        if (v > 0.0) px = std::round(255.0 * (std::log10(v) - lo) / (hi - lo));
        px = std::clamp(px, 0.0, 255.0);
        if (std::isnan(px)) px = 0.0;
        out.push_back(static_cast<char>(static_cast<unsigned char>(px)));
    }
    return out;
}

}  // namespace resonance
