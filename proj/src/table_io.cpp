#include "langevin/table_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "langevin/config_file.hpp"
#include "langevin/errors.hpp"

namespace langevin {

namespace {

const char* const kSweepColumns[] = {"gamma",         "mu",           "nu",
                                     "estimator_mean", "estimator_std", "analytic_sigma2",
                                     "status"};

std::string optional_number(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto pos = text.find('\n', start);
        if (pos == std::string_view::npos) pos = text.size();
        out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::optional<double> parse_optional(std::string_view field, std::string_view what) {
    if (field.empty()) return std::nullopt;
    return parse_number(field, what);
}

std::string header() {
    std::string out(kCsvMagic);
    out += '\n';
    return out;
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string sweep_csv(const SweepTable& table, bool with_wallclock) {
    std::string out = header();
    for (std::size_t i = 0; i < std::size(kSweepColumns); ++i) {
        if (i) out += ',';
        out += kSweepColumns[i];
    }
    if (with_wallclock) out += ",wallclock";
    out += '\n';
    for (const SweepRow& r : table.rows) {
        out += format_number(r.gamma) + ',' + format_number(r.mu) + ',' + format_number(r.nu) + ',' +
               optional_number(r.estimator_mean) + ',' + optional_number(r.estimator_std) + ',' +
               optional_number(r.analytic_sigma2) + ',' + r.status;
        if (with_wallclock) out += ',' + optional_number(r.wallclock);
        out += '\n';
    }
    return out;
}

SweepTable parse_sweep_csv(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty() || lines.front() != kCsvMagic) throw ConfigError("sweep csv: missing magic line");
    std::size_t i = 1;
    if (i >= lines.size()) throw ConfigError("sweep csv: missing column line");
    const auto columns = split_fields(lines[i]);
    const bool wall = columns.size() == std::size(kSweepColumns) + 1;
    if (columns.size() != std::size(kSweepColumns) + (wall ? 1 : 0)) {
        throw ConfigError("sweep csv: unexpected column count");
    }
    for (std::size_t c = 0; c < std::size(kSweepColumns); ++c)
        if (columns[c] != kSweepColumns[c]) throw ConfigError("sweep csv: unexpected column names");

    SweepTable table;
    for (++i; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = split_fields(lines[i]);
        if (f.size() != columns.size()) throw ConfigError("sweep csv: ragged row");
        SweepRow r;
        r.gamma = parse_number(f[0], "gamma");
        r.mu = parse_number(f[1], "mu");
        r.nu = parse_number(f[2], "nu");
        r.estimator_mean = parse_optional(f[3], "estimator_mean");
        r.estimator_std = parse_optional(f[4], "estimator_std");
        r.analytic_sigma2 = parse_optional(f[5], "analytic_sigma2");
        r.status = std::string(f[6]);
        if (wall) r.wallclock = parse_optional(f[7], "wallclock");
        table.rows.push_back(std::move(r));
    }
    return table;
}

std::string sweep_svg(const SweepTable& table, const std::string& title) {
    constexpr double width = 640, height = 400, margin = 50;
    std::map<double, std::vector<std::pair<double, double>>> series;
    for (const SweepRow& r : table.rows) {
        const auto y = r.estimator_std ? r.estimator_std : r.analytic_sigma2;
        if (y && std::isfinite(*y)) series[r.gamma].emplace_back(r.mu, *y);
    }
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto& [g, pts] : series) {
        for (const auto& [x, y] : pts) {
            if (first) {
                xmin = xmax = x;
                ymin = ymax = y;
                first = false;
            }
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto px = [&](double x) { return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin); };
    auto py = [&](double y) {
        return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin);
    };

    static const char* const colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                         "#8c564b"};
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\">\n";
    if (!title.empty()) out << "<title>" << title << "</title>\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
        << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
        << height - margin << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 10 << "\">mu</text>\n";
    out << "<text x=\"5\" y=\"" << margin - 10 << "\">" << format_number(ymax) << "</text>\n";
    out << "<text x=\"5\" y=\"" << height - margin << "\">" << format_number(ymin) << "</text>\n";
    std::size_t k = 0;
    for (const auto& [g, pts] : series) {
        const char* color = colors[k % std::size(colors)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) out << ' ';
            out << format_number(px(pts[i].first)) << ',' << format_number(py(pts[i].second));
        }
        out << "\"/>\n";
        out << "<text x=\"" << width - margin + 5 << "\" y=\"" << margin + 15 * k << "\" fill=\""
            << color << "\">gamma=" << format_number(g) << "</text>\n";
        ++k;
    }
    out << "</svg>\n";
    return out.str();
}

std::string spectrum_csv(const SpectrumSet& spec) {
    std::string out = header();
    out += "m,re,im,multiplicity\n";
    for (const SpectralValue& v : spec.values) {
        out += std::to_string(v.level) + ',' + format_number(v.value.real()) + ',' +
               format_number(v.value.imag()) + ',' + std::to_string(v.multiplicity) + '\n';
    }
    return out;
}

std::string overdamped_csv(const std::vector<OverdampedRow>& rows) {
    std::string out = header();
    out += "eps,seed,sup_error\n";
    for (const OverdampedRow& r : rows) {
        out += format_number(r.eps) + ',' + std::to_string(r.seed) + ',' +
               format_number(r.sup_error) + '\n';
    }
    return out;
}

std::string matrix_blocks_csv(const std::vector<NamedMatrix>& blocks) {
    std::string out = header();
    for (const NamedMatrix& b : blocks) {
        out += "# block " + b.name + " rows=" + std::to_string(b.value.rows()) +
               " cols=" + std::to_string(b.value.cols()) + '\n';
        for (Eigen::Index i = 0; i < b.value.rows(); ++i) {
            for (Eigen::Index j = 0; j < b.value.cols(); ++j) {
                if (j) out += ',';
                out += format_number(b.value(i, j));
            }
            out += '\n';
        }
    }
    return out;
}

std::vector<NamedMatrix> parse_matrix_blocks(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty() || lines.front() != kCsvMagic) throw ConfigError("matrix csv: missing magic line");
    std::vector<NamedMatrix> out;
    std::size_t i = 1;
    while (i < lines.size()) {
        const std::string_view line = lines[i++];
        if (line.empty()) continue;
        constexpr std::string_view prefix = "# block ";
        if (line.substr(0, prefix.size()) != prefix) throw ConfigError("matrix csv: expected block header");
        std::istringstream hdr{std::string(line.substr(prefix.size()))};
        std::string name, rows_tok, cols_tok;
        hdr >> name >> rows_tok >> cols_tok;
        if (rows_tok.rfind("rows=", 0) != 0 || cols_tok.rfind("cols=", 0) != 0) {
            throw ConfigError("matrix csv: malformed block header");
        }
        const auto rows = static_cast<Eigen::Index>(parse_number(rows_tok.substr(5), "rows"));
        const auto cols = static_cast<Eigen::Index>(parse_number(cols_tok.substr(5), "cols"));
        if (rows < 0 || cols < 0) throw ConfigError("matrix csv: negative block size");
        Matrix m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            if (i >= lines.size()) throw ConfigError("matrix csv: truncated block " + name);
            const auto f = split_fields(lines[i++]);
            if (static_cast<Eigen::Index>(f.size()) != cols) throw ConfigError("matrix csv: ragged row");
            for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = parse_number(f[c], name);
        }
        out.push_back(NamedMatrix{name, m});
    }
    return out;
}

}  // namespace langevin
