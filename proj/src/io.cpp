#include "extcone/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace extcone {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_state_csv(const std::string& path, const FieldState& state) {
    std::ofstream out(path);
    if (!out) throw Error("write_state_csv: cannot open " + path);
    out << "r,u0,u1\n";
    for (std::size_t i = 0; i < state.size(); ++i)
        out << format_double(state.radius(i)) << "," << format_double(state.u[i]) << ","
            << format_double(state.ut[i]) << "\n";
}

FieldState read_state_csv(const std::string& path, int N, double t) {
    std::ifstream in(path);
    if (!in) throw Error("read_state_csv: cannot open " + path);
    std::string line;
    std::getline(in, line); // header
    std::vector<double> r, u0, u1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        double vals[3] = {0, 0, 0};
        for (int k = 0; k < 3 && std::getline(ls, tok, ','); ++k) vals[k] = std::stod(tok);
        r.push_back(vals[0]);
        u0.push_back(vals[1]);
        u1.push_back(vals[2]);
    }
    if (r.size() < 2) throw Error("read_state_csv: too few rows in " + path);
    FieldState st;
    st.N = N;
    st.t = t;
    st.r0 = r.front();
    st.h = r[1] - r[0];
    for (std::size_t i = 1; i < r.size(); ++i)
        if (std::abs(r[i] - r[i - 1] - st.h) > 1e-9 * st.h)
            throw Error("read_state_csv: grid is not uniform in " + path);
    st.u = std::move(u0);
    st.ut = std::move(u1);
    return st;
}

void write_columns_csv(const std::string& path, const std::vector<std::string>& headers,
                       const std::vector<std::vector<double>>& columns) {
    std::ofstream out(path);
    if (!out) throw Error("write_columns_csv: cannot open " + path);
    for (std::size_t k = 0; k < headers.size(); ++k) out << (k ? "," : "") << headers[k];
    out << "\n";
    std::size_t rows = 0;
    for (const auto& c : columns) rows = std::max(rows, c.size());
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t k = 0; k < columns.size(); ++k) {
            if (k) out << ",";
            if (i < columns[k].size()) out << format_double(columns[k][i]);
        }
        out << "\n";
    }
}

void write_svg_plot(const std::string& path, const std::vector<double>& x,
                    const std::vector<std::vector<double>>& ys, const std::string& title, bool log_y) {
    std::ofstream out(path);
    if (!out) throw Error("write_svg_plot: cannot open " + path);
    const double W = 640, H = 400, mleft = 60, mbot = 40, mtop = 30, mright = 20;
    auto tr = [&](double v, double lo, double hi, double a, double b) {
        if (hi <= lo) return 0.5 * (a + b);
        return a + (v - lo) / (hi - lo) * (b - a);
    };
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (double v : x) {
        xlo = std::min(xlo, v);
        xhi = std::max(xhi, v);
    }
    for (const auto& col : ys)
        for (double v : col) {
            const double w = log_y ? std::log10(std::max(v, 1e-300)) : v;
            ylo = std::min(ylo, w);
            yhi = std::max(yhi, w);
        }
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << W / 2 << "' y='20' text-anchor='middle' font-size='14'>" << title
        << (log_y ? " (log10 y)" : "") << "</text>\n";
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    for (std::size_t k = 0; k < ys.size(); ++k) {
        out << "<polyline fill='none' stroke='" << colors[k % 5] << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < ys[k].size() && i < x.size(); ++i) {
            const double yy = log_y ? std::log10(std::max(ys[k][i], 1e-300)) : ys[k][i];
            out << tr(x[i], xlo, xhi, mleft, W - mright) << ","
                << tr(yy, ylo, yhi, H - mbot, mtop) << " ";
        }
        out << "'/>\n";
    }
    out << "<line x1='" << mleft << "' y1='" << H - mbot << "' x2='" << W - mright << "' y2='"
        << H - mbot << "' stroke='black'/>\n";
    out << "<line x1='" << mleft << "' y1='" << H - mbot << "' x2='" << mleft << "' y2='" << mtop
        << "' stroke='black'/>\n";
    out << "<text x='" << mleft << "' y='" << H - 8 << "' font-size='11'>" << format_double(xlo)
        << "</text>\n";
    out << "<text x='" << W - mright - 60 << "' y='" << H - 8 << "' font-size='11'>"
        << format_double(xhi) << "</text>\n";
    out << "</svg>\n";
}

} // namespace extcone
