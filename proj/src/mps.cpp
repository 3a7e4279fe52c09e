#include "rcmdp/lp.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace rcmdp::lp {
namespace {

// Fixed MPS fields: 2-3 type, 5-12 name, 15-22 name, 25-36 value, 40-47 name, 50-61 value.
std::string number(double v) {
    // Most digits that fit the 12-character value field.
    char buf[40];
    for (int precision = 12; precision > 1; --precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::string(buf).size() <= 12) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.1g", v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() > width) s.resize(width);
    s.append(width - s.size(), ' ');
    return s;
}

std::string row_name(char kind, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%c%07zu", kind, i);
    return buf;
}

std::string col_name(std::size_t j) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "X%07zu", j);
    return buf;
}

void entry(std::ostream& out, const std::string& type, const std::string& name1, const std::string& name2, double value) {
    out << ' ' << pad(type, 2) << ' ' << pad(name1, 8) << "  " << pad(name2, 8) << "  " << number(value) << '\n';
}

}  // namespace

void write_mps(std::ostream& out, const LinearProgram& lp, const std::string& name) {
    const std::size_t n = lp.n_variables();
    out << "NAME          " << name << '\n';
    out << "ROWS\n";
    out << " N  COST\n";
    for (std::size_t i = 0; i < lp.eq_rows.size(); ++i) out << " E  " << row_name('E', i) << '\n';
    for (std::size_t i = 0; i < lp.le_rows.size(); ++i) out << " L  " << row_name('L', i) << '\n';
    out << "COLUMNS\n";
    for (std::size_t j = 0; j < n; ++j) {
        const std::string col = col_name(j);
        if (lp.objective[j] != 0.0) entry(out, "", col, "COST", lp.objective[j]);
        for (std::size_t i = 0; i < lp.eq_rows.size(); ++i)
            if (lp.eq_rows[i][j] != 0.0) entry(out, "", col, row_name('E', i), lp.eq_rows[i][j]);
        for (std::size_t i = 0; i < lp.le_rows.size(); ++i)
            if (lp.le_rows[i][j] != 0.0) entry(out, "", col, row_name('L', i), lp.le_rows[i][j]);
    }
    out << "RHS\n";
    for (std::size_t i = 0; i < lp.eq_rows.size(); ++i)
        if (lp.eq_rhs[i] != 0.0) entry(out, "", "RHS", row_name('E', i), lp.eq_rhs[i]);
    for (std::size_t i = 0; i < lp.le_rows.size(); ++i)
        if (lp.le_rhs[i] != 0.0) entry(out, "", "RHS", row_name('L', i), lp.le_rhs[i]);
    bool any_bound = false;
    for (std::size_t j = 0; j < n; ++j)
        any_bound = any_bound || lp.lower[j] != 0.0 || std::isfinite(lp.upper[j]);
    if (any_bound) {
        out << "BOUNDS\n";
        for (std::size_t j = 0; j < n; ++j) {
            const std::string col = col_name(j);
            const double l = lp.lower[j], u = lp.upper[j];
            if (!std::isfinite(l) && !std::isfinite(u)) {
                out << " FR BND       " << col << '\n';
                continue;
            }
            if (!std::isfinite(l)) out << " MI BND       " << col << '\n';
            else if (l != 0.0) entry(out, "LO", "BND", col, l);
            if (std::isfinite(u)) entry(out, "UP", "BND", col, u);
        }
    }
    out << "ENDATA\n";
}

}  // namespace rcmdp::lp
