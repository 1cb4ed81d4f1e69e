#include "abstop/boundary_solver.hpp"

#include "abstop/error.hpp"
#include "abstop/parallel.hpp"
#include "abstop/value_function.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace abstop {
namespace {

constexpr int kRootIterationCap = 200;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Brent's method on a sign-changing bracket [a, b]. `done(x, fx)` may end
// the iteration early once the caller's residual criterion holds.
template <class Fn, class Done>
double brent_root(Fn&& fn, double a, double b, double fa, double fb, Done&& done) {
    double c = a;
    double fc = fa;
    double d = b - a;
    double e = d;
    for (int iter = 0; iter < kRootIterationCap; ++iter) {
        if ((fb > 0.0 && fc > 0.0) || (fb < 0.0 && fc < 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * kEps * std::abs(b);
        const double xm = 0.5 * (c - b);
        if (fb == 0.0 || std::abs(xm) <= tol1 || done(b, fb)) {
            return b;
        }
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            const double s = fb / fa;
            double p = 0.0;
            double q = 0.0;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) {
                q = -q;
            }
            p = std::abs(p);
            const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
            const double min2 = std::abs(e * q);
            if (2.0 * p < std::min(min1, min2)) {
                e = d;
                d = p / q; // interpolation
            } else {
                d = xm; // bisection
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol1 ? d : std::copysign(tol1, xm);
        fb = fn(b);
    }
    throw Error(ErrorKind::non_convergence, "solve_boundary: root iteration cap reached");
}

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

} // namespace

double boundary_residual(double y, double alpha) { return f_raw(y, alpha) - y * f_raw_derivative(y, alpha); }

double solve_boundary(double alpha, double tol) {
    if (!(alpha > 0.0)) {
        throw Error(ErrorKind::domain, "solve_boundary: requires alpha > 0");
    }
    if (!(tol > 0.0)) {
        throw Error(ErrorKind::domain, "solve_boundary: requires tol > 0");
    }
    if (classify(alpha) == Regime::critical) {
        return 1.0;
    }
    auto h = [alpha](double y) { return boundary_residual(y, alpha); };

    double lo = 0.0;
    double h_lo = h(lo);
    double hi = 1.0;
    double h_hi = h(hi);
    while (h_hi > 0.0) {
        if (hi >= kBoundaryBracketCap) {
            throw Error(ErrorKind::bracket_failure,
                        "solve_boundary: no sign change of h up to y = " + format_double(kBoundaryBracketCap));
        }
        lo = hi;
        h_lo = h_hi;
        hi = std::min(2.0 * hi, kBoundaryBracketCap);
        h_hi = h(hi);
    }
    if (!(h_lo > 0.0)) {
        throw Error(ErrorKind::bracket_failure, "solve_boundary: h(0) is not positive");
    }
    auto converged = [&](double y, double hy) { return std::abs(hy) <= tol * std::abs(f_raw(y, alpha)); };
    const double root = brent_root(h, lo, hi, h_lo, h_hi, converged);
    if (!converged(root, h(root))) {
        throw Error(ErrorKind::non_convergence, "solve_boundary: residual tolerance not reached");
    }
    return root;
}

StoppingSolution solve_constants(double alpha) {
    const Regime regime = classify(alpha);
    if (regime == Regime::zero) {
        throw Error(ErrorKind::domain, "solve_constants: alpha = 0 has no stopping boundary");
    }
    if (regime == Regime::critical) {
        const double inv_e = std::exp(-1.0);
        return {alpha, 1.0, inv_e, inv_e, regime};
    }
    const double B = solve_boundary(alpha);
    const double C = B / f_raw(B, alpha);
    const double V = C * f_raw_at_zero(alpha);
    const double V_series = C * f_raw(0.0, alpha);
    if (std::abs(V - V_series) > kValueConsistencyTol * std::abs(V)) {
        throw Error(ErrorKind::consistency, "solve_constants: Gamma-ratio V " + format_double(V) +
                                                " disagrees with C f_raw(0) = " + format_double(V_series));
    }
    return {alpha, B, C, V, regime};
}

std::vector<SweepRow> sweep(double alpha_min, double alpha_max, std::size_t points, unsigned workers) {
    if (!(alpha_min > 0.0) || !(alpha_max > alpha_min)) {
        throw Error(ErrorKind::domain, "sweep: requires 0 < alpha_min < alpha_max");
    }
    if (points < 2) {
        throw Error(ErrorKind::domain, "sweep: requires at least 2 points");
    }
    alpha_min = std::max(alpha_min, kSweepAlphaFloor);
    if (!(alpha_max > alpha_min)) {
        throw Error(ErrorKind::domain, "sweep: alpha_max must exceed the alpha floor");
    }
    std::vector<SweepRow> rows(points);
    const double span = alpha_max - alpha_min;
    const double last = static_cast<double>(points - 1);
    parallel_for(points, workers == 0 ? worker_count() : workers, [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.alpha = i + 1 == points ? alpha_max : alpha_min + span * static_cast<double>(i) / last;
        try {
            const StoppingSolution s = solve_constants(row.alpha);
            row.B = s.B;
            row.C = s.C;
            row.V = s.V;
        } catch (const std::exception& ex) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.B = row.C = row.V = nan;
            row.error = ex.what();
        }
    });
    return rows;
}

double golden_section_minimize(const std::function<double(double)>& fn, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = fn(x1);
    double f2 = fn(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = fn(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = fn(x2);
        }
    }
    return 0.5 * (lo + hi);
}

Extrema locate_extrema(std::span<const SweepRow> rows, bool refine, double alpha_tol) {
    std::optional<std::size_t> best_min;
    std::optional<std::size_t> best_max;
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
        const SweepRow& prev = rows[i - 1];
        const SweepRow& cur = rows[i];
        const SweepRow& next = rows[i + 1];
        if (!prev.ok() || !cur.ok() || !next.ok()) {
            continue;
        }
        if (cur.V < prev.V && cur.V < next.V && (!best_min || cur.V < rows[*best_min].V)) {
            best_min = i;
        }
        if (cur.V > prev.V && cur.V > next.V && (!best_max || cur.V > rows[*best_max].V)) {
            best_max = i;
        }
    }
    if (!best_min || !best_max) {
        throw Error(ErrorKind::not_found, "locate_extrema: V has no interior local minimum and maximum");
    }
    Extrema out{rows[*best_min].alpha, rows[*best_min].V, rows[*best_max].alpha, rows[*best_max].V};
    if (!refine) {
        return out;
    }
    auto value = [](double alpha) { return solve_constants(alpha).V; };
    out.alpha_local_min = golden_section_minimize(value, rows[*best_min - 1].alpha, rows[*best_min + 1].alpha,
                                                  alpha_tol);
    out.V_local_min = value(out.alpha_local_min);
    out.alpha_local_max = golden_section_minimize([&](double a) { return -value(a); }, rows[*best_max - 1].alpha,
                                                  rows[*best_max + 1].alpha, alpha_tol);
    out.V_local_max = value(out.alpha_local_max);
    return out;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "alpha,B,C,V\n";
    for (const SweepRow& row : rows) {
        out << format_double(row.alpha) << ',' << format_double(row.B) << ',' << format_double(row.C) << ','
            << format_double(row.V) << '\n';
    }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "alpha,B,C,V") {
        throw Error(ErrorKind::domain, "read_sweep_csv: missing `alpha,B,C,V` header");
    }
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        std::string cell;
        double values[4];
        for (double& v : values) {
            if (!std::getline(fields, cell, ',')) {
                throw Error(ErrorKind::domain, "read_sweep_csv: short row `" + line + "`");
            }
            char* end = nullptr;
            v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0') {
                throw Error(ErrorKind::domain, "read_sweep_csv: bad number `" + cell + "`");
            }
        }
        SweepRow row{values[0], values[1], values[2], values[3], std::nullopt};
        if (std::isnan(row.B) || std::isnan(row.C) || std::isnan(row.V)) {
            row.error = "failed row";
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace abstop
