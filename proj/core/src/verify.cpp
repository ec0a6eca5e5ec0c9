#include "hucai/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "hucai/dynamics.hpp"
#include "hucai/elliptic.hpp"
#include "hucai/error.hpp"

namespace hucai {

namespace {

constexpr double kPi = std::numbers::pi;

double mat_norm(const Mat2& a) { return frobenius(a); }


double det3(const double M[3][3]) {
    return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
           M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
           M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
}

bool in_box(const ManufacturedCase& c, double x, double y) {
    return x >= c.box_x0 && x <= c.box_x1 && y >= c.box_y0 && y <= c.box_y1;
}

double bump1(double t) {
    if (std::abs(t) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

double bump1_prime(double t) {
    if (std::abs(t) >= 1.0) return 0.0;
    const double q = 1.0 - t * t;
    return bump1(t) * (-2.0 * t / (q * q));
}

struct Discrete {
    Grid2D g;
    AuxFields aux;
    ScalarField v;
};

Discrete discrete_state(const ManufacturedCase& c, int cells) {
    Discrete d;
    d.g = Grid2D::unit_square(cells);
    const ScalarField p = c.sample_p(d.g);
    const VectorField2 m = c.sample_m(d.g);
    const ScalarField s = c.sample_s(d.g);
    Params params;
    params.v_min = c.v_floor;
    d.aux = compute_aux(m, p, s, params);
    d.v = d.aux.v;
    for (int j = 0; j < d.g.ny; ++j) {
        for (int i = 0; i < d.g.nx; ++i) {
            if (!in_box(c, d.g.x(i), d.g.y(j))) continue;
            if (!d.aux.mask[d.g.index(i, j)]) {
                std::ostringstream os;
                os << "weak residual: v < v_floor = " << c.v_floor << " at (" << d.g.x(i) << ", "
                   << d.g.y(j) << ") inside the test box";
                throw InvalidArgument(os.str());
            }
        }
    }
    return d;
}

// Weak residual |R| / sum|terms| for one test function, given the "unknown"
// u whose gradient is gu and the flux coefficient (1/v or 1) per node.
double weak_residual(const Discrete& d, const VectorField2& gu, bool divide_by_v,
                     const TestFunction& psi) {
    double R = 0.0, scale = 0.0;
    const Grid2D& g = d.g;
    for (int j = 0; j < g.ny; ++j) {
        const double y = g.y(j);
        if (std::abs(y - psi.cy) >= psi.r) continue;
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.x(i);
            if (std::abs(x - psi.cx) >= psi.r) continue;
            const std::size_t k = g.index(i, j);
            const double w = g.weight(i, j);
            const double ps = psi.value(x, y);
            const Vec2 gps = psi.gradient(x, y);
            const double f = divide_by_v ? 1.0 / d.v[k] : 1.0;
            const Vec2 gk = gu.at(k);
            const double t1 = f * dot(d.aux.A.at(k) * gk, gps);
            const double t2 = f * dot(d.aux.H.at(k), gk) * ps;
            const double t3 = d.aux.h[k] * ps;
            const double t4 = -dot(d.aux.K.at(k), gps);
            R += w * (t1 + t2 + t3 + t4);
            scale += w * (std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4));
        }
    }
    return scale == 0.0 ? 0.0 : std::abs(R) / scale;
}

ResidualStudy residual_study(const ManufacturedCase& c, const std::vector<int>& cells, bool phi) {
    if (cells.empty()) throw InvalidArgument("residual study: empty grid sequence");
    const std::vector<TestFunction> tests = box_test_functions(c);
    ResidualStudy st;
    for (int n : cells) {
        const Discrete d = discrete_state(c, n);
        ResidualLevel lvl;
        lvl.cells = n;
        VectorField2 gu;
        if (phi) {
            ScalarField lv(d.g);
            for (std::size_t k = 0; k < lv.values.size(); ++k) lv[k] = d.v[k] > 0.0 ? std::log(d.v[k]) : 0.0;
            gu = gradient(lv);
            for (int j = 0; j < d.g.ny; ++j) {
                for (int i = 0; i < d.g.nx; ++i) {
                    if (!in_box(c, d.g.x(i), d.g.y(j))) continue;
                    const std::size_t k = d.g.index(i, j);
                    const Vec2 rhs = d.aux.G.at(k) + (1.0 / d.v[k]) * d.aux.E.at(k);
                    lvl.gradient_identity_error = std::max(lvl.gradient_identity_error, norm(gu.at(k) - rhs));
                }
            }
        } else {
            gu = gradient(d.v);
        }
        for (const TestFunction& t : tests) lvl.residual = std::max(lvl.residual, weak_residual(d, gu, !phi, t));
        st.levels.push_back(lvl);
    }
    std::vector<double> res, gerr;
    for (const auto& l : st.levels) {
        res.push_back(l.residual);
        gerr.push_back(l.gradient_identity_error);
    }
    st.orders = observed_orders(res);
    if (phi) {
        for (std::size_t k = 0; k + 1 < gerr.size(); ++k) {
            st.gradient_ratios.push_back(gerr[k + 1] > 0.0 ? gerr[k] / gerr[k + 1]
                                                           : std::numeric_limits<double>::infinity());
        }
    }
    return st;
}

}  // namespace

// -- manufactured cases ------------------------------------------------------

PointJet ManufacturedCase::jet(double x, double y) const {
    PointJet j;
    j.m = m(x, y);
    j.grad_m = grad_m(x, y);
    j.grad_p = grad_p(x, y);
    j.hess_p = hess_p(x, y);
    j.s = s(x, y);
    return j;
}

double ManufacturedCase::s(double x, double y) const {
    PointJet j;
    j.m = m(x, y);
    j.grad_m = grad_m(x, y);
    j.grad_p = grad_p(x, y);
    const Mat2 A = Mat2::identity() + Mat2::outer(j.m, j.m);
    return -(contract(A, hess_p(x, y)) + div_A_dot_grad_p(j));
}

double ManufacturedCase::v(double x, double y) const {
    const Vec2 gp = grad_p(x, y);
    const double mp = dot(m(x, y), gp);
    return norm2(gp) + mp * mp;
}

ScalarField ManufacturedCase::sample_p(const Grid2D& g) const {
    ScalarField f = ScalarField::sample(g, p);
    if (vanishes_on_boundary) {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                if (g.on_boundary(i, j)) f(i, j) = 0.0;
    }
    return f;
}

VectorField2 ManufacturedCase::sample_m(const Grid2D& g) const {
    VectorField2 f = VectorField2::sample(g, m);
    if (vanishes_on_boundary) {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                if (g.on_boundary(i, j)) f.set(g.index(i, j), {0.0, 0.0});
    }
    return f;
}

ScalarField ManufacturedCase::sample_s(const Grid2D& g) const {
    return ScalarField::sample(g, [this](double x, double y) { return s(x, y); });
}

ManufacturedCase ManufacturedCase::smooth(double a, double b, double c1, double c2) {
    ManufacturedCase c;
    c.name = "smooth";
    c.p = [=](double x, double y) {
        return std::sin(kPi * x) * std::sin(kPi * y) * std::exp(a * x + b * y);
    };
    c.grad_p = [=](double x, double y) {
        const double sx = std::sin(kPi * x), cx = std::cos(kPi * x);
        const double sy = std::sin(kPi * y), cy = std::cos(kPi * y);
        const double E = std::exp(a * x + b * y);
        return Vec2{(kPi * cx * sy + a * sx * sy) * E, (kPi * sx * cy + b * sx * sy) * E};
    };
    c.hess_p = [=](double x, double y) {
        const double sx = std::sin(kPi * x), cx = std::cos(kPi * x);
        const double sy = std::sin(kPi * y), cy = std::cos(kPi * y);
        const double E = std::exp(a * x + b * y);
        const double pxx = ((a * a - kPi * kPi) * sx * sy + 2 * a * kPi * cx * sy) * E;
        const double pyy = ((b * b - kPi * kPi) * sx * sy + 2 * b * kPi * sx * cy) * E;
        const double pxy =
            (kPi * kPi * cx * cy + b * kPi * cx * sy + a * kPi * sx * cy + a * b * sx * sy) * E;
        return Mat2{pxx, pxy, pxy, pyy};
    };
    c.m = [=](double x, double y) {
        const double sy = std::sin(kPi * y);
        return Vec2{c1 * std::sin(kPi * x) * sy, c2 * std::sin(2 * kPi * x) * sy};
    };
    c.grad_m = [=](double x, double y) {
        const double sy = std::sin(kPi * y), cy = std::cos(kPi * y);
        const double m1x = c1 * kPi * std::cos(kPi * x) * sy;
        const double m1y = c1 * kPi * std::sin(kPi * x) * cy;
        const double m2x = c2 * 2 * kPi * std::cos(2 * kPi * x) * sy;
        const double m2y = c2 * kPi * std::sin(2 * kPi * x) * cy;
        return Mat2{m1x, m2x, m1y, m2y};
    };
    // left strip, away from the interior critical point of p
    c.box_x0 = 0.08;
    c.box_x1 = 0.30;
    c.box_y0 = 0.30;
    c.box_y1 = 0.70;
    return c;
}

ManufacturedCase ManufacturedCase::affine(Vec2 mc, Vec2 gp, double p0) {
    ManufacturedCase c;
    c.name = "affine";
    c.p = [=](double x, double y) { return p0 + gp.x * x + gp.y * y; };
    c.grad_p = [=](double, double) { return gp; };
    c.hess_p = [](double, double) { return Mat2{}; };
    c.m = [=](double, double) { return mc; };
    c.grad_m = [](double, double) { return Mat2{}; };
    c.box_x0 = c.box_y0 = 0.2;
    c.box_x1 = c.box_y1 = 0.8;
    c.vanishes_on_boundary = false;
    return c;
}

ManufacturedCase ManufacturedCase::quadratic(Vec2 mc, Mat2 H, Vec2 g0) {
    ManufacturedCase c;
    c.name = "quadratic";
    const double hs = 0.5 * (H.a12 + H.a21);
    const Mat2 Hs{H.a11, hs, hs, H.a22};
    c.p = [=](double x, double y) {
        return g0.x * x + g0.y * y + 0.5 * (Hs.a11 * x * x + 2 * hs * x * y + Hs.a22 * y * y);
    };
    c.grad_p = [=](double x, double y) { return g0 + Hs * Vec2{x, y}; };
    c.hess_p = [=](double, double) { return Hs; };
    c.m = [=](double, double) { return mc; };
    c.grad_m = [](double, double) { return Mat2{}; };
    c.vanishes_on_boundary = false;
    return c;
}

std::vector<Vec2> random_points(std::size_t n, std::uint64_t seed, double x0, double x1, double y0,
                                double y1) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
    std::vector<Vec2> out(n);
    for (auto& p : out) {
        p.x = ux(rng);
        p.y = uy(rng);
    }
    return out;
}

// -- pointwise algebra -------------------------------------------------------

double hessian_identity_check(const ManufacturedCase& c, const std::vector<Vec2>& points) {
    double worst = 0.0;
    for (const Vec2& pt : points) {
        const Vec2 m = c.m(pt.x, pt.y);
        const Mat2 H = c.hess_p(pt.x, pt.y);
        const Mat2 A = Mat2::identity() + Mat2::outer(m, m);
        const double w = contract(A, H);
        const Mat2 M{-H.a22, H.a12, H.a21, -H.a11};
        const Mat2 lhs = A * H * A;
        const Mat2 rhs = w * A + A.det() * M;
        const double scale = std::max({mat_norm(lhs), mat_norm(w * A) + mat_norm(A.det() * M),
                                       std::numeric_limits<double>::min()});
        worst = std::max(worst, mat_norm(lhs - rhs) / scale);
    }
    return worst;
}

HessianSystem hessian_system(const PointAux& a) {
    HessianSystem s{};
    const double n1 = a.nu.x, n2 = a.nu.y;
    s.M[0][0] = 2 * n1; s.M[0][1] = 2 * n2; s.M[0][2] = 0.0;
    s.M[1][0] = 0.0;    s.M[1][1] = 2 * n1; s.M[1][2] = 2 * n2;
    s.M[2][0] = a.A.a11; s.M[2][1] = 2 * a.A.a12; s.M[2][2] = a.A.a22;
    s.rhs[0] = a.E.x;
    s.rhs[1] = a.E.y;
    s.rhs[2] = a.w;
    return s;
}

HessianSystem hessian_system_printed(const PointAux& a) {
    HessianSystem s = hessian_system(a);
    s.M[1][2] = 0.0;
    s.rhs[1] = a.E.y - 2 * a.nu.y;
    return s;
}

std::array<double, 3> cramer_solve(const HessianSystem& sys) {
    const double D = det3(sys.M);
    if (D == 0.0 || !std::isfinite(D)) throw InvalidArgument("cramer_solve: singular system");
    std::array<double, 3> out{};
    for (int col = 0; col < 3; ++col) {
        double Mc[3][3];
        for (int r = 0; r < 3; ++r)
            for (int k = 0; k < 3; ++k) Mc[r][k] = k == col ? sys.rhs[r] : sys.M[r][k];
        out[col] = det3(Mc) / D;
    }
    return out;
}

CramerReport cramer_check(const ManufacturedCase& c, const std::vector<Vec2>& points, double v_floor) {
    CramerReport rep;
    for (const Vec2& pt : points) {
        PointJet j = c.jet(pt.x, pt.y);
        const Mat2 A = Mat2::identity() + Mat2::outer(j.m, j.m);
        const double w = contract(A, j.hess_p);
        const PointAux a = evaluate_aux(j, w, std::numeric_limits<double>::infinity());
        if (a.v < v_floor) continue;
        ++rep.points_used;

        const HessianSystem sys = hessian_system(a);
        const double D = det3(sys.M);
        const double expect = 4.0 * a.detA * a.v;
        rep.det_rel_error = std::max(rep.det_rel_error, std::abs(D - expect) / std::abs(expect));

        const Mat2& H = j.hess_p;
        const double hn = std::max(mat_norm(H), std::numeric_limits<double>::min());
        auto err = [&](const std::array<double, 3>& h) {
            const Mat2 R{h[0], h[1], h[1], h[2]};
            return mat_norm(R - H) / hn;
        };
        rep.reconstruction_rel_error = std::max(rep.reconstruction_rel_error, err(cramer_solve(sys)));
        const HessianSystem printed = hessian_system_printed(a);
        if (det3(printed.M) != 0.0) {
            rep.printed_rel_error = std::max(rep.printed_rel_error, err(cramer_solve(printed)));
        } else {
            rep.printed_rel_error = std::numeric_limits<double>::infinity();
        }
    }
    return rep;
}

// -- weak residuals ----------------------------------------------------------

double TestFunction::value(double x, double y) const {
    return bump1((x - cx) / r) * bump1((y - cy) / r);
}

Vec2 TestFunction::gradient(double x, double y) const {
    const double tx = (x - cx) / r, ty = (y - cy) / r;
    return {bump1_prime(tx) * bump1(ty) / r, bump1(tx) * bump1_prime(ty) / r};
}

std::vector<TestFunction> box_test_functions(const ManufacturedCase& c) {
    const double w = c.box_x1 - c.box_x0, h = c.box_y1 - c.box_y0;
    const double cx = 0.5 * (c.box_x0 + c.box_x1), cy = 0.5 * (c.box_y0 + c.box_y1);
    const double rmax = 0.5 * std::min(w, h) * 0.95;
    std::vector<TestFunction> out{{cx, cy, rmax}};
    for (double scale : {0.6, 0.35}) {
        const double r = scale * rmax;
        const double dx = 0.8 * (0.5 * w - r), dy = 0.8 * (0.5 * h - r);
        out.push_back({cx - dx, cy - dy, r});
        out.push_back({cx + dx, cy + dy, r});
    }
    return out;
}

double ResidualStudy::min_order() const {
    double o = std::numeric_limits<double>::infinity();
    for (double x : orders) o = std::min(o, x);
    return o;
}

ResidualStudy v_equation_residual(const ManufacturedCase& c, const std::vector<int>& cells) {
    return residual_study(c, cells, false);
}

ResidualStudy phi_equation_residual(const ManufacturedCase& c, const std::vector<int>& cells) {
    return residual_study(c, cells, true);
}

std::vector<double> observed_orders(const std::vector<double>& e) {
    std::vector<double> o;
    for (std::size_t k = 0; k + 1 < e.size(); ++k) {
        if (e[k + 1] == 0.0) {
            o.push_back(e[k] == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                    : std::numeric_limits<double>::infinity());
        } else {
            o.push_back(std::log2(e[k] / e[k + 1]));
        }
    }
    return o;
}

// -- De Giorgi ---------------------------------------------------------------

namespace {

struct BallNode {
    std::size_t k;
    double dist;
};

struct Profiler {
    const ScalarField& v;
    std::vector<BallNode> nodes;  // nodes of B_R(x0)
    double area;                  // hx * hy
    double R, r;
    const GammaInputs* gin;

    double y(double R_n, double K_n) const {
        const double sk = std::sqrt(K_n);
        double acc = 0.0;
        for (const BallNode& b : nodes) {
            if (b.dist > R_n) continue;
            const double d = std::sqrt(std::max(v[b.k], 0.0)) - sk;
            if (d > 0.0) acc += area * std::pow(d, 2.0 * r);
        }
        return std::pow(acc, 1.0 / r);
    }

    double measure(double R_n, double K_n) const {
        double acc = 0.0;
        for (const BallNode& b : nodes)
            if (b.dist <= R_n && v[b.k] >= K_n) acc += area;
        return acc;
    }

    double gamma(double K) const {
        if (!gin) return 0.0;
        const double K1 = K - K / 4.0;
        const double q = r / (r - 1.0), q2 = 2.0 * r / (r - 1.0);
        double n1 = 0, nH = 0, nh = 0, nK = 0;
        for (const BallNode& b : nodes) {
            if (v[b.k] < K1) continue;
            n1 += area * std::pow(1.0 + norm2(gin->m.at(b.k)), q);
            nH += area * std::pow(norm(gin->H.at(b.k)), q2);
            nh += area * std::pow(std::abs(gin->h[b.k]), q);
            nK += area * std::pow(norm(gin->K.at(b.k)), q2);
        }
        auto root = [](double s, double p) { return s > 0.0 ? std::pow(s, 1.0 / p) : 0.0; };
        const double H = root(nH, q2), Kn = root(nK, q2);
        return root(n1, q) + R * R * (H * H + root(nh, q) + Kn * Kn);
    }

    // K = c/R^2 y0(K) (Gamma(K) + R^(2(r-1)/r)) + 2 by bisection on [2, hi].
    double solve_K(double c) const {
        double vmax = 0.0;
        for (const BallNode& b : nodes) vmax = std::max(vmax, v[b.k]);
        const double tail = std::pow(R, 2.0 * (r - 1.0) / r);
        auto F = [&](double K) { return c / (R * R) * y(R, K / 2.0) * (gamma(K) + tail) + 2.0 - K; };
        double lo = 2.0, hi = std::max(4.0, 2.0 * vmax + 4.0);
        if (F(lo) <= 0.0) return lo;
        while (F(hi) > 0.0) hi *= 2.0;
        for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (F(mid) > 0.0 ? lo : hi) = mid;
        }
        return hi;
    }
};

void fill_levels(const Profiler& pr, DeGiorgiReport& rep, int N) {
    rep.levels.clear();
    for (int n = 0; n <= N; ++n) {
        DeGiorgiLevel L;
        L.n = n;
        L.R_n = rep.R / 2.0 + rep.R / std::pow(2.0, n + 1);
        L.K_n = rep.K - rep.K / std::pow(2.0, n + 1);
        const double R_prev = n == 0 ? L.R_n : rep.R / 2.0 + rep.R / std::pow(2.0, n);
        L.measure = pr.measure(R_prev, L.K_n);
        L.y_n = pr.y(L.R_n, L.K_n);
        rep.levels.push_back(L);
    }
}

}  // namespace

DeGiorgiReport de_giorgi_profile(const ScalarField& v, Vec2 x0, double R, const Params& params,
                                 std::optional<double> K, const GammaInputs* gin, int N) {
    params.validate();
    const Grid2D& g = v.grid;
    g.validate();
    v.validate();
    if (!(R > 0.0)) throw InvalidArgument("de_giorgi_profile: R must be positive");
    if (N < 1) throw InvalidArgument("de_giorgi_profile: N must be >= 1");
    const double tol = 1e-12;
    if (x0.x - R < g.x0 - tol || x0.x + R > g.x_max() + tol || x0.y - R < g.y0 - tol ||
        x0.y + R > g.y_max() + tol) {
        throw InvalidArgument("de_giorgi_profile: ball B_R(x0) leaves the grid");
    }
    if (K && !(*K >= 2.0)) throw InvalidArgument("de_giorgi_profile: K must be >= 2");
    if (gin && (!(gin->m.grid == g) || !(gin->H.grid == g) || !(gin->h.grid == g) || !(gin->K.grid == g))) {
        throw InvalidArgument("de_giorgi_profile: Gamma inputs live on another grid");
    }

    Profiler pr{v, {}, g.hx * g.hy, R, params.r_exp, gin};
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double d = std::hypot(g.x(i) - x0.x, g.y(j) - x0.y);
            if (d <= R) pr.nodes.push_back({g.index(i, j), d});
        }
    }
    if (pr.nodes.empty()) throw InvalidArgument("de_giorgi_profile: the ball contains no grid nodes");

    DeGiorgiReport rep;
    rep.x0 = x0;
    rep.R = R;
    rep.r = params.r_exp;
    if (K) {
        rep.K = *K;
        fill_levels(pr, rep, N);
    } else {
        rep.K_from_formula = true;
        double c = 1.0;
        for (int attempt = 0; attempt <= 60; ++attempt, c *= 2.0) {
            rep.c = c;
            rep.K = pr.solve_K(c);
            fill_levels(pr, rep, N);
            if (rep.levels.back().y_n < 1e-12) break;
        }
    }
    rep.Gamma = pr.gamma(rep.K);
    rep.y0 = rep.levels.front().y_n;
    for (const BallNode& b : pr.nodes)
        if (b.dist <= R / 2.0) rep.sup_half_ball = std::max(rep.sup_half_ball, v[b.k]);
    rep.sup_bounded = rep.sup_half_ball <= rep.K;

    for (std::size_t n = 2; n < rep.levels.size(); ++n) {
        if (rep.levels[n].y_n > rep.levels[n - 1].y_n) rep.nonincreasing = false;
    }

    // log y_{n+1} - 2 log y_n = log c + n log b
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (std::size_t n = 0; n + 1 < rep.levels.size(); ++n) {
        const double a = rep.levels[n].y_n, b = rep.levels[n + 1].y_n;
        if (!(a > 0.0 && b > 0.0)) continue;
        const double X = static_cast<double>(n);
        const double Y = std::log(b) - 2.0 * std::log(a);
        sx += X; sy += Y; sxx += X * X; sxy += X * Y;
        ++cnt;
    }
    rep.fit_points = cnt;
    if (cnt >= 2) {
        const double den = cnt * sxx - sx * sx;
        const double slope = den != 0.0 ? (cnt * sxy - sx * sy) / den : 0.0;
        const double icpt = (sy - slope * sx) / cnt;
        rep.fit_b = std::exp(slope);
        rep.fit_c = std::exp(icpt);
    } else {
        rep.fit_b = rep.fit_c = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

void write_degiorgi_csv(const std::filesystem::path& path, const DeGiorgiReport& rep) {
    std::ofstream out(path);
    if (!out) throw Error("write_degiorgi_csv: cannot open " + path.string());
    out << "n,R_n,K_n,measure,y_n\n";
    char buf[160];
    for (const DeGiorgiLevel& L : rep.levels) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", L.n, L.R_n, L.K_n, L.measure, L.y_n);
        out << buf;
    }
}

// -- recursive sequence ------------------------------------------------------

const char* to_string(SequenceVerdict v) {
    switch (v) {
        case SequenceVerdict::Converges: return "converges";
        case SequenceVerdict::Diverges: return "diverges";
        default: return "undetermined";
    }
}

SequenceReport ynb_sequence(double c, double b, double alpha, double y0, int N) {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("ynb_sequence: c must be > 0");
    if (!(b > 1.0) || !std::isfinite(b)) throw InvalidArgument("ynb_sequence: b must be > 1");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("ynb_sequence: alpha must be > 0");
    if (!(y0 >= 0.0) || !std::isfinite(y0)) throw InvalidArgument("ynb_sequence: y0 must be >= 0");
    if (N < 1) throw InvalidArgument("ynb_sequence: N must be >= 1");

    SequenceReport rep;
    const double log_star = -std::log(c) / alpha - std::log(b) / (alpha * alpha);
    rep.threshold = std::exp(log_star);
    rep.below_threshold = y0 <= rep.threshold;
    rep.y.assign(static_cast<std::size_t>(N) + 1, 0.0);
    if (y0 == 0.0) {
        rep.verdict = SequenceVerdict::Converges;
        return rep;
    }

    std::vector<double> L(static_cast<std::size_t>(N) + 1);
    double lz = std::log(y0) - log_star;
    if (y0 == rep.threshold) lz = 0.0;
    for (int n = 0; n <= N; ++n) {
        L[n] = log_star - n * std::log(b) / alpha + lz;
        rep.y[n] = std::exp(L[n]);
        lz *= 1.0 + alpha;
    }

    const std::size_t tail = std::max<std::size_t>(2, static_cast<std::size_t>(N) / 10 + 1);
    bool tail_down = true, tail_up = true;
    for (std::size_t n = L.size() - tail; n < L.size(); ++n) {
        if (L[n] > L[n - 1]) tail_down = false;
        if (!(L[n] > L[n - 1])) tail_up = false;
    }
    if (std::isinf(L.back()) && L.back() > 0) {
        rep.verdict = SequenceVerdict::Diverges;
    } else if (tail_up && L.back() > L.front()) {
        rep.verdict = SequenceVerdict::Diverges;
    } else if (tail_down && L.back() < L.front()) {
        rep.verdict = SequenceVerdict::Converges;
    }

    double y = y0;
    for (int n = 0; n < std::min(N, 30); ++n) {
        y = c * std::pow(b, n) * std::pow(y, 1.0 + alpha);
        const double ref = rep.y[n + 1];
        if (!std::isfinite(y) || !std::isfinite(ref) || ref == 0.0) break;
        rep.raw_rel_diff = std::max(rep.raw_rel_diff, std::abs(y - ref) / ref);
    }
    return rep;
}

// -- operator convergence ----------------------------------------------------

std::vector<OrderRow> mms_convergence(const ManufacturedCase& c, const std::vector<int>& cells) {
    if (cells.size() < 2) throw InvalidArgument("mms_convergence: need at least two grids");
    OrderRow grad{"gradient", cells, {}, {}}, hess{"hessian", cells, {}, {}},
        div{"div_anisotropic", cells, {}, {}}, pres{"pressure_solve", cells, {}, {}},
        step{"coupled_step", cells, {}, {}};

    const double dt = 0.01;
    Params params;
    SolverOptions tight;
    tight.tol = 1e-11;
    auto one_step = [&](int n) {
        const Grid2D g = Grid2D::unit_square(n);
        State st{c.sample_m(g), c.sample_p(g), 0.0};
        return step_conductance(st, c.sample_s(g), params, dt, tight).m;
    };

    VectorField2 prev_step;
    for (std::size_t idx = 0; idx < cells.size(); ++idx) {
        const Grid2D g = Grid2D::unit_square(cells[idx]);
        const ScalarField p = c.sample_p(g);
        const VectorField2 m = c.sample_m(g);

        double eg = 0, eh = 0, ed = 0;
        const VectorField2 gp = gradient(p);
        const Matrix2Field hp = hessian(p);
        const ScalarField dv = div_anisotropic(conductivity(m).A, p);
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const double x = g.x(i), y = g.y(j);
                const std::size_t k = g.index(i, j);
                const Vec2 ge = c.grad_p(x, y);
                eg = std::max({eg, std::abs(gp.c1[k] - ge.x), std::abs(gp.c2[k] - ge.y)});
                const Mat2 he = c.hess_p(x, y);
                const Mat2 hd = hp.at(k);
                eh = std::max({eh, std::abs(hd.a11 - he.a11), std::abs(hd.a12 - he.a12),
                               std::abs(hd.a22 - he.a22)});
                ed = std::max(ed, std::abs(dv[k] + c.s(x, y)));
            }
        }
        grad.errors.push_back(eg);
        hess.errors.push_back(eh);
        div.errors.push_back(ed);

        if (c.vanishes_on_boundary) {
            const PressureSolution sol =
                solve_pressure(assemble_pressure_system(conductivity(m).A, c.sample_s(g)));
            ScalarField d = sol.p;
            for (std::size_t k = 0; k < d.values.size(); ++k) d[k] -= p[k];
            const double pn = lp_norm(p, 2.0);
            pres.errors.push_back(pn > 0.0 ? lp_norm(d, 2.0) / pn : lp_norm(d, 2.0));

            // self-convergence: compare with the next finer grid at shared nodes
            const VectorField2 coarse = idx == 0 ? one_step(cells[0]) : prev_step;
            const int fine_n = idx + 1 < cells.size() ? cells[idx + 1] : 2 * cells[idx];
            const VectorField2 fine = one_step(fine_n);
            if (fine_n % cells[idx] != 0) throw InvalidArgument("mms_convergence: grids must be nested");
            const int ratio = fine_n / cells[idx];
            double es = 0;
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    const Vec2 a = coarse.at(i, j), b = fine.at(i * ratio, j * ratio);
                    es = std::max({es, std::abs(a.x - b.x), std::abs(a.y - b.y)});
                }
            step.errors.push_back(es);
            prev_step = fine;
        }
    }
    std::vector<OrderRow> rows{grad, hess, div};
    if (c.vanishes_on_boundary) {
        rows.push_back(pres);
        rows.push_back(step);
    }
    for (OrderRow& r : rows) r.orders = observed_orders(r.errors);
    return rows;
}

}  // namespace hucai
