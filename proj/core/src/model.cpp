#include "hucai/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hucai/error.hpp"

namespace hucai {

namespace {

void require(bool ok, const std::string& field, const std::string& rule) {
    if (!ok) throw InvalidArgument("Params." + field + ": " + rule);
}

Vec2 row(const Mat2& m, int i) { return i == 0 ? Vec2{m.a11, m.a12} : Vec2{m.a21, m.a22}; }

}  // namespace

void Params::validate() const {
    require(alpha > 0.0 && std::isfinite(alpha), "alpha", "must be positive");
    require(beta > 0.0 && std::isfinite(beta), "beta", "must be positive");
    require(gamma > 0.5 && std::isfinite(gamma), "gamma", "must exceed 1/2");
    require(eps_reg >= 0.0 && std::isfinite(eps_reg), "eps_reg", "must be >= 0");
    require(!(gamma < 1.0 && eps_reg == 0.0), "eps_reg",
            "must be positive when gamma < 1 (the reaction term is singular at m = 0)");
    require(v_min > 0.0 && std::isfinite(v_min), "v_min", "must be positive");
    require(r_exp > 1.0 && std::isfinite(r_exp), "r_exp", "must exceed 1");
    require(delta_exp > 2.0 && delta_exp < 3.0, "delta_exp", "must lie in (2, 3)");
}

void State::validate() const {
    m.validate();
    p.validate();
    if (!(m.grid == p.grid)) throw InvalidArgument("State: m and p live on different grids");
    const Grid2D& g = p.grid;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (!g.on_boundary(i, j)) continue;
            const std::size_t k = g.index(i, j);
            if (p[k] != 0.0 || m.c1[k] != 0.0 || m.c2[k] != 0.0) {
                std::ostringstream os;
                os << "State: nonzero boundary value at node (" << i << "," << j << ")";
                throw InvalidArgument(os.str());
            }
        }
    }
    if (!std::isfinite(t) || t < 0.0) throw InvalidArgument("State: time must be finite and >= 0");
}

Conductivity conductivity(const VectorField2& m) {
    m.validate();
    Conductivity c{Matrix2Field(m.grid, true), ScalarField(m.grid)};
    for (std::size_t k = 0; k < m.grid.size(); ++k) {
        const Vec2 mk = m.at(k);
        c.A.set(k, Mat2::identity() + Mat2::outer(mk, mk));
        c.detA[k] = 1.0 + norm2(mk);
    }
    return c;
}

ScalarField compute_v(const VectorField2& m, const ScalarField& p) {
    const VectorField2 gp = gradient(p);
    ScalarField v(p.grid);
    for (std::size_t k = 0; k < v.values.size(); ++k) {
        const Vec2 g = gp.at(k);
        const double mg = dot(m.at(k), g);
        v[k] = norm2(g) + mg * mg;
    }
    return v;
}

double div_A_dot_grad_p(const PointJet& jet) {
    const double div_m = jet.grad_m.a11 + jet.grad_m.a22;
    // (m . grad) m_j = sum_i m_i d_i m_j
    const Vec2 convective = jet.m.x * row(jet.grad_m, 0) + jet.m.y * row(jet.grad_m, 1);
    const Vec2 divA = div_m * jet.m + convective;
    return dot(divA, jet.grad_p);
}

std::vector<PointJet> nodal_jets(const VectorField2& m, const ScalarField& p, const ScalarField& s) {
    if (!(m.grid == p.grid) || !(s.grid == p.grid)) {
        throw InvalidArgument("nodal_jets: fields live on different grids");
    }
    const VectorField2 gp = gradient(p);
    const Matrix2Field hp = hessian(p);
    const Matrix2Field gm = jacobian(m);
    std::vector<PointJet> jets(p.grid.size());
    for (std::size_t k = 0; k < jets.size(); ++k) {
        jets[k] = PointJet{m.at(k), gm.at(k), gp.at(k), hp.at(k), s[k]};
    }
    return jets;
}

ScalarField compute_w(const VectorField2& m, const ScalarField& p, const ScalarField& s) {
    const VectorField2 gp = gradient(p);
    const Matrix2Field gm = jacobian(m);
    ScalarField w(p.grid);
    for (std::size_t k = 0; k < w.values.size(); ++k) {
        PointJet jet{m.at(k), gm.at(k), gp.at(k), Mat2{}, s[k]};
        w[k] = -(div_A_dot_grad_p(jet) + s[k]);
    }
    return w;
}

PointAux evaluate_aux(const PointJet& jet, double w, double v_min) {
    PointAux out;
    const Vec2 m = jet.m;
    const Vec2 gp = jet.grad_p;
    out.A = Mat2::identity() + Mat2::outer(m, m);
    out.detA = 1.0 + norm2(m);
    out.nu = out.A * gp;
    out.v = dot(out.nu, gp);
    out.w = w;
    out.E = 2.0 * (jet.hess_p * out.nu);

    const double a11 = out.A.a11, a12 = out.A.a12, a22 = out.A.a22;
    const double p1 = gp.x, p2 = gp.y;
    const double nu1 = out.nu.x, nu2 = out.nu.y;
    const double cross = a11 * a22 - 2.0 * a12 * a12;
    out.A1 = Mat2{a11 * nu1, a12 * a11 * p1 - cross * p2, a11 * nu2, a22 * nu1};
    out.A2 = Mat2{a11 * nu2, a22 * nu1, -cross * p1 + a12 * a22 * p2, a22 * nu2};
    out.A3 = -1.0 * Mat2::outer(out.nu, out.nu);

    const double gm_norm = frobenius(jet.grad_m);
    out.d = out.detA * norm(m) * gm_norm;

    out.on_mask = out.v >= v_min && out.v > 0.0;
    if (!out.on_mask) return out;

    const Vec2 dm1 = row(jet.grad_m, 0);  // d m / d x1
    const Vec2 dm2 = row(jet.grad_m, 1);
    const double mp = dot(m, gp);
    const double inv_v = 1.0 / out.v;
    out.G = inv_v * Vec2{2.0 * mp * dot(dm1, gp), 2.0 * mp * dot(dm2, gp)};
    const Vec2 grad_det{2.0 * dot(m, dm1), 2.0 * dot(m, dm2)};

    // rows (grad p)^T A_i applied to grad det(A)
    const Vec2 q{dot(gp, out.A1 * grad_det), dot(gp, out.A2 * grad_det)};
    const double inv_dv = 1.0 / (out.detA * out.v);
    const Vec2 AG = out.A * out.G;
    out.H = inv_dv * q - AG;
    out.K = AG + (2.0 * inv_v * w) * out.nu;
    const Vec2 lead = (2.0 * inv_v * w) * out.nu - inv_dv * q + AG;
    out.h = dot(lead, out.G) +
            2.0 * w / (out.detA * out.v * out.v) * dot(out.A3 * gp, grad_det);
    return out;
}

AuxFields compute_aux(const VectorField2& m, const ScalarField& p, const ScalarField& s,
                      const Params& params) {
    const Grid2D& g = p.grid;
    const std::vector<PointJet> jets = nodal_jets(m, p, s);
    const ScalarField w = compute_w(m, p, s);

    AuxFields aux;
    aux.A = Matrix2Field(g, true);
    aux.detA = ScalarField(g);
    aux.v = ScalarField(g);
    aux.w = w;
    aux.nu = VectorField2(g);
    aux.E = VectorField2(g);
    aux.G = VectorField2(g);
    aux.A1 = Matrix2Field(g);
    aux.A2 = Matrix2Field(g);
    aux.A3 = Matrix2Field(g, true);
    aux.H = VectorField2(g);
    aux.K = VectorField2(g);
    aux.h = ScalarField(g);
    aux.d = ScalarField(g);
    aux.mask.assign(g.size(), 0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const PointAux a = evaluate_aux(jets[k], w[k], params.v_min);
        aux.A.set(k, a.A);
        aux.detA[k] = a.detA;
        aux.v[k] = a.v;
        aux.nu.set(k, a.nu);
        aux.E.set(k, a.E);
        aux.G.set(k, a.G);
        aux.A1.set(k, a.A1);
        aux.A2.set(k, a.A2);
        aux.A3.set(k, a.A3);
        aux.H.set(k, a.H);
        aux.K.set(k, a.K);
        aux.h[k] = a.h;
        aux.d[k] = a.d;
        aux.mask[k] = a.on_mask ? 1 : 0;
    }
    return aux;
}

Vec2 reaction_at(const Vec2& m, const Params& params) {
    if (params.gamma == 1.0) return m;
    if (params.eps_reg == 0.0 && params.gamma < 1.0) {
        throw InvalidArgument("reaction_term: eps_reg = 0 with gamma < 1 is singular at m = 0");
    }
    const double base = norm2(m) + params.eps_reg;
    if (base == 0.0) return {0.0, 0.0};
    return std::pow(base, params.gamma - 1.0) * m;
}

VectorField2 reaction_term(const VectorField2& m, const Params& params) {
    if (!(params.gamma > 0.5)) throw InvalidArgument("reaction_term: gamma must exceed 1/2");
    if (params.eps_reg == 0.0 && params.gamma < 1.0) {
        throw InvalidArgument("reaction_term: eps_reg = 0 with gamma < 1 is singular at m = 0");
    }
    VectorField2 out(m.grid);
    for (std::size_t k = 0; k < m.grid.size(); ++k) out.set(k, reaction_at(m.at(k), params));
    return out;
}

VectorField2 forcing_term(const VectorField2& m, const ScalarField& p, const Params& params) {
    const VectorField2 gp = gradient(p);
    const double b2 = params.beta * params.beta;
    VectorField2 out(p.grid);
    for (std::size_t k = 0; k < out.c1.size(); ++k) {
        const Vec2 g = gp.at(k);
        out.set(k, (b2 * dot(m.at(k), g)) * g);
    }
    return out;
}

CoefficientRatios coefficient_ratios(const AuxFields& aux, const VectorField2& m,
                                     const ScalarField& s) {
    CoefficientRatios r;
    constexpr double kTiny = 1e-14;
    for (std::size_t k = 0; k < aux.mask.size(); ++k) {
        if (!aux.mask[k]) continue;
        const double m2 = norm2(m.at(k));
        const double d = aux.d[k];
        const double sk = std::abs(s[k]);
        const double dH = d;
        const double dK = d + std::pow(1.0 + m2, 1.5) * sk;
        const double dh = d * d + (1.0 + m2) * sk * sk;
        bool used = false;
        if (dH > kTiny) { r.H_ratio = std::max(r.H_ratio, norm(aux.H.at(k)) / dH); used = true; }
        if (dK > kTiny) { r.K_ratio = std::max(r.K_ratio, norm(aux.K.at(k)) / dK); used = true; }
        if (dh > kTiny) { r.h_ratio = std::max(r.h_ratio, std::abs(aux.h[k]) / dh); used = true; }
        if (used) ++r.nodes;
    }
    return r;
}

}  // namespace hucai
