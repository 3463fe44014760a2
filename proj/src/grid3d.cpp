#include "levelmass/grid3d.hpp"

#include <cmath>
#include <numeric>

#include "levelmass/errors.hpp"
#include "levelmass/numerics.hpp"

namespace levelmass {

namespace {

inline double dist(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

} // namespace

ConformalField::ConformalField(const MetricModel& model, const GridOptions& opts)
    : model_(model), N_(opts.N), L_(opts.L), pole_(opts.pole) {
    if (N_ < 16) throw std::invalid_argument("grid: need N >= 16");
    if (!(L_ > 0.0)) throw std::invalid_argument("grid: need L > 0");
    h_ = L_ / N_;
    // pole at least 10 cells from the boundary
    for (double c : pole_)
        if (std::abs(c) > 0.5 * L_ - 10.0 * h_)
            throw std::invalid_argument("grid: pole must sit >= 10 cells inside the box");

    phi2_.resize(static_cast<std::size_t>(N_) * N_ * N_);
    const double m = model_.tail_mass();
    double max_shell_dev = 0.0;
    for (int k = 0; k < N_; ++k)
        for (int j = 0; j < N_; ++j)
            for (int i = 0; i < N_; ++i) {
                const auto x = node(i, j, k);
                const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
                const double phi = model_.conformal_factor(r);
                if (!(phi > 0.0)) throw SolverError("grid: phi <= 0 at a node");
                phi2_[idx(i, j, k)] = phi * phi;
                const bool shell = i == 0 || j == 0 || k == 0 || i == N_ - 1 ||
                                   j == N_ - 1 || k == N_ - 1;
                if (shell)
                    max_shell_dev = std::max(
                        max_shell_dev, std::abs(phi - (1.0 + m / (2.0 * r))));
            }
    if (max_shell_dev > opts.boundary_phi_tol)
        throw SolverError("grid: boundary shell is not Schwarzschildian; "
                          "enlarge the box");
}

Solution3D solve_green_3d(const MetricModel& model, const GridOptions& opts,
                          const RadialPotential& farfield) {
    Solution3D sol;
    sol.field_ = std::make_shared<ConformalField>(model, opts);
    const ConformalField& F = *sol.field_;
    const int N = F.N();
    const double h = F.h();
    const auto& o = F.pole();
    const double phi_at_pole =
        model.conformal_factor(std::sqrt(o[0] * o[0] + o[1] * o[1] + o[2] * o[2]));
    const double K = 1.0 / (phi_at_pole * phi_at_pole);
    sol.K_ = K;

    // u_sing must stay finite at every node
    double nearest2 = 0.0;
    for (int a = 0; a < 3; ++a) {
        const double s = (o[a] + 0.5 * F.L()) / h - 0.5;
        const double d = (s - std::round(s)) * h;
        nearest2 += d * d;
    }
    if (std::sqrt(nearest2) < 0.3 * h)
        throw std::invalid_argument(
            "grid: pole nearly coincides with a node; offset it or change N parity");

    const std::size_t ntot = static_cast<std::size_t>(N) * N * N;
    auto u_sing = [&](const std::array<double, 3>& x) { return 1.0 - K / dist(x, o); };

    // Interior unknowns live on [1, N-2]^3; the outer layer carries the
    // Dirichlet data w_b = u_radial(|x-o|) - u_sing(x).
    const int M = N - 2;
    const std::size_t nunk = static_cast<std::size_t>(M) * M * M;
    auto uidx = [M](int i, int j, int k) {
        return (static_cast<std::size_t>(k - 1) * M + (j - 1)) * M + (i - 1);
    };

    std::vector<double> wfull(ntot, 0.0); // includes boundary values
    for (int k = 0; k < N; ++k)
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i) {
                const bool bdry = i == 0 || j == 0 || k == 0 || i == N - 1 ||
                                  j == N - 1 || k == N - 1;
                if (!bdry) continue;
                const auto x = F.node(i, j, k);
                wfull[F.idx(i, j, k)] = 1.0 - farfield.deficit(dist(x, o)) - u_sing(x);
            }

    // RHS: f = -grad(phi^2) . grad u_sing, with grad(phi^2) analytic (radial
    // about the origin) and grad u_sing = K (x-o)/|x-o|^3.
    std::vector<double> b(nunk, 0.0);
    const double inv_h2 = 1.0 / (h * h);
    for (int k = 1; k < N - 1; ++k)
        for (int j = 1; j < N - 1; ++j)
            for (int i = 1; i < N - 1; ++i) {
                const auto x = F.node(i, j, k);
                const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
                const double d = dist(x, o);
                double f = 0.0;
                if (r > 0.0 && d > 1e-12) {
                    const double phi = model.conformal_factor(r);
                    const double dphi2 = 2.0 * phi * model.phi_prime(r); // d(phi^2)/dr
                    const double x_dot = (x[0] * (x[0] - o[0]) + x[1] * (x[1] - o[1]) +
                                          x[2] * (x[2] - o[2]));
                    f = -dphi2 * K * x_dot / (r * d * d * d);
                }
                // A = -div_h(phi^2 grad_h .), so div(phi^2 grad w) = f becomes
                // A w = -f plus the fixed-boundary transfer
                double rhs = -f;
                const std::size_t id = F.idx(i, j, k);
                const double pc = F.phi2(id);
                auto face = [&](int ii, int jj, int kk) {
                    const std::size_t nid = F.idx(ii, jj, kk);
                    const double c = 0.5 * (pc + F.phi2(nid));
                    const bool nb_bdry = ii == 0 || jj == 0 || kk == 0 ||
                                         ii == N - 1 || jj == N - 1 || kk == N - 1;
                    if (nb_bdry) rhs += c * wfull[nid] * inv_h2;
                };
                face(i - 1, j, k); face(i + 1, j, k);
                face(i, j - 1, k); face(i, j + 1, k);
                face(i, j, k - 1); face(i, j, k + 1);
                b[uidx(i, j, k)] = rhs;
            }

    // operator apply: (A w)_i = sum_faces c_f (w_i - w_nb)/h^2, fixed nb = 0
    auto apply = [&](const std::vector<double>& w, std::vector<double>& out) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int k = 1; k < N - 1; ++k)
            for (int j = 1; j < N - 1; ++j)
                for (int i = 1; i < N - 1; ++i) {
                    const std::size_t id = F.idx(i, j, k);
                    const double pc = F.phi2(id);
                    const double wc = w[uidx(i, j, k)];
                    double acc = 0.0;
                    auto face = [&](int ii, int jj, int kk) {
                        const double c = 0.5 * (pc + F.phi2(F.idx(ii, jj, kk)));
                        const bool nb_bdry = ii == 0 || jj == 0 || kk == 0 ||
                                             ii == N - 1 || jj == N - 1 || kk == N - 1;
                        const double wn = nb_bdry ? 0.0 : w[uidx(ii, jj, kk)];
                        acc += c * (wc - wn);
                    };
                    face(i - 1, j, k); face(i + 1, j, k);
                    face(i, j - 1, k); face(i, j + 1, k);
                    face(i, j, k - 1); face(i, j, k + 1);
                    out[uidx(i, j, k)] = acc * inv_h2;
                }
    };

    std::vector<double> diag(nunk, 0.0);
    for (int k = 1; k < N - 1; ++k)
        for (int j = 1; j < N - 1; ++j)
            for (int i = 1; i < N - 1; ++i) {
                const std::size_t id = F.idx(i, j, k);
                const double pc = F.phi2(id);
                double dsum = 0.0;
                auto face = [&](int ii, int jj, int kk) {
                    dsum += 0.5 * (pc + F.phi2(F.idx(ii, jj, kk)));
                };
                face(i - 1, j, k); face(i + 1, j, k);
                face(i, j - 1, k); face(i, j + 1, k);
                face(i, j, k - 1); face(i, j, k + 1);
                diag[uidx(i, j, k)] = dsum * inv_h2;
            }

    // Jacobi-preconditioned CG. Dot products stay serial so repeated runs
    // reproduce outputs bit for bit.
    auto dot = [](const std::vector<double>& a, const std::vector<double>& c) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * c[i];
        return s;
    };

    std::vector<double> w(nunk, 0.0), res(b), z(nunk), p(nunk), Ap(nunk);
    const double bnorm = std::sqrt(dot(b, b));
    double relres = 0.0;
    int iters = 0;
    if (bnorm > 0.0) {
        for (std::size_t i = 0; i < nunk; ++i) z[i] = res[i] / diag[i];
        p = z;
        double rz = dot(res, z);
        for (iters = 0; iters < opts.cg_max_iters; ++iters) {
            apply(p, Ap);
            const double alpha = rz / dot(p, Ap);
            for (std::size_t i = 0; i < nunk; ++i) w[i] += alpha * p[i];
            for (std::size_t i = 0; i < nunk; ++i) res[i] -= alpha * Ap[i];
            relres = std::sqrt(dot(res, res)) / bnorm;
            if (relres <= opts.cg_tol) { ++iters; break; }
            for (std::size_t i = 0; i < nunk; ++i) z[i] = res[i] / diag[i];
            const double rz_new = dot(res, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t i = 0; i < nunk; ++i) p[i] = z[i] + beta * p[i];
        }
        if (relres > opts.cg_tol)
            throw SolverError("conjugate gradients did not reach the residual "
                              "target within the iteration cap");
    }
    sol.iterations_ = iters;
    sol.residual_ = relres;

    // assemble u = u_sing + w on all nodes
    sol.u_.resize(ntot);
    for (int k = 0; k < N; ++k)
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i) {
                const std::size_t id = F.idx(i, j, k);
                const bool bdry = i == 0 || j == 0 || k == 0 || i == N - 1 ||
                                  j == N - 1 || k == N - 1;
                const double wval = bdry ? wfull[id] : w[uidx(i, j, k)];
                sol.u_[id] = u_sing(F.node(i, j, k)) + wval;
            }

    // |grad u|_g at nodes: 4th-order central differences where the stencil
    // fits, 2nd-order one cell from the boundary.
    sol.G_.resize(ntot);
    const auto& u = sol.u_;
    auto deriv = [&](int i, int j, int k, int axis) {
        int di = axis == 0, dj = axis == 1, dk = axis == 2;
        const int c = axis == 0 ? i : (axis == 1 ? j : k);
        if (c >= 2 && c <= N - 3) {
            const double um2 = u[F.idx(i - 2 * di, j - 2 * dj, k - 2 * dk)];
            const double um1 = u[F.idx(i - di, j - dj, k - dk)];
            const double up1 = u[F.idx(i + di, j + dj, k + dk)];
            const double up2 = u[F.idx(i + 2 * di, j + 2 * dj, k + 2 * dk)];
            return (um2 - 8.0 * um1 + 8.0 * up1 - up2) / (12.0 * h);
        }
        if (c >= 1 && c <= N - 2) {
            const double um1 = u[F.idx(i - di, j - dj, k - dk)];
            const double up1 = u[F.idx(i + di, j + dj, k + dk)];
            return (up1 - um1) / (2.0 * h);
        }
        // one-sided at the outer layer (only used for completeness)
        const int s = (c == 0) ? 1 : -1;
        const double u0 = u[F.idx(i, j, k)];
        const double u1 = u[F.idx(i + s * di, j + s * dj, k + s * dk)];
        return s * (u1 - u0) / h;
    };
    for (int k = 0; k < N; ++k)
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i) {
                const double gx = deriv(i, j, k, 0);
                const double gy = deriv(i, j, k, 1);
                const double gz = deriv(i, j, k, 2);
                const std::size_t id = F.idx(i, j, k);
                sol.G_[id] = std::sqrt(gx * gx + gy * gy + gz * gz) / F.phi2(id);
            }
    return sol;
}

// ---------------------------------------------------------------------------
// tricubic Lagrange sampling
// ---------------------------------------------------------------------------

namespace {

struct Stencil1D {
    int base = 0;          // index of the node mapped to t = 0
    double wv[4], wd[4];   // value and derivative weights
};

Stencil1D stencil(double coord, double L, double h, int N) {
    // node i sits at -L/2 + (i+0.5) h
    const double s = (coord + 0.5 * L) / h - 0.5;
    int i0 = static_cast<int>(std::floor(s));
    i0 = std::max(1, std::min(N - 3, i0));
    const double t = s - i0;
    Stencil1D st;
    st.base = i0;
    st.wv[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
    st.wv[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    st.wv[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
    st.wv[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
    st.wd[0] = -(3.0 * t * t - 6.0 * t + 2.0) / 6.0 / h;
    st.wd[1] = (3.0 * t * t - 4.0 * t - 1.0) / 2.0 / h;
    st.wd[2] = -(3.0 * t * t - 2.0 * t - 2.0) / 2.0 / h;
    st.wd[3] = (3.0 * t * t - 1.0) / 6.0 / h;
    return st;
}

double sample(const ConformalField& F, const std::vector<double>& f,
              const std::array<double, 3>& x, int daxis /* -1 = value */) {
    const Stencil1D sx = stencil(x[0], F.L(), F.h(), F.N());
    const Stencil1D sy = stencil(x[1], F.L(), F.h(), F.N());
    const Stencil1D sz = stencil(x[2], F.L(), F.h(), F.N());
    const double* wx = daxis == 0 ? sx.wd : sx.wv;
    const double* wy = daxis == 1 ? sy.wd : sy.wv;
    const double* wz = daxis == 2 ? sz.wd : sz.wv;
    double acc = 0.0;
    for (int c = 0; c < 4; ++c) {
        double accj = 0.0;
        for (int jb = 0; jb < 4; ++jb) {
            double acci = 0.0;
            const std::size_t row =
                F.idx(sx.base - 1, sy.base - 1 + jb, sz.base - 1 + c);
            for (int a = 0; a < 4; ++a) acci += wx[a] * f[row + a];
            accj += wy[jb] * acci;
        }
        acc += wz[c] * accj;
    }
    return acc;
}

} // namespace

double Solution3D::sample_u(const std::array<double, 3>& x) const {
    return sample(*field_, u_, x, -1);
}

std::array<double, 3> Solution3D::sample_grad_u(const std::array<double, 3>& x) const {
    return {sample(*field_, u_, x, 0), sample(*field_, u_, x, 1), sample(*field_, u_, x, 2)};
}

double Solution3D::sample_G(const std::array<double, 3>& x) const {
    return sample(*field_, G_, x, -1);
}

std::array<double, 3> Solution3D::sample_grad_G(const std::array<double, 3>& x) const {
    return {sample(*field_, G_, x, 0), sample(*field_, G_, x, 1), sample(*field_, G_, x, 2)};
}

double Solution3D::gradnorm_metric(const std::array<double, 3>& x) const {
    return sample_G(x);
}

double Solution3D::mean_curv(const std::array<double, 3>& x) const {
    // H = -<grad|grad u|, grad u>_g / |grad u|^2 = -(dG . du) / (phi^4 G^2)
    const auto du = sample_grad_u(x);
    const auto dG = sample_grad_G(x);
    const double G = sample_G(x);
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    const double phi = field_->model().conformal_factor(r);
    const double p2 = phi * phi;
    const double inner = du[0] * dG[0] + du[1] * dG[1] + du[2] * dG[2];
    return -inner / (p2 * p2 * G * G);
}

} // namespace levelmass
