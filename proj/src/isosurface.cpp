#include "levelmass/grid3d.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

#include "levelmass/errors.hpp"
#include "levelmass/numerics.hpp"

namespace levelmass {

double ExtractedSurface::total_area() const {
    double a = 0.0;
    for (double t : tri_area) a += t;
    return a;
}

namespace {

// Six tetrahedra per cell sharing the main diagonal (corner 0 to corner 6);
// consistent across neighboring cells, so shared faces match and the
// triangulation is watertight.
constexpr int kCellCorner[8][3] = {
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
    {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
};
constexpr int kTets[6][4] = {
    {0, 1, 2, 6}, {0, 2, 3, 6}, {0, 3, 7, 6},
    {0, 7, 4, 6}, {0, 4, 5, 6}, {0, 5, 1, 6},
};

struct Builder {
    const ConformalField* F = nullptr;
    const std::vector<double>* u = nullptr;
    double level = 0.0;
    std::unordered_map<std::uint64_t, int> edge_vertex;
    ExtractedSurface surf;

    int vertex_on_edge(std::size_t na, std::size_t nb) {
        if (na > nb) std::swap(na, nb);
        const std::uint64_t key =
            static_cast<std::uint64_t>(na) * (*u).size() + nb;
        const auto it = edge_vertex.find(key);
        if (it != edge_vertex.end()) return it->second;
        const double ua = (*u)[na], ub = (*u)[nb];
        const double s = (level - ua) / (ub - ua);
        const int N = F->N();
        const auto coords = [&](std::size_t id) -> std::array<double, 3> {
            const int i = static_cast<int>(id % N);
            const int j = static_cast<int>((id / N) % N);
            const int k = static_cast<int>(id / (static_cast<std::size_t>(N) * N));
            return F->node(i, j, k);
        };
        const auto a = coords(na), b = coords(nb);
        const int vi = static_cast<int>(surf.vertices.size());
        surf.vertices.push_back({a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]),
                                 a[2] + s * (b[2] - a[2])});
        edge_vertex.emplace(key, vi);
        return vi;
    }

    void emit_tet(const std::size_t n[4]) {
        bool above[4];
        int nabove = 0;
        for (int c = 0; c < 4; ++c) {
            above[c] = (*u)[n[c]] > level;
            nabove += above[c];
        }
        if (nabove == 0 || nabove == 4) return;
        // collect cut edges: those joining an above-corner to a below-corner
        if (nabove == 1 || nabove == 3) {
            const bool lone_above = nabove == 1;
            int lone = -1;
            for (int c = 0; c < 4; ++c)
                if (above[c] == lone_above) lone = c;
            int others[3], no = 0;
            for (int c = 0; c < 4; ++c)
                if (c != lone) others[no++] = c;
            const int v0 = vertex_on_edge(n[lone], n[others[0]]);
            const int v1 = vertex_on_edge(n[lone], n[others[1]]);
            const int v2 = vertex_on_edge(n[lone], n[others[2]]);
            surf.triangles.push_back({v0, v1, v2});
        } else {
            // 2-2 split: quad through four cut edges, fan into two triangles
            int up[2], dn[2], nu = 0, nd = 0;
            for (int c = 0; c < 4; ++c) (above[c] ? up[nu++] : dn[nd++]) = c;
            const int v00 = vertex_on_edge(n[up[0]], n[dn[0]]);
            const int v01 = vertex_on_edge(n[up[0]], n[dn[1]]);
            const int v11 = vertex_on_edge(n[up[1]], n[dn[1]]);
            const int v10 = vertex_on_edge(n[up[1]], n[dn[0]]);
            surf.triangles.push_back({v00, v01, v11});
            surf.triangles.push_back({v00, v11, v10});
        }
    }
};

int euler_characteristic(const ExtractedSurface& s) {
    std::unordered_map<std::uint64_t, int> edges;
    const std::uint64_t nv = s.vertices.size();
    for (const auto& t : s.triangles) {
        const int idx[3] = {t[0], t[1], t[2]};
        for (int e = 0; e < 3; ++e) {
            std::uint64_t a = idx[e], b = idx[(e + 1) % 3];
            if (a > b) std::swap(a, b);
            ++edges[a * nv + b];
        }
    }
    const auto V = static_cast<long>(s.vertices.size());
    const auto E = static_cast<long>(edges.size());
    const auto Fc = static_cast<long>(s.triangles.size());
    return static_cast<int>(V - E + Fc);
}

} // namespace

ExtractedSurface extract_level_surface(const Solution3D& sol, double level,
                                       double grad_floor) {
    const ConformalField& F = sol.field();
    const int N = F.N();
    const auto& u = sol.u();

    // the isosurface may not touch the boundary shell (outer two cells)
    for (int k = 0; k + 1 < N; ++k)
        for (int j = 0; j + 1 < N; ++j)
            for (int i = 0; i + 1 < N; ++i) {
                const bool shell = i < 2 || j < 2 || k < 2 || i >= N - 3 ||
                                   j >= N - 3 || k >= N - 3;
                if (!shell) continue;
                bool lo = false, hi = false;
                for (const auto& c : kCellCorner)
                    ((u[F.idx(i + c[0], j + c[1], k + c[2])] > level) ? hi : lo) = true;
                if (lo && hi)
                    throw DegenerateLevelError(
                        "level surface touches the box boundary");
            }

    Builder bld;
    bld.F = &F;
    bld.u = &u;
    bld.level = level;
    for (int k = 2; k < N - 3; ++k)
        for (int j = 2; j < N - 3; ++j)
            for (int i = 2; i < N - 3; ++i) {
                std::size_t corner[8];
                bool lo = false, hi = false;
                for (int c = 0; c < 8; ++c) {
                    corner[c] = F.idx(i + kCellCorner[c][0], j + kCellCorner[c][1],
                                      k + kCellCorner[c][2]);
                    ((u[corner[c]] > level) ? hi : lo) = true;
                }
                if (!lo || !hi) continue;
                for (const auto& tet : kTets) {
                    const std::size_t n[4] = {corner[tet[0]], corner[tet[1]],
                                              corner[tet[2]], corner[tet[3]]};
                    bld.emit_tet(n);
                }
            }

    ExtractedSurface surf = std::move(bld.surf);
    surf.level = level;
    if (surf.triangles.empty())
        throw DegenerateLevelError("level surface is empty");

    // vertex data
    const MetricModel& model = F.model();
    surf.vert_gradnorm.resize(surf.vertices.size());
    surf.vert_H.resize(surf.vertices.size());
    double min_grad = std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < surf.vertices.size(); ++v) {
        surf.vert_gradnorm[v] = sol.gradnorm_metric(surf.vertices[v]);
        surf.vert_H[v] = sol.mean_curv(surf.vertices[v]);
        min_grad = std::min(min_grad, surf.vert_gradnorm[v]);
    }
    surf.min_gradnorm = min_grad;
    if (min_grad < grad_floor)
        throw DegenerateLevelError("near-critical level: |grad u| below the floor");

    // metric triangle areas: flat area scaled by phi^4 at the centroid
    surf.tri_area.resize(surf.triangles.size());
    for (std::size_t t = 0; t < surf.triangles.size(); ++t) {
        const auto& tri = surf.triangles[t];
        const auto& p0 = surf.vertices[tri[0]];
        const auto& p1 = surf.vertices[tri[1]];
        const auto& p2 = surf.vertices[tri[2]];
        const double e1[3] = {p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]};
        const double e2[3] = {p2[0] - p0[0], p2[1] - p0[1], p2[2] - p0[2]};
        const double cx = e1[1] * e2[2] - e1[2] * e2[1];
        const double cy = e1[2] * e2[0] - e1[0] * e2[2];
        const double cz = e1[0] * e2[1] - e1[1] * e2[0];
        const double flat_area = 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
        const double gx = (p0[0] + p1[0] + p2[0]) / 3.0;
        const double gy = (p0[1] + p1[1] + p2[1]) / 3.0;
        const double gz = (p0[2] + p1[2] + p2[2]) / 3.0;
        const double r = std::sqrt(gx * gx + gy * gy + gz * gz);
        const double phi = model.conformal_factor(r);
        surf.tri_area[t] = flat_area * phi * phi * phi * phi;
    }

    surf.euler_char = euler_characteristic(surf);
    return surf;
}

SurfaceIntegrals surface_integrals(const ExtractedSurface& surf) {
    SurfaceIntegrals out;
    for (std::size_t t = 0; t < surf.triangles.size(); ++t) {
        const auto& tri = surf.triangles[t];
        // midpoint quadrature: centroid value = vertex average
        const double g = (surf.vert_gradnorm[tri[0]] + surf.vert_gradnorm[tri[1]] +
                          surf.vert_gradnorm[tri[2]]) / 3.0;
        const double H = (surf.vert_H[tri[0]] + surf.vert_H[tri[1]] +
                          surf.vert_H[tri[2]]) / 3.0;
        const double dA = surf.tri_area[t];
        out.flux += g * dA;
        out.int_grad2 += g * g * dA;
        out.int_gradH += g * H * dA;
    }
    return out;
}

LevelSetSample eval_F_3d(const Solution3D& sol, double t, double grad_floor) {
    if (!(t > 0.0)) throw std::domain_error("eval_F_3d: need t > 0");
    LevelSetSample s;
    s.t = t;
    s.level = 1.0 - 1.0 / t;
    const ExtractedSurface surf = extract_level_surface(sol, s.level, grad_floor);
    const SurfaceIntegrals I = surface_integrals(surf);
    s.flux = I.flux;
    s.int_grad2 = I.int_grad2;
    s.int_gradH = I.int_gradH;
    s.F_value = kFourPi * t - t * t * I.int_gradH + t * t * t * I.int_grad2;
    s.has_derivative_terms = false;
    return s;
}

MonotonicityReport sweep_3d(const Solution3D& sol, std::span<const double> t_grid,
                            double tol) {
    std::vector<LevelSetSample> samples;
    samples.reserve(t_grid.size());
    for (double t : t_grid) {
        try {
            samples.push_back(eval_F_3d(sol, t));
        } catch (const DegenerateLevelError& e) {
            LevelSetSample s;
            s.t = t;
            s.level = 1.0 - 1.0 / t;
            s.skipped = true;
            s.skip_reason = e.what();
            samples.push_back(s);
        }
    }
    return assemble_report(std::move(samples), tol);
}

} // namespace levelmass
