#include "fracstefan/grid.hpp"

#include <cmath>

namespace fracstefan {

Real integrate(const GridSpec& g, const ArrayXr& values) {
    return values.sum() * g.cell_volume();
}

Real integrate(const SpaceField& f) { return integrate(f.grid, f.values); }

Real l1_distance(const GridSpec& g, const ArrayXr& a, const ArrayXr& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("l1_distance: size mismatch");
    return (a - b).abs().sum() * g.cell_volume();
}

Real l1_distance(const SpaceField& a, const SpaceField& b) {
    if (!a.grid.same_nodes(b.grid))
        throw std::invalid_argument("l1_distance: grid mismatch");
    return l1_distance(a.grid, a.values, b.values);
}

Real default_positive_tol(const ArrayXr& values) {
    Real m = values.size() ? values.maxCoeff() : 0.0;
    return 1e-8 * std::max(m, 1.0);
}

Mask positive_set(const ArrayXr& values, Real tol) {
    if (tol < 0) throw std::invalid_argument("positive_set: tol must be >= 0");
    return values > tol;
}

Mask positive_set(const SpaceField& f, Real tol) { return positive_set(f.values, tol); }

Real total_variation_1d(const SpaceField& f) {
    if (f.grid.dim != 1)
        throw std::invalid_argument("total_variation_1d: d=1 only");
    const ArrayXr& v = f.values;
    Real tv = std::abs(v[0]) + std::abs(v[v.size() - 1]);
    for (Index i = 0; i + 1 < v.size(); ++i) tv += std::abs(v[i + 1] - v[i]);
    return tv;
}

ArrayXr embed_in_extended(const GridSpec& base, const GridSpec& ext, const ArrayXr& v) {
    if (v.size() != base.node_count())
        throw std::invalid_argument("embed_in_extended: size mismatch");
    Index off = (ext.points_per_axis - base.points_per_axis) / 2;
    ArrayXr out = ArrayXr::Zero(ext.node_count());
    if (base.dim == 1) {
        out.segment(off, base.points_per_axis) = v;
    } else {
        Index n = base.points_per_axis;
        for (Index ix = 0; ix < n; ++ix)
            for (Index iy = 0; iy < n; ++iy)
                out[ext.flatten(ix + off, iy + off)] = v[base.flatten(ix, iy)];
    }
    return out;
}

ArrayXr restrict_to_base(const GridSpec& base, const GridSpec& ext, const ArrayXr& v) {
    if (v.size() != ext.node_count())
        throw std::invalid_argument("restrict_to_base: size mismatch");
    Index off = (ext.points_per_axis - base.points_per_axis) / 2;
    ArrayXr out(base.node_count());
    if (base.dim == 1) {
        out = v.segment(off, base.points_per_axis);
    } else {
        Index n = base.points_per_axis;
        for (Index ix = 0; ix < n; ++ix)
            for (Index iy = 0; iy < n; ++iy)
                out[base.flatten(ix, iy)] = v[ext.flatten(ix + off, iy + off)];
    }
    return out;
}

}  // namespace fracstefan
