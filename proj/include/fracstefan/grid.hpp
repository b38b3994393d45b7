#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "fracstefan/types.hpp"

namespace fracstefan {

/**
 * Uniform cell-centered Cartesian grid on [-L, L]^d, d in {1, 2}.
 *
 * Nodes sit at cell centers, x_i = -L + (i + 1/2) h with h = 2L/n, so the
 * node set is symmetric about the origin and no node coincides with it.
 * An extension factor c_ext >= 1 defines an evaluation box
 * [-c_ext L, c_ext L]^d used for fields with tails (target measures,
 * stopped mass); extended() returns the matching grid with identical
 * spacing, aligned so base nodes are a subset of extended nodes.
 */
struct GridSpec {
    int dim = 1;
    Real half_width = 4.0;   // L
    int points_per_axis = 512;
    Real ext_factor = 3.0;   // c_ext

    GridSpec() = default;
    GridSpec(int d, Real L, int n, Real c_ext = 1.0)
        : dim(d), half_width(L), points_per_axis(n), ext_factor(c_ext) {
        if (d != 1 && d != 2) throw std::invalid_argument("GridSpec: dim must be 1 or 2");
        if (!(L > 0)) throw std::invalid_argument("GridSpec: half_width must be > 0");
        if (n < 16) throw std::invalid_argument("GridSpec: points_per_axis must be >= 16");
        if (!(c_ext >= 1.0)) throw std::invalid_argument("GridSpec: ext_factor must be >= 1");
    }

    Real spacing() const { return 2.0 * half_width / points_per_axis; }
    Index node_count() const {
        Index n = points_per_axis;
        return dim == 1 ? n : n * n;
    }
    Real cell_volume() const { return dim == 1 ? spacing() : spacing() * spacing(); }

    Real axis_coord(Index i) const { return -half_width + (Real(i) + 0.5) * spacing(); }

    // Flattened index <-> per-axis indices (row-major: flat = ix * n + iy).
    std::array<Index, 2> unflatten(Index flat) const {
        if (dim == 1) return {flat, 0};
        Index n = points_per_axis;
        return {flat / n, flat % n};
    }
    Index flatten(Index ix, Index iy) const {
        return dim == 1 ? ix : ix * points_per_axis + iy;
    }

    std::array<Real, 2> coord(Index flat) const {
        auto ij = unflatten(flat);
        if (dim == 1) return {axis_coord(ij[0]), 0.0};
        return {axis_coord(ij[0]), axis_coord(ij[1])};
    }

    // Extra cells per side so the extended box is at least c_ext * L wide.
    Index ext_cells_per_side() const {
        Real extra = (ext_factor - 1.0) * half_width / spacing();
        return static_cast<Index>(std::lround(extra));
    }

    // Grid for the evaluation box: same spacing, base nodes embedded.
    GridSpec extended() const {
        Index m = ext_cells_per_side();
        GridSpec g;
        g.dim = dim;
        g.points_per_axis = points_per_axis + 2 * static_cast<int>(m);
        g.half_width = half_width + Real(m) * spacing();
        g.ext_factor = 1.0;
        return g;
    }

    bool same_nodes(const GridSpec& o) const {
        return dim == o.dim && points_per_axis == o.points_per_axis &&
               std::abs(half_width - o.half_width) <= 1e-12 * half_width;
    }

    // Nearest node to a point; returns -1 if outside the box.
    Index locate(Real x, Real y = 0.0) const {
        Real h = spacing();
        auto axis = [&](Real v) -> Index {
            if (v < -half_width || v >= half_width) return -1;
            Index i = static_cast<Index>(std::floor((v + half_width) / h));
            if (i < 0) i = 0;
            if (i >= points_per_axis) i = points_per_axis - 1;
            return i;
        };
        Index ix = axis(x);
        if (ix < 0) return -1;
        if (dim == 1) return ix;
        Index iy = axis(y);
        if (iy < 0) return -1;
        return flatten(ix, iy);
    }
};

/// Spatial function sampled on grid nodes; implicitly 0 outside the box.
struct SpaceField {
    GridSpec grid;
    ArrayXr values;

    SpaceField() = default;
    explicit SpaceField(const GridSpec& g) : grid(g), values(ArrayXr::Zero(g.node_count())) {}
    SpaceField(const GridSpec& g, ArrayXr v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.node_count())
            throw std::invalid_argument("SpaceField: value count does not match grid");
    }
};

/// Nonnegative SpaceField with finite mass (sum * h^d).
struct DensityField {
    SpaceField field;

    DensityField() = default;
    explicit DensityField(SpaceField f) : field(std::move(f)) {
        if ((field.values < 0).any())
            throw std::invalid_argument("DensityField: negative values");
        if (!field.values.allFinite())
            throw std::invalid_argument("DensityField: non-finite values");
    }
    Real mass() const { return field.values.sum() * field.grid.cell_volume(); }
};

/// Time-indexed stack of spatial fields on a uniform time grid t_k = t0 + k dt.
struct SpaceTimeField {
    GridSpec grid;
    Real t0 = 0.0;
    Real dt = 0.0;
    std::vector<ArrayXr> slices;

    SpaceTimeField() = default;
    SpaceTimeField(const GridSpec& g, Real dt_, Index n_slices, Real t0_ = 0.0)
        : grid(g), t0(t0_), dt(dt_) {
        if (!(dt_ > 0)) throw std::invalid_argument("SpaceTimeField: dt must be > 0");
        slices.assign(n_slices, ArrayXr::Zero(g.node_count()));
    }
    Index steps() const { return static_cast<Index>(slices.size()); }
    Real time(Index k) const { return t0 + Real(k) * dt; }
    ArrayXr& operator[](Index k) { return slices[static_cast<size_t>(k)]; }
    const ArrayXr& operator[](Index k) const { return slices[static_cast<size_t>(k)]; }
};

/// Riemann-sum integral: sum(values) * h^d.
Real integrate(const SpaceField& f);
Real integrate(const GridSpec& g, const ArrayXr& values);

/// L1 distance between two fields on the same grid.
Real l1_distance(const SpaceField& a, const SpaceField& b);
Real l1_distance(const GridSpec& g, const ArrayXr& a, const ArrayXr& b);

/// Default positivity tolerance: 1e-8 * max(field max, 1).
Real default_positive_tol(const ArrayXr& values);

/// Mask of nodes with value > tol.
Mask positive_set(const SpaceField& f, Real tol);
Mask positive_set(const ArrayXr& values, Real tol);

/// Discrete total variation (d=1 only), counting jumps to 0 at both ends.
Real total_variation_1d(const SpaceField& f);

/// Zero-pad a base-grid array onto the extended grid (base nodes embedded).
ArrayXr embed_in_extended(const GridSpec& base, const GridSpec& ext, const ArrayXr& v);

/// Restrict an extended-grid array to the base grid.
ArrayXr restrict_to_base(const GridSpec& base, const GridSpec& ext, const ArrayXr& v);

}  // namespace fracstefan
