#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace pnl {

enum class Boundary { Dirichlet, Periodic };

/// Axis-aligned box domain sampled on a uniform tensor grid.
///
/// Periodic axes carry `cells` nodes at x_i = i*h (the node x = extent is
/// identified with x = 0). Dirichlet axes carry `cells + 1` nodes at
/// x_i = i*h so that the boundary nodes lie exactly on the domain edge.
class GridSpec {
public:
    GridSpec(std::vector<double> extent, std::vector<long> cells, Boundary boundary)
        : extent_(std::move(extent)), cells_(std::move(cells)), boundary_(boundary) {
        if (extent_.empty() || extent_.size() != cells_.size())
            throw std::invalid_argument("GridSpec: extent/cells dimension mismatch");
        for (std::size_t d = 0; d < cells_.size(); ++d) {
            if (cells_[d] < 4)
                throw std::invalid_argument("GridSpec: need at least 4 cells per axis");
            if (!(extent_[d] > 0.0))
                throw std::invalid_argument("GridSpec: extent must be positive");
        }
        spacing_.resize(dim());
        nodes_.resize(dim());
        for (int d = 0; d < dim(); ++d) {
            spacing_[d] = extent_[d] / static_cast<double>(cells_[d]);
            nodes_[d] = boundary_ == Boundary::Periodic ? cells_[d] : cells_[d] + 1;
        }
        strides_.assign(dim(), 1);
        for (int d = dim() - 2; d >= 0; --d) strides_[d] = strides_[d + 1] * nodes_[d + 1];
        total_nodes_ = strides_[0] * nodes_[0];
    }

    static GridSpec unit_square(long cells_per_axis, Boundary boundary) {
        return GridSpec({1.0, 1.0}, {cells_per_axis, cells_per_axis}, boundary);
    }

    int dim() const { return static_cast<int>(cells_.size()); }
    Boundary boundary() const { return boundary_; }
    const std::vector<double>& extent() const { return extent_; }
    const std::vector<long>& cells() const { return cells_; }
    const std::vector<double>& spacing() const { return spacing_; }
    const std::vector<long>& nodes() const { return nodes_; }
    long node_count() const { return total_nodes_; }
    double spacing_min() const {
        double h = spacing_[0];
        for (double s : spacing_) h = std::min(h, s);
        return h;
    }
    /// Volume of one full grid cell.
    double cell_volume() const {
        double v = 1.0;
        for (double s : spacing_) v *= s;
        return v;
    }

    long index(const std::vector<long>& idx) const {
        long p = 0;
        for (int d = 0; d < dim(); ++d) p += idx[d] * strides_[d];
        return p;
    }
    void unravel(long p, std::vector<long>& idx) const {
        idx.resize(dim());
        for (int d = 0; d < dim(); ++d) {
            idx[d] = p / strides_[d];
            p -= idx[d] * strides_[d];
        }
    }
    void coords(const std::vector<long>& idx, std::vector<double>& x) const {
        x.resize(dim());
        for (int d = 0; d < dim(); ++d) x[d] = idx[d] * spacing_[d];
    }

    /// Quadrature weight of a node: product of per-axis cell sizes, with the
    /// two boundary cells halved on Dirichlet axes so that constants integrate
    /// to the exact domain measure.
    double node_weight(const std::vector<long>& idx) const {
        double w = 1.0;
        for (int d = 0; d < dim(); ++d) {
            double hd = spacing_[d];
            if (boundary_ == Boundary::Dirichlet && (idx[d] == 0 || idx[d] == nodes_[d] - 1))
                hd *= 0.5;
            w *= hd;
        }
        return w;
    }

    bool is_boundary_node(const std::vector<long>& idx) const {
        if (boundary_ == Boundary::Periodic) return false;
        for (int d = 0; d < dim(); ++d)
            if (idx[d] == 0 || idx[d] == nodes_[d] - 1) return true;
        return false;
    }

    /// Neighbour of `p` shifted by `steps` nodes along axis k. Periodic axes
    /// wrap; on Dirichlet axes the caller must keep the shift in range.
    long shifted(long p, int k, long steps) const {
        long ik = (p / strides_[k]) % nodes_[k];
        long jk = ik + steps;
        if (boundary_ == Boundary::Periodic) {
            jk %= nodes_[k];
            if (jk < 0) jk += nodes_[k];
        }
        return p + (jk - ik) * strides_[k];
    }
    long axis_index(long p, int k) const { return (p / strides_[k]) % nodes_[k]; }

    bool same_shape(const GridSpec& o) const {
        return boundary_ == o.boundary_ && cells_ == o.cells_ && extent_ == o.extent_;
    }

private:
    std::vector<double> extent_;
    std::vector<long> cells_;
    Boundary boundary_;
    std::vector<double> spacing_;
    std::vector<long> nodes_;
    std::vector<long> strides_;
    long total_nodes_ = 0;
};

/// Per-axis half-open node index ranges; used to restrict norms and
/// difference-quotient outputs to interior windows.
struct Region {
    std::vector<long> lo, hi;

    static Region all(const GridSpec& g) {
        Region r;
        r.lo.assign(g.dim(), 0);
        r.hi = g.nodes();
        return r;
    }
    /// Shrink by `frac` of the node count on each side of every axis.
    static Region interior(const GridSpec& g, double frac) {
        Region r = all(g);
        for (int d = 0; d < g.dim(); ++d) {
            long m = static_cast<long>(frac * g.nodes()[d]);
            r.lo[d] += m;
            r.hi[d] -= m;
            if (r.lo[d] >= r.hi[d]) throw std::invalid_argument("Region: margin too large");
        }
        return r;
    }
    bool contains(const std::vector<long>& idx) const {
        for (std::size_t d = 0; d < lo.size(); ++d)
            if (idx[d] < lo[d] || idx[d] >= hi[d]) return false;
        return true;
    }
    bool valid_for(const GridSpec& g) const {
        if (static_cast<int>(lo.size()) != g.dim()) return false;
        for (int d = 0; d < g.dim(); ++d)
            if (lo[d] < 0 || hi[d] > g.nodes()[d] || lo[d] >= hi[d]) return false;
        return true;
    }
};

}  // namespace pnl
