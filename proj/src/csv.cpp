#include "fracstefan/csv.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace fracstefan {

namespace {

struct File {
    std::FILE* f;
    explicit File(const std::filesystem::path& p) : f(std::fopen(p.c_str(), "w")) {
        if (!f) throw std::runtime_error("cannot open " + p.string());
    }
    ~File() {
        if (f) std::fclose(f);
    }
};

void write_rows(std::FILE* f, const GridSpec& g, const ArrayXr& v, bool inf_sentinel) {
    char num[64];
    for (Index i = 0; i < g.node_count(); ++i) {
        auto p = g.coord(i);
        if (g.dim == 1)
            std::fprintf(f, "%.17g,", p[0]);
        else
            std::fprintf(f, "%.17g,%.17g,", p[0], p[1]);
        if (inf_sentinel && std::isinf(v[i])) {
            std::fprintf(f, "inf\n");
        } else {
            std::snprintf(num, sizeof num, "%.17g", v[i]);
            std::fprintf(f, "%s\n", num);
        }
    }
}

}  // namespace

void write_field_csv(const std::filesystem::path& path, const SpaceField& f) {
    File out(path);
    std::fprintf(out.f, f.grid.dim == 1 ? "x,value\n" : "x,y,value\n");
    write_rows(out.f, f.grid, f.values, false);
}

void write_barrier_csv(const std::filesystem::path& path, const GridSpec& grid,
                       const ArrayXr& stop_time) {
    File out(path);
    std::fprintf(out.f, grid.dim == 1 ? "x,s\n" : "x,y,s\n");
    write_rows(out.f, grid, stop_time, true);
}

void write_spacetime_csv(const std::filesystem::path& dir, const std::string& stem,
                         const SpaceTimeField& f, const std::vector<Index>& slice_indices) {
    File index(dir / (stem + "_index.csv"));
    std::fprintf(index.f, "k,time,file\n");
    for (Index k : slice_indices) {
        if (k < 0 || k >= f.steps()) continue;
        std::string name = stem + "_t" + std::to_string(k) + ".csv";
        write_field_csv(dir / name, SpaceField(f.grid, f[k]));
        std::fprintf(index.f, "%lld,%.17g,%s\n", static_cast<long long>(k), f.time(k),
                     name.c_str());
    }
}

}  // namespace fracstefan
