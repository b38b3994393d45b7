#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fracstefan/grid.hpp"

namespace fracstefan {

/// One row per node: "x[,y],value". Header "x[,y],value".
void write_field_csv(const std::filesystem::path& path, const SpaceField& f);

/// Barrier export: "x[,y],s" with "inf" for unbounded stopping times.
void write_barrier_csv(const std::filesystem::path& path, const GridSpec& grid,
                       const ArrayXr& stop_time);

/**
 * Space-time export: one CSV per selected slice index plus an index file
 * "<stem>_index.csv" with rows "k,time,file".
 */
void write_spacetime_csv(const std::filesystem::path& dir, const std::string& stem,
                         const SpaceTimeField& f, const std::vector<Index>& slice_indices);

}  // namespace fracstefan
