#pragma once

#include <filesystem>
#include <string>

#include "fracdecomp/grid.hpp"

namespace fracdecomp {

/// Format a double with 17 significant digits (round-trips bit-exactly).
std::string format_double(double v);

/// CSV with header `x[,y],value`, row-major over grid nodes.
void write_function_csv(const SampledFunction& f,
                        const std::filesystem::path& csv_path);

/// JSON descriptor {domain, grid, data-file} next to the CSV.
void write_function(const SampledFunction& f,
                    const std::filesystem::path& json_path);

SampledFunction read_function(const std::filesystem::path& json_path);

/// CSV with header `x[,y],t,c0..cn` plus a JSON descriptor.
void write_field(const HalfSpaceField& field,
                 const std::filesystem::path& json_path);

HalfSpaceField read_field(const std::filesystem::path& json_path);

}  // namespace fracdecomp
