#pragma once

#include <string>
#include <vector>

#include "cfarey/farey.hpp"

namespace cfarey {

/// Minimal SVG emission: the four plot kinds the CLI needs. No dependencies,
/// deterministic output. metaComment is embedded as an XML comment.
namespace svg {

/// Scatter of a FareySet over the fundamental parallelogram, points coloured
/// by height (blue = low, red = high).
void scatter(const std::string& path, const FareySet& set, const std::string& title,
             const std::string& metaComment);

/// Bar plot of a density histogram.
void histogram(const std::string& path, const std::vector<double>& edges,
               const std::vector<double>& density, const std::string& title,
               const std::string& xLabel, const std::string& metaComment);

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::string color; // css color
};

/// Line overlay with axes and tick labels.
void lines(const std::string& path, const std::vector<Series>& series,
           const std::string& title, const std::string& xLabel, const std::string& yLabel,
           const std::string& metaComment);

} // namespace svg

} // namespace cfarey
