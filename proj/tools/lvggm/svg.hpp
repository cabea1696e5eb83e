#pragma once

#include <string>
#include <vector>

namespace cli {

/// Standalone SVG heatmap of |entries|, normalized to the largest magnitude
/// in the matrix. `latent` > 0 draws separator lines after that many leading
/// rows/columns.
void write_heatmap_svg(const std::string& path, const std::vector<double>& data_rowmajor, int dim,
                       int latent);

} // namespace cli
