#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "handles.hpp"

namespace cli {

namespace {

// white -> pale blue -> saturated dark blue, on |entry| / max
void ramp(double t, int& r, int& g, int& b) {
    t = std::clamp(t, 0.0, 1.0);
    const double rs[] = {1.0, 0.87, 0.19, 0.03};
    const double gs[] = {1.0, 0.92, 0.51, 0.19};
    const double bs[] = {1.0, 0.97, 0.74, 0.42};
    const double x = t * 3.0;
    const int i = std::min(2, int(x));
    const double f = x - i;
    r = int(255.0 * (rs[i] + f * (rs[i + 1] - rs[i])));
    g = int(255.0 * (gs[i] + f * (gs[i + 1] - gs[i])));
    b = int(255.0 * (bs[i] + f * (bs[i + 1] - bs[i])));
}

} // namespace

void write_heatmap_svg(const std::string& path, const std::vector<double>& data, int dim,
                       int latent) {
    std::ofstream out(path);
    if (!out.good()) throw CliError("cannot write SVG file: " + path);

    const int cell = dim <= 64 ? 10 : 6;
    const int size = dim * cell;
    double max_abs = 0.0;
    for (double v : data) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) max_abs = 1.0;

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
        << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
    out << "<rect width=\"" << size << "\" height=\"" << size << "\" fill=\"white\"/>\n";

    char buf[160];
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            const double t = std::abs(data[size_t(i) * size_t(dim) + size_t(j)]) / max_abs;
            if (t <= 0.0) continue;
            int r, g, b;
            ramp(t, r, g, b);
            std::snprintf(buf, sizeof(buf),
                          "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"#%02x%02x%02x\"/>\n",
                          j * cell, i * cell, cell, cell, r, g, b);
            out << buf;
        }
    }
    if (latent > 0 && latent < dim) {
        const int pos = latent * cell;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%d\" y1=\"0\" x2=\"%d\" y2=\"%d\" stroke=\"#c02020\" stroke-width=\"1\"/>\n",
                      pos, pos, size);
        out << buf;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"0\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"#c02020\" stroke-width=\"1\"/>\n",
                      pos, size, pos);
        out << buf;
    }
    out << "</svg>\n";
    if (!out.good()) throw CliError("write failed: " + path);
}

} // namespace cli
