#include "ganbench/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>

#include "ganbench/errors.hpp"
#include "ganbench/png_io.hpp"

namespace ganbench::plot {

namespace {

// 5x7 bitmap glyphs, one byte per row, low 5 bits used (MSB = leftmost column).
struct Glyph {
    char ch;
    unsigned char rows[7];
};

constexpr Glyph kGlyphs[] = {
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
    {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
    {'+', {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00}},
    {'e', {0x00, 0x00, 0x0E, 0x11, 0x1F, 0x10, 0x0E}},
    {'a', {0x00, 0x00, 0x0E, 0x01, 0x0F, 0x11, 0x0F}},
    {'b', {0x10, 0x10, 0x16, 0x19, 0x11, 0x11, 0x1E}},
    {'c', {0x00, 0x00, 0x0E, 0x10, 0x10, 0x11, 0x0E}},
    {'d', {0x01, 0x01, 0x0D, 0x13, 0x11, 0x11, 0x0F}},
    {'f', {0x06, 0x09, 0x08, 0x1C, 0x08, 0x08, 0x08}},
    {'g', {0x00, 0x0F, 0x11, 0x11, 0x0F, 0x01, 0x0E}},
    {'h', {0x10, 0x10, 0x16, 0x19, 0x11, 0x11, 0x11}},
    {'i', {0x04, 0x00, 0x0C, 0x04, 0x04, 0x04, 0x0E}},
    {'l', {0x0C, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'m', {0x00, 0x00, 0x1A, 0x15, 0x15, 0x15, 0x15}},
    {'n', {0x00, 0x00, 0x16, 0x19, 0x11, 0x11, 0x11}},
    {'o', {0x00, 0x00, 0x0E, 0x11, 0x11, 0x11, 0x0E}},
    {'p', {0x00, 0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10}},
    {'r', {0x00, 0x00, 0x16, 0x19, 0x10, 0x10, 0x10}},
    {'s', {0x00, 0x00, 0x0F, 0x10, 0x0E, 0x01, 0x1E}},
    {'t', {0x08, 0x08, 0x1C, 0x08, 0x08, 0x09, 0x06}},
    {'u', {0x00, 0x00, 0x11, 0x11, 0x11, 0x13, 0x0D}},
    {'v', {0x00, 0x00, 0x11, 0x11, 0x11, 0x0A, 0x04}},
    {'w', {0x00, 0x00, 0x11, 0x11, 0x15, 0x15, 0x0A}},
    {'x', {0x00, 0x00, 0x11, 0x0A, 0x04, 0x0A, 0x11}},
    {'y', {0x00, 0x11, 0x11, 0x0F, 0x01, 0x11, 0x0E}},
    {'_', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1F}},
    {' ', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}},
};

const Glyph* find_glyph(char c) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (const auto& g : kGlyphs)
        if (g.ch == c) return &g;
    return nullptr;
}

class Canvas {
   public:
    Canvas(int w, int h) : img_{w, h, std::vector<unsigned char>(static_cast<size_t>(w) * h * 3, 255)} {}

    void set(int x, int y, unsigned char r, unsigned char g, unsigned char b) {
        if (x < 0 || y < 0 || x >= img_.width || y >= img_.height) return;
        auto* p = &img_.pixels[(static_cast<size_t>(y) * img_.width + x) * 3];
        p[0] = r;
        p[1] = g;
        p[2] = b;
    }

    void line(int x0, int y0, int x1, int y1, unsigned char r, unsigned char g, unsigned char b) {
        const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
        const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
        int err = dx + dy;
        while (true) {
            set(x0, y0, r, g, b);
            if (x0 == x1 && y0 == y1) break;
            const int e2 = 2 * err;
            if (e2 >= dy) {
                err += dy;
                x0 += sx;
            }
            if (e2 <= dx) {
                err += dx;
                y0 += sy;
            }
        }
    }

    void thick_line(int x0, int y0, int x1, int y1, unsigned char r, unsigned char g,
                    unsigned char b) {
        line(x0, y0, x1, y1, r, g, b);
        line(x0, y0 + 1, x1, y1 + 1, r, g, b);
        line(x0 + 1, y0, x1 + 1, y1, r, g, b);
    }

    void text(int x, int y, const std::string& s, unsigned char r = 0, unsigned char g = 0,
              unsigned char b = 0) {
        for (char c : s) {
            if (const Glyph* gl = find_glyph(c)) {
                for (int row = 0; row < 7; ++row)
                    for (int col = 0; col < 5; ++col)
                        if (gl->rows[row] & (0x10 >> col)) set(x + col, y + row, r, g, b);
            }
            x += 6;
        }
    }

    const png::Rgb8& image() const { return img_; }

   private:
    png::Rgb8 img_;
};

std::string format_tick(double v) {
    char buf[32];
    const double a = std::abs(v);
    if (v == 0.0) return "0";
    if (a >= 1000.0 || a < 0.01) std::snprintf(buf, sizeof(buf), "%.1e", v);
    else if (a >= 10.0) std::snprintf(buf, sizeof(buf), "%.0f", v);
    else std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

void write_line_chart(const std::filesystem::path& path, const std::vector<Series>& series,
                      const ChartOptions& options) {
    if (series.empty()) throw EmptyInput("line chart requires at least one series");

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size())
            throw SizeMismatch("series '" + s.label + "' has mismatched x/y lengths");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (!std::isfinite(xmin)) {
        xmin = 0;
        xmax = 1;
        ymin = 0;
        ymax = 1;
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) {
        ymax = ymin + 0.5;
        ymin -= 0.5;
    }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    Canvas canvas(options.width, options.height);
    const int left = 70, right = options.width - 20, top = 40, bottom = options.height - 50;

    auto px = [&](double x) {
        return left + static_cast<int>(std::lround((x - xmin) / (xmax - xmin) * (right - left)));
    };
    auto py = [&](double y) {
        return bottom - static_cast<int>(std::lround((y - ymin) / (ymax - ymin) * (bottom - top)));
    };

    // axes and grid
    for (int i = 0; i <= 5; ++i) {
        const double yv = ymin + (ymax - ymin) * i / 5.0;
        const int yp = py(yv);
        for (int x = left; x <= right; x += 3) canvas.set(x, yp, 220, 220, 220);
        canvas.text(6, yp - 3, format_tick(yv));
        const double xv = xmin + (xmax - xmin) * i / 5.0;
        const int xp = px(xv);
        for (int y = top; y <= bottom; y += 3) canvas.set(xp, y, 220, 220, 220);
        canvas.text(xp - 10, bottom + 8, format_tick(xv));
    }
    canvas.line(left, top, left, bottom, 0, 0, 0);
    canvas.line(left, bottom, right, bottom, 0, 0, 0);
    canvas.text(left, 12, options.title);
    canvas.text((left + right) / 2 - 3 * static_cast<int>(options.x_label.size()),
                options.height - 14, options.x_label);
    canvas.text(6, top - 20, options.y_label);

    for (const auto& s : series) {
        bool have_prev = false;
        int px0 = 0, py0 = 0;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                have_prev = false;
                continue;
            }
            const int x = px(s.x[i]), y = py(s.y[i]);
            if (have_prev) canvas.thick_line(px0, py0, x, y, s.r, s.g, s.b);
            else canvas.set(x, y, s.r, s.g, s.b);
            px0 = x;
            py0 = y;
            have_prev = true;
        }
    }

    // legend in the top-right corner
    int ly = top + 6;
    for (const auto& s : series) {
        const int lx = right - 150;
        canvas.line(lx, ly + 3, lx + 18, ly + 3, s.r, s.g, s.b);
        canvas.line(lx, ly + 4, lx + 18, ly + 4, s.r, s.g, s.b);
        canvas.text(lx + 24, ly, s.label);
        ly += 12;
    }

    png::write_rgb8(path, canvas.image());
}

}  // namespace ganbench::plot
