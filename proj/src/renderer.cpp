#include "adgve/renderer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>

namespace adgve {

RasterImage::RasterImage(int w, int h, Rgb fill) : width(w), height(h) {
    pixels.resize(size_t(w) * h * 3);
    for (size_t i = 0; i < pixels.size(); i += 3) {
        pixels[i] = fill.r;
        pixels[i + 1] = fill.g;
        pixels[i + 2] = fill.b;
    }
}

Rgb RasterImage::get(int x, int y) const {
    size_t i = (size_t(y) * width + x) * 3;
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
}

void RasterImage::set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    size_t i = (size_t(y) * width + x) * 3;
    pixels[i] = c.r;
    pixels[i + 1] = c.g;
    pixels[i + 2] = c.b;
}

std::string encode_ppm(const RasterImage& img) {
    std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                      "\n255\n";
    out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
    return out;
}

RasterImage decode_ppm(const std::string& bytes) {
    if (bytes.rfind("P6", 0) != 0) throw SchemaError("not a P6 PPM");
    size_t pos = 2;
    auto next_int = [&]() {
        while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
        size_t start = pos;
        while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
        return std::stoi(bytes.substr(start, pos - start));
    };
    int w = next_int(), h = next_int(), maxval = next_int();
    if (maxval != 255) throw SchemaError("PPM maxval must be 255");
    ++pos;  // single whitespace after header
    RasterImage img(w, h);
    if (bytes.size() - pos < img.pixels.size()) throw SchemaError("truncated PPM");
    std::memcpy(img.pixels.data(), bytes.data() + pos, img.pixels.size());
    return img;
}

namespace {

// integer alpha blend, a in [0,255]
Rgb blend(Rgb dst, Rgb src, int a) {
    auto mix = [&](int d, int s) { return std::uint8_t((d * (255 - a) + s * a + 127) / 255); };
    return {mix(dst.r, src.r), mix(dst.g, src.g), mix(dst.b, src.b)};
}

void fill_polygon(RasterImage& img, const std::vector<Pt>& poly, Rgb color, int alpha) {
    Grid g = rasterize_polygon(poly, img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            if (g.at(x, y)) img.set(x, y, blend(img.get(x, y), color, alpha));
}

void draw_line(RasterImage& img, Pt a, Pt b, Rgb color, int alpha) {
    int x0 = int(std::lround(a.x)), y0 = int(std::lround(a.y));
    int x1 = int(std::lround(b.x)), y1 = int(std::lround(b.y));
    int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        if (x0 >= 0 && y0 >= 0 && x0 < img.width && y0 < img.height)
            img.set(x0, y0, alpha >= 255 ? color : blend(img.get(x0, y0), color, alpha));
        if (x0 == x1 && y0 == y1) break;
        int e2 = 2 * err;
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

void draw_rect(RasterImage& img, double x, double y, double w, double h, Rgb color,
               int stroke) {
    int x0 = int(std::lround(x)), y0 = int(std::lround(y));
    int x1 = int(std::lround(x + w)), y1 = int(std::lround(y + h));
    for (int s = 0; s < stroke; ++s) {
        for (int xx = x0 - s; xx <= x1 + s; ++xx) {
            img.set(xx, y0 - s, color);
            img.set(xx, y1 + s, color);
        }
        for (int yy = y0 - s; yy <= y1 + s; ++yy) {
            img.set(x0 - s, yy, color);
            img.set(x1 + s, yy, color);
        }
    }
}

}  // namespace

RasterImage render_schematic(const ScenePriors& priors, int frame) {
    RasterImage img(priors.meta.width, priors.meta.height, {32, 32, 36});
    // road surfaces first, then markings
    for (const auto& m : priors.masks) {
        if (m.cls != MaskClass::ego_lane && m.cls != MaskClass::other_lane) continue;
        if (const MaskFrame* f = m.frame_at(frame))
            fill_polygon(img, f->polygon, {70, 70, 74}, 255);
    }
    for (const auto& m : priors.masks) {
        if (m.cls == MaskClass::ego_lane || m.cls == MaskClass::other_lane) continue;
        if (const MaskFrame* f = m.frame_at(frame)) {
            Rgb c = m.is_crosswalk() ? Rgb{210, 210, 210} : class_color(to_string(m.cls));
            fill_polygon(img, f->polygon, c, 160);
        }
    }
    for (const auto& b : priors.boundaries) {
        if (const BoundaryFrame* f = b.frame_at(frame)) {
            Rgb white{235, 235, 235};
            if (b.style == BoundaryStyle::dashed) {
                // dashes: alternate 6-px segments along the polyline
                for (size_t i = 0; i + 1 < f->polyline.size(); ++i) {
                    Pt a = f->polyline[i], c = f->polyline[i + 1];
                    double len = norm(c - a);
                    int steps = std::max(1, int(len / 6.0));
                    for (int s = 0; s < steps; s += 2) {
                        double t0 = double(s) / steps, t1 = double(s + 1) / steps;
                        draw_line(img, a + t0 * (c - a), a + t1 * (c - a), white, 255);
                    }
                }
            } else {
                for (size_t i = 0; i + 1 < f->polyline.size(); ++i)
                    draw_line(img, f->polyline[i], f->polyline[i + 1], white, 255);
            }
        }
    }
    return img;
}

KeyframeTriplet render_keyframe_triplet(const RasterImage& frame,
                                        const std::vector<const Detection*>& boxes,
                                        const std::vector<const Tracklet*>& box_owners,
                                        const ScenePriors& priors, int frame_index) {
    KeyframeTriplet t;
    t.raw = frame;
    t.boxed = frame;
    for (size_t i = 0; i < boxes.size(); ++i) {
        Rgb c = class_color(to_string(box_owners[i]->cls));
        draw_rect(t.boxed, boxes[i]->x, boxes[i]->y, boxes[i]->w, boxes[i]->h, c, 2);
    }
    t.masked = frame;
    for (const auto& m : priors.masks) {
        if (const MaskFrame* f = m.frame_at(frame_index)) {
            Rgb c = class_color(to_string(m.cls));
            fill_polygon(t.masked, f->polygon, c, 102);  // alpha 0.4
        }
    }
    return t;
}

KeyframeTriplet render_keyframe_triplet(const ScenePriors& priors, int frame) {
    RasterImage bg = render_schematic(priors, frame);
    std::vector<const Detection*> boxes;
    std::vector<const Tracklet*> owners;
    for (const auto& t : priors.tracklets) {
        if (const Detection* d = t.box_at(frame)) {
            boxes.push_back(d);
            owners.push_back(&t);
        }
    }
    return render_keyframe_triplet(bg, boxes, owners, priors, frame);
}

RasterImage crop_roi(const RasterImage& frame, double x, double y, double w, double h,
                     double margin, int target_w, int target_h) {
    if (margin < 0.0) throw GeometryError("margin must be nonnegative");
    if (target_w <= 0 || target_h <= 0) throw GeometryError("target size must be positive");
    double cx = x + w / 2.0, cy = y + h / 2.0;
    double ew = w * (1.0 + 2.0 * margin), eh = h * (1.0 + 2.0 * margin);
    double x0 = std::max(0.0, cx - ew / 2.0);
    double y0 = std::max(0.0, cy - eh / 2.0);
    double x1 = std::min(double(frame.width), cx + ew / 2.0);
    double y1 = std::min(double(frame.height), cy + eh / 2.0);
    if (x1 <= x0 || y1 <= y0) throw GeometryError("clipped ROI is empty");
    double cw = x1 - x0, ch = y1 - y0;

    // one scale factor for both axes preserves the clipped aspect ratio
    double s = std::min(target_w / cw, target_h / ch);
    int out_w = std::max(1, std::min(target_w, int(std::lround(cw * s))));
    int out_h = std::max(1, std::min(target_h, int(std::lround(ch * s))));
    int off_x = (target_w - out_w) / 2;
    int off_y = (target_h - out_h) / 2;

    RasterImage out(target_w, target_h, {0, 0, 0});
    for (int dy = 0; dy < out_h; ++dy) {
        for (int dx = 0; dx < out_w; ++dx) {
            double sx = x0 + (dx + 0.5) / s;
            double sy = y0 + (dy + 0.5) / s;
            int ix = std::clamp(int(std::floor(sx)), 0, frame.width - 1);
            int iy = std::clamp(int(std::floor(sy)), 0, frame.height - 1);
            out.set(off_x + dx, off_y + dy, frame.get(ix, iy));
        }
    }
    return out;
}

ClipPair render_clip_pair(const ScenePriors& priors, const ClipRange& clip, int fade_window) {
    ClipPair pair;
    for (int f = clip.start; f < clip.end; ++f) {
        RasterImage raw = render_schematic(priors, f);
        RasterImage over = raw;
        for (const auto& t : priors.tracklets) {
            Rgb c = class_color(to_string(t.cls));
            // polyline of bottom-centers up to the current frame, opacity
            // fading from 1.0 (current) to 0.2 (oldest visible)
            const Detection* prev = nullptr;
            for (const auto& b : t.boxes) {
                if (b.frame > f) break;
                if (prev) {
                    int age = f - b.frame;
                    if (age < fade_window) {
                        double alpha =
                            fade_window > 1
                                ? 1.0 - 0.8 * double(age) / double(fade_window - 1)
                                : 1.0;
                        draw_line(over, prev->bottom_center(), b.bottom_center(), c,
                                  int(std::lround(alpha * 255)));
                    }
                }
                prev = &b;
            }
            if (t.boxes.size() == 1 && t.boxes.front().frame <= f) {
                Pt p = t.boxes.front().bottom_center();
                over.set(int(std::lround(p.x)), int(std::lround(p.y)), c);  // a dot
            }
        }
        pair.raw.push_back(std::move(raw));
        pair.overlaid.push_back(std::move(over));
    }
    return pair;
}

std::vector<std::vector<int>> sub_clips(const ClipRange& clip) {
    int len = clip.length();
    if (len < 2) throw GeometryError("sub_clips needs a clip of length >= 2");
    std::vector<std::vector<int>> out;
    if (len < 4) {
        std::vector<int> full;
        for (int f = clip.start; f < clip.end; ++f) full.push_back(f);
        out.push_back(std::move(full));
        return out;
    }
    std::vector<int> level1;
    for (int f = clip.start; f < clip.end; f += 2) level1.push_back(f);
    out.push_back(std::move(level1));
    int mid = clip.start + len / 2;
    std::vector<int> first, second;
    for (int f = clip.start; f < mid; ++f) first.push_back(f);
    for (int f = mid; f < clip.end; ++f) second.push_back(f);
    out.push_back(std::move(first));
    out.push_back(std::move(second));
    return out;
}

}  // namespace adgve
