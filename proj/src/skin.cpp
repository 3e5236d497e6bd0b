#include "pointvec/skin.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "pointvec/error.hpp"

namespace pv {

SkinHistogram::SkinHistogram(int hb, int sb) : h_bins(hb), s_bins(sb) {
    if (hb < 1 || sb < 1) throw InvalidArgument("histogram needs at least one bin per axis");
    counts.assign(static_cast<std::size_t>(hb) * sb, 0);
}

BinIndex color_bin(Rgb px, const SkinParams& p) {
    int hb, sb;
    if (p.histogram_mode == HistogramMode::hs) {
        const Hsv hsv = rgb_to_hsv(px);
        hb = static_cast<int>(hsv.h / (360.0 / p.h_bins));
        sb = static_cast<int>(hsv.s * p.s_bins);
    } else {
        const NormRgb nr = rgb_to_normalized_rgb(px);
        hb = static_cast<int>(nr.r * p.h_bins);
        sb = static_cast<int>(nr.g * p.s_bins);
    }
    hb = std::clamp(hb, 0, p.h_bins - 1);
    sb = std::clamp(sb, 0, p.s_bins - 1);
    return {hb, sb};
}

Rect forehead_from_face(const Rect& face) {
    if (face.w < 3 || face.h < 10) {
        throw InvalidArgument("face rectangle too small to hold a forehead region");
    }
    return {face.x + face.w / 3, face.y + face.h / 10, face.w / 3, face.h / 5};
}

SkinHistogram uniform_histogram(const SkinParams& p) {
    SkinHistogram h(p.h_bins, p.s_bins);
    std::fill(h.counts.begin(), h.counts.end(), 1);
    h.total = static_cast<std::int64_t>(h.counts.size());
    return h;
}

std::int64_t add_histogram_samples(SkinHistogram& h, const Frame& f, const Rect& roi,
                                   const BinaryMask* mask, const SkinParams& p) {
    if (h.h_bins != p.h_bins || h.s_bins != p.s_bins) {
        throw DimensionMismatch("histogram shape does not match the parameters");
    }
    if (roi.w < 1 || roi.h < 1 || roi.x < 0 || roi.y < 0 || roi.x + roi.w > f.width ||
        roi.y + roi.h > f.height) {
        throw InvalidArgument("histogram ROI is empty or leaves the frame");
    }
    if (mask != nullptr && (mask->width != f.width || mask->height != f.height)) {
        throw DimensionMismatch("mask does not match frame dimensions");
    }
    std::int64_t counted = 0;
    for (int y = roi.y; y < roi.y + roi.h; ++y) {
        for (int x = roi.x; x < roi.x + roi.w; ++x) {
            if (mask != nullptr && !mask->at(x, y)) continue;
            const BinIndex b = color_bin(f.at(x, y), p);
            h.at(b.h, b.s) += 1;
            ++counted;
        }
    }
    h.total += counted;
    return counted;
}

SkinHistogram build_histogram(const Frame& f, const Rect& roi, const BinaryMask* mask,
                              const SkinParams& p) {
    SkinHistogram h(p.h_bins, p.s_bins);
    if (add_histogram_samples(h, f, roi, mask, p) == 0) {
        throw InvalidArgument("no pixels counted while building a histogram");
    }
    return h;
}

double skin_posterior(const SkinHistogram& hs, const SkinHistogram& hn, int hbin, int sbin) {
    if (hs.h_bins != hn.h_bins || hs.s_bins != hn.s_bins) {
        throw DimensionMismatch("skin and non-skin histograms have different shapes");
    }
    if (hs.total <= 0 || hn.total <= 0) {
        throw InvalidArgument("skin_posterior needs trained (nonzero-total) histograms");
    }
    if (hbin < 0 || hbin >= hs.h_bins || sbin < 0 || sbin >= hs.s_bins) {
        throw InvalidArgument("histogram bin index out of range");
    }
    const double ts = static_cast<double>(hs.total);
    const double tn = static_cast<double>(hn.total);
    const double like_s = static_cast<double>(hs.at(hbin, sbin)) / ts;
    const double like_n = static_cast<double>(hn.at(hbin, sbin)) / tn;
    const double prior_s = ts / (ts + tn);
    const double prior_n = tn / (ts + tn);
    const double denom = like_s * prior_s + like_n * prior_n;
    if (denom == 0.0) return 0.0;
    return like_s * prior_s / denom;
}

GrayFrame backproject(const Frame& f, const BinaryMask& fg, const SkinHistogram& hs,
                      const SkinHistogram& hn, const SkinParams& p) {
    if (fg.width != f.width || fg.height != f.height) {
        throw DimensionMismatch("foreground mask does not match frame dimensions");
    }
    if (hs.total <= 0 || hn.total <= 0) {
        throw InvalidArgument("backproject needs trained histograms");
    }
    // One lookup per bin instead of per pixel.
    std::vector<double> table(hs.counts.size());
    for (int hb = 0; hb < hs.h_bins; ++hb) {
        for (int sb = 0; sb < hs.s_bins; ++sb) {
            table[static_cast<std::size_t>(hb) * hs.s_bins + sb] = skin_posterior(hs, hn, hb, sb);
        }
    }
    GrayFrame out(f.width, f.height);
    const std::size_t n = static_cast<std::size_t>(f.width) * f.height;
    for (std::size_t i = 0; i < n; ++i) {
        if (fg.bits[i] == 0) continue;
        const std::size_t o = i * 3;
        const BinIndex b = color_bin({f.pixels[o], f.pixels[o + 1], f.pixels[o + 2]}, p);
        out.values[i] = table[static_cast<std::size_t>(b.h) * hs.s_bins + b.s];
    }
    return out;
}

BinaryMask binarize(const GrayFrame& prob, double theta) {
    if (theta < 0.0 || theta > 1.0) throw InvalidArgument("theta must lie in [0,1]");
    BinaryMask out(prob.width, prob.height);
    for (std::size_t i = 0; i < prob.values.size(); ++i) {
        out.bits[i] = prob.values[i] > theta ? 1 : 0;
    }
    return out;
}

namespace {

int find_root(std::vector<int>& parent, int i) {
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];  // path halving
        i = parent[i];
    }
    return i;
}

void unite(std::vector<int>& parent, int a, int b) {
    const int ra = find_root(parent, a);
    const int rb = find_root(parent, b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
}

}  // namespace

std::vector<Blob> connected_components(const BinaryMask& m) {
    if (m.empty()) return {};
    const int w = m.width;
    const int h = m.height;
    std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
    std::vector<int> parent;

    // First pass: provisional labels, merging across the four already-seen
    // 8-neighbors (W, NW, N, NE).
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (m.bits[i] == 0) continue;
            int best = -1;
            const int nx[4] = {x - 1, x - 1, x, x + 1};
            const int ny[4] = {y, y - 1, y - 1, y - 1};
            int neigh[4];
            int nn = 0;
            for (int k = 0; k < 4; ++k) {
                if (nx[k] < 0 || nx[k] >= w || ny[k] < 0) continue;
                const int l = label[static_cast<std::size_t>(ny[k]) * w + nx[k]];
                if (l >= 0) {
                    neigh[nn++] = l;
                    if (best < 0 || l < best) best = l;
                }
            }
            if (best < 0) {
                best = static_cast<int>(parent.size());
                parent.push_back(best);
            } else {
                for (int k = 0; k < nn; ++k) unite(parent, best, neigh[k]);
            }
            label[i] = best;
        }
    }

    // Second pass: resolve roots and relabel 1..k in scan order of first use.
    std::vector<int> compact(parent.size(), 0);
    std::vector<Blob> blobs;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (label[i] < 0) continue;
            const int root = find_root(parent, label[i]);
            if (compact[root] == 0) {
                compact[root] = static_cast<int>(blobs.size()) + 1;
                Blob b;
                b.label = compact[root];
                b.bbox = {x, y, 1, 1};
                blobs.push_back(std::move(b));
            }
            Blob& b = blobs[compact[root] - 1];
            b.pixels.push_back({x, y});
            const int x0 = std::min(b.bbox.x, x);
            const int y0 = std::min(b.bbox.y, y);
            const int x1 = std::max(b.bbox.x + b.bbox.w, x + 1);
            const int y1 = std::max(b.bbox.y + b.bbox.h, y + 1);
            b.bbox = {x0, y0, x1 - x0, y1 - y0};
        }
    }
    for (Blob& b : blobs) b.area = static_cast<std::int64_t>(b.pixels.size());
    std::stable_sort(blobs.begin(), blobs.end(),
                     [](const Blob& a, const Blob& b) { return a.area > b.area; });
    return blobs;
}

std::string histogram_text(const SkinHistogram& h) {
    std::ostringstream out;
    out << h.h_bins << ' ' << h.s_bins << ' ' << h.total << '\n';
    for (int hb = 0; hb < h.h_bins; ++hb) {
        for (int sb = 0; sb < h.s_bins; ++sb) {
            if (sb > 0) out << ' ';
            out << h.at(hb, sb);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace pv
