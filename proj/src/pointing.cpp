#include "pointvec/pointing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pointvec/error.hpp"

namespace pv {

const char* to_string(Gesture g) {
    switch (g) {
        case Gesture::no_hand: return "no_hand";
        case Gesture::not_pointing: return "not_pointing";
        case Gesture::pointing: return "pointing";
    }
    return "no_hand";
}

std::int64_t scaled_min_area(const PointingParams& p, int frame_w, int frame_h) {
    const double scale = static_cast<double>(frame_w) * frame_h / (640.0 * 480.0);
    return std::max<std::int64_t>(1, std::llround(static_cast<double>(p.min_blob_area) * scale));
}

double direction_deg(double dx, double dy_image) {
    double deg = std::atan2(-dy_image, dx) * 180.0 / std::numbers::pi;
    if (deg < 0.0) deg += 360.0;
    if (deg >= 360.0) deg -= 360.0;
    return deg;
}

namespace {

double dist(const PointD& a, double bx, double by) {
    return std::hypot(a.x - bx, a.y - by);
}

int cyclic_dist(int a, int b, int n) {
    const int d = std::abs(a - b) % n;
    return std::min(d, n - d);
}

Cog blob_cog(const Blob& b) { return moments_cog(b).second; }

}  // namespace

BodyAssignment select_body_blobs(const std::vector<Blob>& area_sorted, std::int64_t min_area) {
    BodyAssignment out;
    std::vector<const Blob*> kept;
    for (const Blob& b : area_sorted) {
        if (b.area >= min_area) kept.push_back(&b);
        if (kept.size() == 3) break;
    }
    if (kept.empty()) return out;
    out.head = *kept[0];
    if (kept.size() == 1) return out;

    const Cog head_cog = blob_cog(*kept[0]);
    if (kept.size() == 2) {
        const Cog c = blob_cog(*kept[1]);
        if (c.x < head_cog.x) {
            out.left_hand = *kept[1];
        } else {
            out.right_hand = *kept[1];
        }
        return out;
    }
    const Cog c1 = blob_cog(*kept[1]);
    const Cog c2 = blob_cog(*kept[2]);
    if (c1.x <= c2.x) {
        out.left_hand = *kept[1];
        out.right_hand = *kept[2];
    } else {
        out.left_hand = *kept[2];
        out.right_hand = *kept[1];
    }
    return out;
}

std::vector<FingertipCandidate> corner_candidates(const std::vector<PointD>& resampled,
                                                  const Cog& cog, const PointingParams& p) {
    const int n = static_cast<int>(resampled.size());
    std::vector<FingertipCandidate> out;
    if (n < 2 * p.k + 1) return out;
    for (int i = 0; i < n; ++i) {
        const double angle = k_curvature_angle(resampled, i, p.k);
        if (angle >= p.theta_t) continue;
        const PointD& prev = resampled[(i - p.k + n) % n];
        const PointD& next = resampled[(i + p.k) % n];
        const PointD mid{(prev.x + next.x) / 2.0, (prev.y + next.y) / 2.0};
        // A fingertip bulges outward; a between-finger hole sits closer to the
        // centroid than its own chord.
        const double d = dist(resampled[i], cog.x, cog.y);
        if (d <= dist(mid, cog.x, cog.y)) continue;
        out.push_back({i, resampled[i], angle, d});
    }
    return out;
}

std::optional<FingertipCandidate> dominant_fingertip(const std::vector<FingertipCandidate>& cands,
                                                     double perimeter, int n_points,
                                                     const PointingParams& p) {
    if (cands.empty()) return std::nullopt;
    const FingertipCandidate* best = &cands[0];
    for (const FingertipCandidate& c : cands) {
        if (c.dist_to_cog > best->dist_to_cog) best = &c;
    }
    // Rivals inside k indices are the winner's own shoulder; only separated
    // candidates can contest dominance.
    const FingertipCandidate* second = nullptr;
    for (const FingertipCandidate& c : cands) {
        if (cyclic_dist(c.contour_index, best->contour_index, n_points) < p.k) continue;
        if (second == nullptr || c.dist_to_cog > second->dist_to_cog) second = &c;
    }
    if (second == nullptr) return *best;
    const double basis =
        p.dominant_basis == DominantBasis::perimeter ? perimeter : static_cast<double>(n_points);
    if (best->dist_to_cog - second->dist_to_cog > p.dominant_frac * basis) return *best;
    return std::nullopt;
}

std::vector<int> hull_defect_fingertips(const std::vector<PointD>& resampled, const Hull&,
                                        const std::vector<Defect>& defects, const Cog& cog,
                                        const PointingParams& p) {
    if (defects.empty()) return {};
    const int n = static_cast<int>(resampled.size());

    // Mean centroid distance over every defect point (start, end, floor). The
    // floor points alone sit near the palm and would put the bar too low: the
    // hull shoulders flanking a lone extended finger would pass it.
    double cd_sum = 0.0;
    for (const Defect& d : defects) {
        cd_sum += dist(resampled[d.start_idx], cog.x, cog.y);
        cd_sum += dist(resampled[d.end_idx], cog.x, cog.y);
        cd_sum += dist(resampled[d.far_idx], cog.x, cog.y);
    }
    const double threshold =
        (1.0 + p.cd_margin) * (cd_sum / (3.0 * static_cast<double>(defects.size())));

    std::vector<int> ep;
    for (const Defect& d : defects) {
        ep.push_back(d.start_idx);
        ep.push_back(d.end_idx);
    }
    std::sort(ep.begin(), ep.end());
    ep.erase(std::unique(ep.begin(), ep.end()), ep.end());

    std::vector<int> survivors;
    for (int idx : ep) {
        if (dist(resampled[idx], cog.x, cog.y) > threshold) survivors.push_back(idx);
    }
    if (survivors.empty()) return {};

    // Merge survivors closer than k indices (cyclically) into one fingertip,
    // keeping the farthest member of each run.
    const int m = static_cast<int>(survivors.size());
    std::vector<int> breaks;  // positions where a new cluster starts
    for (int i = 0; i < m; ++i) {
        const int prev = survivors[(i - 1 + m) % m];
        const int gap = (survivors[i] - prev + n) % n;
        if (gap > p.k) breaks.push_back(i);
    }
    if (breaks.empty()) breaks.push_back(0);  // everything is one cluster

    std::vector<int> reps;
    for (std::size_t bi = 0; bi < breaks.size(); ++bi) {
        const int from = breaks[bi];
        int count = (breaks[(bi + 1) % breaks.size()] - from + m) % m;
        if (count == 0) count = m;  // single cluster covering every survivor
        int best = -1;
        double best_d = -1.0;
        for (int j = 0; j < count; ++j) {
            const int idx = survivors[(from + j) % m];
            const double d = dist(resampled[idx], cog.x, cog.y);
            if (d > best_d || (d == best_d && idx < best)) {
                best = idx;
                best_d = d;
            }
        }
        reps.push_back(best);
    }
    std::sort(reps.begin(), reps.end());
    return reps;
}

namespace {

struct DefectNeighbors {
    const Defect* prev = nullptr;  // nearest far point behind the tip
    const Defect* next = nullptr;  // nearest far point ahead of the tip
};

DefectNeighbors neighbor_defects(const std::vector<Defect>& defects, int tip_index, int n) {
    DefectNeighbors out;
    int best_fwd = n + 1;
    int best_bwd = n + 1;
    for (const Defect& d : defects) {
        const int fwd = (d.far_idx - tip_index + n) % n;
        if (fwd > 0 && fwd < best_fwd) {
            best_fwd = fwd;
            out.next = &d;
        }
        const int bwd = (tip_index - d.far_idx + n) % n;
        if (bwd > 0 && bwd < best_bwd) {
            best_bwd = bwd;
            out.prev = &d;
        }
    }
    return out;
}

double angle_between_deg(const PointD& u, const PointD& w) {
    const double lu = std::hypot(u.x, u.y);
    const double lw = std::hypot(w.x, w.y);
    if (lu == 0.0 || lw == 0.0) return 180.0;
    const double c = std::clamp((u.x * w.x + u.y * w.y) / (lu * lw), -1.0, 1.0);
    return std::acos(c) * 180.0 / std::numbers::pi;
}

}  // namespace

std::optional<double> orientation(const std::vector<PointD>& resampled, const PointD& tip,
                                  int tip_index, const std::vector<Defect>& defects,
                                  const Cog& cog, OrientMethod method,
                                  std::vector<std::string>* notes) {
    const auto note = [notes](const char* msg) {
        if (notes != nullptr) notes->push_back(msg);
    };
    const auto cog_direction = [&]() -> std::optional<double> {
        const double dx = tip.x - cog.x;
        const double dy = tip.y - cog.y;
        if (dx == 0.0 && dy == 0.0) {
            note("fingertip coincides with the centroid; no direction");
            return std::nullopt;
        }
        return direction_deg(dx, dy);
    };

    if (method == OrientMethod::cog) return cog_direction();

    const int n = static_cast<int>(resampled.size());
    const DefectNeighbors nb = neighbor_defects(defects, tip_index, n);

    if (method == OrientMethod::next_defect) {
        if (nb.next == nullptr) {
            note("no defects; next-defect direction fell back to the centroid method");
            return cog_direction();
        }
        const PointD& far = resampled[nb.next->far_idx];
        const double dx = tip.x - far.x;
        const double dy = tip.y - far.y;
        if (dx == 0.0 && dy == 0.0) {
            note("next defect coincides with the fingertip; fell back to the centroid method");
            return cog_direction();
        }
        return direction_deg(dx, dy);
    }

    // Bisector of the angle the two adjacent defect far points make at the tip.
    if (nb.prev == nullptr || nb.next == nullptr) {
        note("no defects; bisector fell back to the centroid method");
        return cog_direction();
    }
    const PointD& fp = resampled[nb.prev->far_idx];
    const PointD& fn = resampled[nb.next->far_idx];
    PointD u{tip.x - fp.x, tip.y - fp.y};
    PointD w{tip.x - fn.x, tip.y - fn.y};
    const double lu = std::hypot(u.x, u.y);
    const double lw = std::hypot(w.x, w.y);
    if (lu == 0.0 || lw == 0.0) {
        note("defect far point coincides with the fingertip; fell back to the centroid method");
        return cog_direction();
    }
    PointD bis{u.x / lu + w.x / lw, u.y / lu + w.y / lw};
    if (std::hypot(bis.x, bis.y) < 1e-12) {
        note("opposing defect directions; bisector fell back to the centroid method");
        return cog_direction();
    }
    // Point away from the hand mass.
    const double toward_tip_x = tip.x - cog.x;
    const double toward_tip_y = tip.y - cog.y;
    if (bis.x * toward_tip_x + bis.y * toward_tip_y < 0.0) {
        bis.x = -bis.x;
        bis.y = -bis.y;
    }
    return direction_deg(bis.x, bis.y);
}

namespace {

// The resampled tip sits between raster boundary points; the reported
// fingertip is the actual contour pixel, taken as the farthest-from-centroid
// point within a two-resample-step arc window around the tip.
PointD refine_fingertip(const Contour& contour, const PointD& tip, const Cog& cog,
                        int resample_count) {
    const int m = static_cast<int>(contour.points.size());
    if (m == 1) {
        return {static_cast<double>(contour.points[0].x), static_cast<double>(contour.points[0].y)};
    }
    int j0 = 0;
    double best = 1e300;
    for (int j = 0; j < m; ++j) {
        const double d = std::hypot(contour.points[j].x - tip.x, contour.points[j].y - tip.y);
        if (d < best) {
            best = d;
            j0 = j;
        }
    }
    const double window = 2.0 * contour.perimeter / static_cast<double>(resample_count);

    std::vector<int> in_window{j0};
    double acc = 0.0;
    for (int step = 1; step < m; ++step) {  // forward
        const int a = (j0 + step - 1) % m;
        const int b = (j0 + step) % m;
        acc += std::hypot(contour.points[b].x - contour.points[a].x,
                          contour.points[b].y - contour.points[a].y);
        if (acc > window) break;
        in_window.push_back(b);
    }
    acc = 0.0;
    for (int step = 1; step < m; ++step) {  // backward
        const int a = (j0 - step + 1 + m * step) % m;
        const int b = (j0 - step + m * step) % m;
        acc += std::hypot(contour.points[b].x - contour.points[a].x,
                          contour.points[b].y - contour.points[a].y);
        if (acc > window) break;
        in_window.push_back(b);
    }
    std::sort(in_window.begin(), in_window.end());
    in_window.erase(std::unique(in_window.begin(), in_window.end()), in_window.end());

    int best_j = in_window[0];
    double best_d = -1.0;
    for (int j : in_window) {
        const double d = std::hypot(contour.points[j].x - cog.x, contour.points[j].y - cog.y);
        if (d > best_d) {
            best_d = d;
            best_j = j;
        }
    }
    return {static_cast<double>(contour.points[best_j].x),
            static_cast<double>(contour.points[best_j].y)};
}

bool in_band(double angle, double lo, double hi) { return angle >= lo && angle <= hi; }

}  // namespace

PointingDecision classify_pointing(const Blob& hand, const PointingParams& p, int frame_w,
                                   int frame_h) {
    PointingDecision out;
    if (hand.area < scaled_min_area(p, frame_w, frame_h)) {
        out.gesture = Gesture::no_hand;
        return out;
    }
    const Contour contour = trace_contour(hand);
    if (static_cast<int>(contour.points.size()) < 3) {
        out.gesture = Gesture::not_pointing;
        out.diag.notes.push_back("contour too small to analyze");
        return out;
    }

    const int n = p.resample_points;
    out.diag.resampled = resample(contour, n);
    out.diag.perimeter = polyline_perimeter(out.diag.resampled);
    out.diag.cog = moments_cog(hand).second;

    out.diag.corner_candidates = corner_candidates(out.diag.resampled, out.diag.cog, p);
    out.diag.corner_winner =
        dominant_fingertip(out.diag.corner_candidates, out.diag.perimeter, n, p);

    const Hull hull = convex_hull(out.diag.resampled);
    out.diag.hull_indices = hull.indices;
    // Resampling a rasterized boundary leaves sub-pixel dips along straight or
    // gently curved stretches; only defects deep enough to be real structure
    // (finger valleys, wrist notches) take part in the analysis.
    for (const Defect& d : convexity_defects(out.diag.resampled, hull)) {
        if (d.depth >= p.min_defect_depth) out.diag.defects.push_back(d);
    }
    if (!out.diag.defects.empty()) {
        double cd_sum = 0.0;
        for (const Defect& d : out.diag.defects) {
            for (const int idx : {d.start_idx, d.end_idx, d.far_idx}) {
                cd_sum += std::hypot(out.diag.resampled[idx].x - out.diag.cog.x,
                                     out.diag.resampled[idx].y - out.diag.cog.y);
            }
        }
        out.diag.cd_avg = cd_sum / (3.0 * static_cast<double>(out.diag.defects.size()));
    }
    out.diag.ep_survivors =
        hull_defect_fingertips(out.diag.resampled, hull, out.diag.defects, out.diag.cog, p);

    int tip_index = -1;
    switch (p.fingertip_rule) {
        case FingertipRule::corner:
            if (out.diag.corner_winner) tip_index = out.diag.corner_winner->contour_index;
            break;
        case FingertipRule::ep:
            if (out.diag.ep_survivors.size() == 1) tip_index = out.diag.ep_survivors[0];
            break;
        case FingertipRule::both:
            if (out.diag.corner_winner && out.diag.ep_survivors.size() == 1 &&
                cyclic_dist(out.diag.corner_winner->contour_index, out.diag.ep_survivors[0], n) <=
                    p.k) {
                tip_index = out.diag.corner_winner->contour_index;
            }
            break;
    }
    if (tip_index < 0) {
        out.gesture = Gesture::not_pointing;
        return out;
    }

    if (p.index_band_mode != IndexBandMode::off) {
        double band_angle;
        bool have_angle = true;
        if (p.index_band_mode == IndexBandMode::curvature) {
            band_angle = k_curvature_angle(out.diag.resampled, tip_index, p.k);
        } else {
            const DefectNeighbors nb = neighbor_defects(out.diag.defects, tip_index, n);
            if (nb.prev == nullptr || nb.next == nullptr) {
                have_angle = false;
                band_angle = 0.0;
            } else {
                const PointD& tp = out.diag.resampled[tip_index];
                const PointD& fp = out.diag.resampled[nb.prev->far_idx];
                const PointD& fn = out.diag.resampled[nb.next->far_idx];
                band_angle =
                    angle_between_deg({fp.x - tp.x, fp.y - tp.y}, {fn.x - tp.x, fn.y - tp.y});
            }
        }
        if (!have_angle || !in_band(band_angle, p.index_band_lo, p.index_band_hi)) {
            out.gesture = Gesture::not_pointing;
            out.diag.notes.push_back("index-finger angle band rejected the fingertip");
            return out;
        }
    }
    if (p.secondary_band_enabled) {
        const double a = k_curvature_angle(out.diag.resampled, tip_index, p.k);
        if (!in_band(a, p.secondary_band_lo, p.secondary_band_hi)) {
            out.gesture = Gesture::not_pointing;
            out.diag.notes.push_back("secondary angle band rejected the fingertip");
            return out;
        }
    }

    out.gesture = Gesture::pointing;
    const PointD tip = refine_fingertip(contour, out.diag.resampled[tip_index], out.diag.cog, n);
    out.fingertip = tip;
    out.angle_cog = orientation(out.diag.resampled, tip, tip_index, out.diag.defects, out.diag.cog,
                                OrientMethod::cog, &out.diag.notes);
    out.angle_next_defect = orientation(out.diag.resampled, tip, tip_index, out.diag.defects,
                                        out.diag.cog, OrientMethod::next_defect, &out.diag.notes);
    out.angle_bisector = orientation(out.diag.resampled, tip, tip_index, out.diag.defects,
                                     out.diag.cog, OrientMethod::bisector, &out.diag.notes);
    return out;
}

}  // namespace pv
