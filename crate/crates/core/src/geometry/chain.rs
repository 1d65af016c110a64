//! Exact areas of convex planar regions bounded by line segments and
//! circular arcs, and their clipping by half-planes.
//!
//! A [`Chain`] is the counterclockwise boundary of a convex region.
//! Clipping by a half-plane keeps the boundary pieces on the positive
//! side and bridges the (single, by convexity) gap with a chord on the
//! cut line; the bridged length is exactly the 1-volume of the cut line
//! inside the region.

use super::vecmath::{cross2, perp2};
use std::f64::consts::TAU;

#[derive(Debug, Clone)]
pub enum Element {
    Seg {
        a: [f64; 2],
        b: [f64; 2],
    },
    /// Counterclockwise arc from `a` to `b` on the circle at `center`.
    Arc {
        a: [f64; 2],
        b: [f64; 2],
        center: [f64; 2],
        radius: f64,
    },
}

impl Element {
    fn start(&self) -> [f64; 2] {
        match self {
            Element::Seg { a, .. } | Element::Arc { a, .. } => *a,
        }
    }

    fn end(&self) -> [f64; 2] {
        match self {
            Element::Seg { b, .. } | Element::Arc { b, .. } => *b,
        }
    }

    /// Signed contribution to `1/2 ∮ (x dy - y dx)`.
    fn area_term(&self) -> f64 {
        match *self {
            Element::Seg { a, b } => 0.5 * cross2(a, b),
            Element::Arc { a, b, center, radius } => {
                let span = arc_span(a, b, center);
                0.5 * cross2(center, [b[0] - a[0], b[1] - a[1]]) + 0.5 * radius * radius * span
            }
        }
    }
}

/// Counterclockwise angular span from `a` to `b` around `center`, in (0, 2pi].
fn arc_span(a: [f64; 2], b: [f64; 2], center: [f64; 2]) -> f64 {
    let ta = (a[1] - center[1]).atan2(a[0] - center[0]);
    let tb = (b[1] - center[1]).atan2(b[0] - center[0]);
    let mut span = (tb - ta) % TAU;
    if span < 0.0 {
        span += TAU;
    }
    if span == 0.0 {
        // Coincident endpoints denote a half turn split elsewhere, never a
        // full circle in a well-formed chain; treat as zero-length.
        0.0
    } else {
        span
    }
}

#[derive(Debug, Clone)]
pub struct Chain {
    pub elements: Vec<Element>,
}

/// Result of clipping: the kept region and the exact length of the cut
/// line inside the original region.
pub struct Clipped {
    pub region: Chain,
    pub cut_length: f64,
}

impl Chain {
    /// Full disk as two half-circle arcs.
    pub fn disk(center: [f64; 2], radius: f64) -> Self {
        let east = [center[0] + radius, center[1]];
        let west = [center[0] - radius, center[1]];
        Chain {
            elements: vec![
                Element::Arc { a: east, b: west, center, radius },
                Element::Arc { a: west, b: east, center, radius },
            ],
        }
    }

    /// Axis-aligned rectangle with rounded corners. `hw`, `hh` are the
    /// full half-sides (rounding included); `rho = 0` gives a sharp box.
    pub fn rounded_rect(center: [f64; 2], hw: f64, hh: f64, rho: f64) -> Self {
        let (cx, cy) = (center[0], center[1]);
        let (ax, ay) = (hw - rho, hh - rho);
        let mut elements = Vec::with_capacity(8);
        let push_seg = |a: [f64; 2], b: [f64; 2], v: &mut Vec<Element>| {
            if a != b {
                v.push(Element::Seg { a, b });
            }
        };
        // Start on the right wall, travel counterclockwise.
        let p = [
            [cx + hw, cy - ay],
            [cx + hw, cy + ay], // right wall
            [cx + ax, cy + hh],
            [cx - ax, cy + hh], // top wall
            [cx - hw, cy + ay],
            [cx - hw, cy - ay], // left wall
            [cx - ax, cy - hh],
            [cx + ax, cy - hh], // bottom wall
        ];
        let corners = [
            [cx + ax, cy + ay],
            [cx - ax, cy + ay],
            [cx - ax, cy - ay],
            [cx + ax, cy - ay],
        ];
        for k in 0..4 {
            push_seg(p[2 * k], p[2 * k + 1], &mut elements);
            if rho > 0.0 {
                elements.push(Element::Arc {
                    a: p[2 * k + 1],
                    b: p[(2 * k + 2) % 8],
                    center: corners[k],
                    radius: rho,
                });
            }
        }
        Chain { elements }
    }

    pub fn area(&self) -> f64 {
        self.elements.iter().map(Element::area_term).sum()
    }

    /// Clip to the half-plane `{x : u·x >= t}` (`u` unit).
    pub fn clip_halfplane(&self, u: [f64; 2], t: f64) -> Clipped {
        let side = |p: [f64; 2]| u[0] * p[0] + u[1] * p[1] - t;
        let mut kept: Vec<Element> = Vec::new();
        for el in &self.elements {
            match *el {
                Element::Seg { a, b } => {
                    let (sa, sb) = (side(a), side(b));
                    if sa >= 0.0 && sb >= 0.0 {
                        kept.push(Element::Seg { a, b });
                    } else if sa >= 0.0 || sb >= 0.0 {
                        // Single crossing: parametric intersection.
                        let w = sa / (sa - sb);
                        let q = [a[0] + w * (b[0] - a[0]), a[1] + w * (b[1] - a[1])];
                        if sa >= 0.0 {
                            kept.push(Element::Seg { a, b: q });
                        } else {
                            kept.push(Element::Seg { a: q, b });
                        }
                    }
                }
                Element::Arc { a, b, center, radius } => {
                    clip_arc(a, b, center, radius, u, t, &mut kept);
                }
            }
        }
        if kept.is_empty() {
            return Clipped { region: Chain { elements: Vec::new() }, cut_length: 0.0 };
        }
        // Bridge gaps between consecutive kept pieces with chords on the
        // cut line. Gap endpoints are crossing points, so any bridge lies
        // on {u·x = t}.
        let mut out: Vec<Element> = Vec::new();
        let mut cut_length = 0.0;
        let n = kept.len();
        for i in 0..n {
            let cur_end = kept[i].end();
            let next_start = kept[(i + 1) % n].start();
            out.push(kept[i].clone());
            let gap = ((cur_end[0] - next_start[0]).powi(2)
                + (cur_end[1] - next_start[1]).powi(2))
            .sqrt();
            if gap > 1e-12 {
                out.push(Element::Seg { a: cur_end, b: next_start });
                cut_length += gap;
            }
        }
        Clipped { region: Chain { elements: out }, cut_length }
    }
}

/// Keep the portions of a counterclockwise arc on the positive side of
/// `{u·x >= t}`, splitting at line-circle intersections.
fn clip_arc(
    a: [f64; 2],
    b: [f64; 2],
    center: [f64; 2],
    radius: f64,
    u: [f64; 2],
    t: f64,
    kept: &mut Vec<Element>,
) {
    let span = arc_span(a, b, center);
    let ta = (a[1] - center[1]).atan2(a[0] - center[0]);
    let h = t - (u[0] * center[0] + u[1] * center[1]);
    let point_at = |theta: f64| -> [f64; 2] {
        [center[0] + radius * theta.cos(), center[1] + radius * theta.sin()]
    };
    let side_mid = |o0: f64, o1: f64| -> f64 {
        let p = point_at(ta + 0.5 * (o0 + o1));
        u[0] * p[0] + u[1] * p[1] - t
    };

    let mut offsets: Vec<f64> = vec![0.0, span];
    if h.abs() < radius {
        // Line crosses the circle at center + h·u ± w·perp(u).
        let w = (radius * radius - h * h).sqrt();
        let v = perp2(u);
        for s in [w, -w] {
            let p = [center[0] + h * u[0] + s * v[0], center[1] + h * u[1] + s * v[1]];
            let tp = (p[1] - center[1]).atan2(p[0] - center[0]);
            let mut off = (tp - ta) % TAU;
            if off < 0.0 {
                off += TAU;
            }
            if off > 1e-14 && off < span - 1e-14 {
                offsets.push(off);
            }
        }
        offsets.sort_by(|x, y| x.partial_cmp(y).unwrap());
    }
    for pair in offsets.windows(2) {
        let (o0, o1) = (pair[0], pair[1]);
        if o1 - o0 <= 1e-15 {
            continue;
        }
        if side_mid(o0, o1) >= 0.0 {
            let pa = if o0 == 0.0 { a } else { point_at(ta + o0) };
            let pb = if o1 == span { b } else { point_at(ta + o1) };
            kept.push(Element::Arc { a: pa, b: pb, center, radius });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn segment_area(radius: f64, s: f64) -> f64 {
        if s >= radius {
            0.0
        } else if s <= -radius {
            PI * radius * radius
        } else {
            radius * radius * (s / radius).acos() - s * (radius * radius - s * s).sqrt()
        }
    }

    #[test]
    fn disk_area() {
        let c = Chain::disk([0.3, -0.2], 0.7);
        assert!((c.area() - PI * 0.49).abs() < 1e-13);
    }

    #[test]
    fn disk_clip_matches_segment_formula() {
        let center = [0.5, 1.5];
        let radius = 0.8;
        let c = Chain::disk(center, radius);
        for k in 0..24 {
            let ang = k as f64 * PI / 7.3;
            let u = [ang.cos(), ang.sin()];
            for s in [-0.9, -0.5, -0.1, 0.0, 0.2, 0.55, 0.79] {
                let t = u[0] * center[0] + u[1] * center[1] + s;
                let clipped = c.clip_halfplane(u, t);
                let want_area = segment_area(radius, s);
                let want_chord = 2.0 * (radius * radius - s * s).max(0.0).sqrt();
                assert!(
                    (clipped.region.area() - want_area).abs() < 1e-11,
                    "area ang={ang} s={s}"
                );
                assert!(
                    (clipped.cut_length - want_chord).abs() < 1e-11,
                    "chord ang={ang} s={s}"
                );
            }
        }
    }

    #[test]
    fn clip_misses_region_entirely() {
        let c = Chain::disk([0.0, 0.0], 1.0);
        let inside = c.clip_halfplane([1.0, 0.0], -2.0);
        assert!((inside.region.area() - PI).abs() < 1e-12);
        assert_eq!(inside.cut_length, 0.0);
        let outside = c.clip_halfplane([1.0, 0.0], 2.0);
        assert_eq!(outside.region.area(), 0.0);
        assert_eq!(outside.cut_length, 0.0);
    }

    #[test]
    fn rounded_rect_area_closed_form() {
        let rho = 0.02;
        let c = Chain::rounded_rect([0.4, 0.25], 0.4, 0.25, rho);
        let want = 0.8 * 0.5 - (4.0 - PI) * rho * rho;
        assert!((c.area() - want).abs() < 1e-13);
    }

    #[test]
    fn sharp_rect_clip() {
        let c = Chain::rounded_rect([0.0, 0.0], 1.0, 0.5, 0.0);
        let clipped = c.clip_halfplane([1.0, 0.0], 0.25);
        assert!((clipped.region.area() - 0.75).abs() < 1e-13);
        assert!((clipped.cut_length - 1.0).abs() < 1e-13);
    }

    #[test]
    fn rounded_rect_center_cut() {
        // Vertical center cut avoids the corner arcs: chord is the full height.
        let rho = 0.02;
        let c = Chain::rounded_rect([0.0, 0.0], 0.4, 0.25, rho);
        let clipped = c.clip_halfplane([1.0, 0.0], 0.0);
        let half = (0.8 * 0.5 - (4.0 - PI) * rho * rho) / 2.0;
        assert!((clipped.region.area() - half).abs() < 1e-13);
        assert!((clipped.cut_length - 0.5).abs() < 1e-13);
    }

    #[test]
    fn rounded_rect_diagonal_cut_splits_exactly() {
        let rho = 0.05;
        let c = Chain::rounded_rect([0.0, 0.0], 0.4, 0.25, rho);
        let total = c.area();
        let u = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];
        let hi = c.clip_halfplane(u, 0.0);
        let lo = c.clip_halfplane([-u[0], -u[1]], 0.0);
        assert!((hi.region.area() + lo.region.area() - total).abs() < 1e-12);
        assert!((hi.cut_length - lo.cut_length).abs() < 1e-12);
        // Central symmetry: the diagonal through the center splits evenly.
        assert!((hi.region.area() - total / 2.0).abs() < 1e-12);
    }

    #[test]
    fn cut_through_corner_arc() {
        // Vertical line through the corner-arc band of a rounded square.
        let rho = 0.1;
        let c = Chain::rounded_rect([0.0, 0.0], 0.5, 0.5, rho);
        let x0 = 0.45; // crosses the two right corner arcs
        let clipped = c.clip_halfplane([1.0, 0.0], x0);
        // Oracle by quadrature: width of the region right of x0.
        let width = |x: f64| -> f64 {
            let dx = (x.abs() - 0.4).max(0.0);
            if dx > rho {
                0.0
            } else {
                2.0 * (0.4 + (rho * rho - dx * dx).sqrt())
            }
        };
        let oracle = crate::quad::integrate(width, x0, 0.5, 1e-12);
        assert!((clipped.region.area() - oracle).abs() < 1e-10);
        let chord = width(x0);
        assert!((clipped.cut_length - chord).abs() < 1e-12);
    }
}
