//! Charts and squared partitions of unity on the circle.
//!
//! The circle is the global grid [0, 2 pi); a chart is an arc (lo, hi) on the
//! covering line together with a coordinate map psi onto an interval of R.
//! Partition functions come from the standard e^{-1/t} mollifier bump,
//! normalized as phi_i = b_i / sqrt(sum_j b_j^2) so that sum phi_i^2 = 1
//! identically. All smooth fields are exposed through 4-jets so downstream
//! coefficient algebra never touches finite differences.

use std::f64::consts::TAU;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::PeriodicGrid;
use crate::jet::{Jet, JetFn};

/// Smooth scalar function of one variable exposed through 4-jets.
pub type SmoothFn = Arc<dyn JetFn>;

/// Lift a circle coordinate into the window [lo, lo + 2 pi).
pub fn lift(x: f64, lo: f64) -> f64 {
    lo + (x - lo).rem_euclid(TAU)
}

/// C-infinity bump supported exactly on (lo, hi): exp(-1/(1-s^2)) in the
/// rescaled coordinate, identically zero outside, every derivative flat at
/// the support edges.
pub fn bump(lo: f64, hi: f64) -> SmoothFn {
    assert!(hi > lo, "empty bump support");
    let c = 0.5 * (lo + hi);
    let hw = 0.5 * (hi - lo);
    Arc::new(move |x: Jet| {
        let s = x.sub(&Jet::constant(c)).scale(1.0 / hw);
        if s.val().abs() >= 1.0 {
            return Jet::constant(0.0);
        }
        let w = Jet::constant(1.0).sub(&s.mul(&s));
        w.recip().neg().exp()
    })
}

/// Smooth cutoff equal to 1 on [flat_lo, flat_hi], supported in (lo, hi):
/// b1^2 / (b1^2 + b2^2) with b1 the plateau bump and b2 covering only the
/// complement of the plateau, so the denominator never vanishes.
pub fn plateau(lo: f64, flat_lo: f64, flat_hi: f64, hi: f64) -> SmoothFn {
    assert!(lo < flat_lo && flat_lo < flat_hi && flat_hi < hi);
    let inner = bump(lo, hi);
    let left = bump(2.0 * lo - flat_lo, flat_lo);
    let right = bump(flat_hi, 2.0 * hi - flat_hi);
    Arc::new(move |x: Jet| {
        let a = inner.jet(x.val());
        if a.val() == 0.0 {
            return Jet::constant(0.0);
        }
        let b = left.jet(x.val()).add(&right.jet(x.val()));
        let a2 = a.mul(&a);
        a2.div(&a2.add(&b.mul(&b)))
    })
}

/// One arc of the circle with its coordinate map.
///
/// `map` and `inv` are jets of psi and psi^{-1}. The local grid is a
/// periodic box 1.5x the arc image with the image centered, so quantized
/// kernels have a quarter-image of padding on each side. Construction scans
/// how far into the padding the inverse map stays certified (round trips
/// hold, slope bounded); coefficient pushforwards clamp to that window and
/// freeze beyond it, so an inverse valid on the whole box never freezes.
#[derive(Clone)]
pub struct Chart {
    index: usize,
    lo: f64,
    hi: f64,
    map: SmoothFn,
    inv: SmoothFn,
    full_circle: bool,
    img_lo: f64,
    img_hi: f64,
    box_origin: f64,
    local_grid: PeriodicGrid,
    diffeo_floor: f64,
    window_lo: f64,
    window_hi: f64,
}

impl Chart {
    pub fn new(
        index: usize,
        lo: f64,
        hi: f64,
        map: SmoothFn,
        inv: SmoothFn,
        local_points: usize,
    ) -> Result<Self> {
        if !(hi > lo) || hi - lo >= TAU {
            return Err(Error::Atlas(format!(
                "arc ({lo}, {hi}) must be a nonempty proper sub-arc"
            )));
        }
        let ext = 0.12 * (hi - lo);
        let mut floor = f64::INFINITY;
        for k in 0..=400 {
            let x = lo - ext + (hi - lo + 2.0 * ext) * k as f64 / 400.0;
            let j = map.jet(x);
            let back = inv.jet(j.val()).val();
            if (back - x).abs() > 1e-9 * (1.0 + x.abs()) {
                return Err(Error::Atlas(format!(
                    "chart {index}: inverse map round trip off by {:.3e} at x={x}",
                    (back - x).abs()
                )));
            }
            floor = floor.min(j.d1().abs());
        }
        if !(floor > 1e-6) {
            return Err(Error::Atlas(format!(
                "chart {index}: |psi'| floor {floor:.3e} too close to zero"
            )));
        }
        let img_lo = map.jet(lo).val();
        let img_hi = map.jet(hi).val();
        if !(img_hi > img_lo) {
            return Err(Error::Atlas(format!(
                "chart {index}: map must be increasing on the arc"
            )));
        }
        let len = img_hi - img_lo;
        let box_len = 1.5 * len;
        let local_grid = PeriodicGrid::new(1, local_points, box_len)?;
        let pad = 0.25 * len;
        let trips = |y: f64| -> bool {
            let j = inv.jet(y);
            j.d1().abs() <= 4.0 / floor
                && (map.jet(j.val()).val() - y).abs() <= 1e-9 * (1.0 + y.abs())
        };
        let mut extension = 0.0;
        for k in (1..=16).rev() {
            let e = pad * k as f64 / 16.0;
            let ok = (0..=32).all(|s| {
                let f = e * s as f64 / 32.0;
                trips(img_lo - f) && trips(img_hi + f)
            });
            if ok {
                extension = e;
                break;
            }
        }
        Ok(Self {
            index,
            lo,
            hi,
            map,
            inv,
            full_circle: false,
            img_lo,
            img_hi,
            box_origin: img_lo - 0.25 * len,
            local_grid,
            diffeo_floor: floor,
            window_lo: img_lo - extension,
            window_hi: img_hi + extension,
        })
    }

    /// Degenerate single-chart cover: the whole circle unrolled with the
    /// identity map and no padding, so local and global grids coincide.
    pub fn full_circle(grid: &PeriodicGrid) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(Error::UnsupportedDim { op: "Chart::full_circle", dim: grid.dim(), supported: 1 });
        }
        let id: SmoothFn = Arc::new(|x: Jet| x);
        Ok(Self {
            index: 0,
            lo: 0.0,
            hi: TAU,
            map: id.clone(),
            inv: id,
            full_circle: true,
            img_lo: 0.0,
            img_hi: TAU,
            box_origin: 0.0,
            local_grid: grid.clone(),
            diffeo_floor: 1.0,
            window_lo: f64::NEG_INFINITY,
            window_hi: f64::INFINITY,
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn arc_len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_full_circle(&self) -> bool {
        self.full_circle
    }

    /// Arc image endpoints in chart coordinates.
    pub fn image(&self) -> (f64, f64) {
        (self.img_lo, self.img_hi)
    }

    /// Origin of the local periodic box: chart coordinate y = origin + u.
    pub fn box_origin(&self) -> f64 {
        self.box_origin
    }

    pub fn local_grid(&self) -> &PeriodicGrid {
        &self.local_grid
    }

    pub fn diffeo_floor(&self) -> f64 {
        self.diffeo_floor
    }

    /// Chart-coordinate window on which coefficient evaluation is certified;
    /// at least the arc image, at most the whole padded box.
    pub fn coeff_window(&self) -> (f64, f64) {
        (self.window_lo, self.window_hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.full_circle || lift(x, self.lo) < self.hi
    }

    /// Jet of psi at the lifted circle coordinate.
    pub fn map_jet(&self, x_lifted: f64) -> Jet {
        self.map.jet(x_lifted)
    }

    /// Jet of psi^{-1} at a chart coordinate.
    pub fn inv_jet(&self, y: f64) -> Jet {
        self.inv.jet(y)
    }

    /// Local box coordinate of a circle point in the arc.
    pub fn to_local(&self, x: f64) -> f64 {
        let u = self.map.jet(lift(x, self.lo)).val() - self.box_origin;
        if self.full_circle {
            u.rem_euclid(self.local_grid.len())
        } else {
            u
        }
    }

    /// Circle coordinate in [0, 2 pi) of a local box coordinate.
    pub fn from_local(&self, u: f64) -> f64 {
        self.inv.jet(self.box_origin + u).val().rem_euclid(TAU)
    }
}

/// Partition function phi_i = b_i / sqrt(sum_j b_j^2), with each b_j a bump
/// supported strictly inside its arc. Jets differentiate the whole quotient.
struct Partition {
    bumps: Vec<(f64, SmoothFn)>,
    index: usize,
}

impl JetFn for Partition {
    fn jet(&self, x: f64) -> Jet {
        let mut ss = Jet::constant(0.0);
        let mut own = Jet::constant(0.0);
        for (i, (lo, b)) in self.bumps.iter().enumerate() {
            let v = b.jet(lift(x, *lo));
            ss = ss.add(&v.mul(&v));
            if i == self.index {
                own = v;
            }
        }
        own.div(&ss.sqrt())
    }
}

struct ConstOne;

impl JetFn for ConstOne {
    fn jet(&self, _x: f64) -> Jet {
        Jet::constant(1.0)
    }
}

/// A coarser family of charts with the fine-to-coarse assignment i -> k(i),
/// each coarse domain compactly containing the second-neighborhood of its
/// assigned fine charts.
pub struct CoarseAtlas {
    charts: Vec<Chart>,
    assignment: Vec<usize>,
}

impl CoarseAtlas {
    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    /// k(i) for fine chart i.
    pub fn assignment(&self, i: usize) -> usize {
        self.assignment[i]
    }
}

/// Atlas of arcs on the circle with squared partition functions and neighbor
/// tables; optionally a coarse atlas certified to contain second-neighbor
/// unions.
pub struct ChartAtlas {
    grid: PeriodicGrid,
    charts: Vec<Chart>,
    partition: Vec<SmoothFn>,
    neighbors: Vec<Vec<usize>>,
    second_neighbors: Vec<Vec<usize>>,
    coarse: Option<CoarseAtlas>,
}

impl ChartAtlas {
    /// Build the partition and neighbor tables; verifies on the lattice that
    /// sum phi_i^2 = 1 to 1e-12, that every phi_i vanishes outside its arc
    /// with at least `margin_cells` grid cells to spare, and that arcs cover.
    pub fn new(grid: &PeriodicGrid, charts: Vec<Chart>, margin_cells: f64) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(Error::UnsupportedDim { op: "ChartAtlas", dim: grid.dim(), supported: 1 });
        }
        if charts.is_empty() {
            return Err(Error::Atlas("atlas needs at least one chart".into()));
        }
        if margin_cells < 2.0 {
            return Err(Error::Atlas(format!(
                "support margin {margin_cells} cells below the required 2"
            )));
        }
        let n = charts.len();
        let margin = margin_cells * grid.spacing();
        let partition: Vec<SmoothFn> = if n == 1 && charts[0].is_full_circle() {
            vec![Arc::new(ConstOne)]
        } else {
            let bumps: Vec<(f64, SmoothFn)> = charts
                .iter()
                .map(|c| {
                    if c.arc_len() <= 2.0 * margin {
                        return Err(Error::Atlas(format!(
                            "chart {}: arc too short for the support margin",
                            c.index()
                        )));
                    }
                    Ok((c.lo(), bump(c.lo() + margin, c.hi() - margin)))
                })
                .collect::<Result<_>>()?;
            (0..n)
                .map(|i| Arc::new(Partition { bumps: bumps.clone(), index: i }) as SmoothFn)
                .collect()
        };

        // Cover check: if the bump supports miss a lattice point the
        // normalizing quotient is 0/0 there, so the NaN-safe comparison
        // doubles as the cover certificate.
        for j in 0..grid.points() {
            let x = grid.x(j);
            let ss: f64 = partition.iter().map(|p| p.jet(x).val().powi(2)).sum();
            if !((ss - 1.0).abs() <= 1e-12) {
                return Err(Error::Atlas(format!(
                    "partition squares sum to {ss:.15} at x={x:.6}"
                )));
            }
        }
        for (i, c) in charts.iter().enumerate() {
            if c.is_full_circle() {
                continue;
            }
            for j in 0..grid.points() {
                let x = grid.x(j);
                let xl = lift(x, c.lo());
                let v = partition[i].jet(x).val();
                if v != 0.0 && !(xl > c.lo() + margin && xl < c.hi() - margin) {
                    return Err(Error::Atlas(format!(
                        "phi_{i} nonzero outside its margin at x={x:.6}"
                    )));
                }
            }
        }

        let mut neighbors = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if arcs_intersect(&charts[i], &charts[j]) {
                    neighbors[i].push(j);
                }
            }
        }
        let second_neighbors: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                let mut s: Vec<usize> = neighbors[i]
                    .iter()
                    .flat_map(|&j| neighbors[j].iter().copied())
                    .collect();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();

        Ok(Self {
            grid: grid.clone(),
            charts,
            partition,
            neighbors,
            second_neighbors,
            coarse: None,
        })
    }

    /// Single full-circle chart with phi = 1: gluing degenerates to a plain
    /// global step.
    pub fn trivial(grid: &PeriodicGrid) -> Result<Self> {
        Self::new(grid, vec![Chart::full_circle(grid)?], 2.0)
    }

    /// Attach a coarse atlas: every fine chart's second-neighbor arc union
    /// must fit compactly (one grid cell of slack) inside some coarse domain.
    pub fn with_coarse(mut self, coarse_charts: Vec<Chart>) -> Result<Self> {
        let slack = self.grid.spacing();
        let mut assignment = Vec::with_capacity(self.charts.len());
        for i in 0..self.charts.len() {
            let arcs: Vec<(f64, f64)> = self.second_neighbors[i]
                .iter()
                .map(|&l| (self.charts[l].lo(), self.charts[l].hi()))
                .collect();
            let k = coarse_charts
                .iter()
                .position(|cc| arcs.iter().all(|&a| arc_inside(a, (cc.lo(), cc.hi()), slack)));
            match k {
                Some(k) => assignment.push(k),
                None => {
                    return Err(Error::Atlas(format!(
                        "no coarse chart compactly contains the second-neighborhood of chart {i}"
                    )))
                }
            }
        }
        self.coarse = Some(CoarseAtlas { charts: coarse_charts, assignment });
        Ok(self)
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn chart_count(&self) -> usize {
        self.charts.len()
    }

    /// phi_i as a jet-valued function on the circle.
    pub fn partition(&self, i: usize) -> &SmoothFn {
        &self.partition[i]
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn second_neighbors(&self, i: usize) -> &[usize] {
        &self.second_neighbors[i]
    }

    pub fn coarse(&self) -> Option<&CoarseAtlas> {
        self.coarse.as_ref()
    }
}

fn arcs_intersect(a: &Chart, b: &Chart) -> bool {
    if a.is_full_circle() || b.is_full_circle() {
        return true;
    }
    // Lift b's start into a's window [a.lo, a.lo + 2 pi); b then either
    // starts before a ends, or wraps past the window end back over a.lo.
    let blo = lift(b.lo(), a.lo());
    blo < a.hi() || blo + b.arc_len() > a.lo() + TAU
}

/// Closed arc `a` strictly inside open arc `big` with `slack` to spare.
fn arc_inside(a: (f64, f64), big: (f64, f64), slack: f64) -> bool {
    if a.1 - a.0 >= big.1 - big.0 - 2.0 * slack {
        return false;
    }
    let lo = lift(a.0, big.0);
    lo >= big.0 + slack && lo + (a.1 - a.0) <= big.1 - slack
}

/// Two overlapping arcs: the smallest atlas with nontrivial gluing and a
/// genuine transition map. The second chart's coordinate is deliberately
/// non-affine so coefficient pushforward is exercised. No coarse atlas can
/// exist at this size: each arc's second-neighborhood is already the whole
/// circle.
pub fn circle_two_chart(grid: &PeriodicGrid, local_points: usize) -> Result<ChartAtlas> {
    let hw = 0.45;
    let id: SmoothFn = Arc::new(|x: Jet| x);
    let c1 = Chart::new(0, -hw, std::f64::consts::PI + hw, id.clone(), id, local_points)?;
    let fwd: SmoothFn = Arc::new(|x: Jet| {
        let s = x.sub(&Jet::constant(std::f64::consts::PI));
        s.add(&s.sin().scale(0.15))
    });
    let inv: SmoothFn = Arc::new(|y: Jet| newton_inverse(y, 0.15));
    let c2 = Chart::new(
        1,
        std::f64::consts::PI - hw,
        TAU + hw,
        fwd,
        inv,
        local_points,
    )?;
    ChartAtlas::new(grid, vec![c1, c2], 2.0)
}

/// Jet of the inverse of y = s + eps sin(s), evaluated by Newton iteration
/// for the value and by the forward jet for the derivatives.
fn newton_inverse(y: Jet, eps: f64) -> Jet {
    let mut s = y.val();
    for _ in 0..60 {
        let f = s + eps * s.sin() - y.val();
        let fp = 1.0 + eps * s.cos();
        let step = f / fp;
        s -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    let fwd = Jet::var(s).add(&Jet::var(s).sin().scale(eps));
    let mut inv = fwd.inverse_jet();
    inv.d[0] = s + std::f64::consts::PI;
    // Shift back: the forward map above is taken in the shifted coordinate
    // s = x - pi, which has unit slope, so derivative entries carry over.
    inv
}

/// Ten short arcs with adjacent-only overlaps plus two long coarse arcs: the
/// smallest circle layout whose second-neighborhoods are proper sub-arcs, so
/// the coarse containment certificate is actually checkable.
pub fn circle_ten_chart(grid: &PeriodicGrid, local_points: usize) -> Result<ChartAtlas> {
    let n = 10;
    let step = TAU / n as f64;
    let delta = 0.15;
    let id = || -> SmoothFn { Arc::new(|x: Jet| x) };
    let charts: Vec<Chart> = (0..n)
        .map(|i| {
            let lo = i as f64 * step - delta;
            let hi = (i + 1) as f64 * step + delta;
            Chart::new(i, lo, hi, id(), id(), local_points)
        })
        .collect::<Result<_>>()?;
    let atlas = ChartAtlas::new(grid, charts, 2.0)?;
    let half = 3.05;
    let coarse = vec![
        Chart::new(0, 0.5 * step - half, 0.5 * step + half, id(), id(), local_points)?,
        Chart::new(1, 5.5 * step - half, 5.5 * step + half, id(), id(), local_points)?,
    ];
    atlas.with_coarse(coarse)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_vanishes_flat_at_the_edges() {
        let b = bump(0.3, 1.1);
        assert_eq!(b.jet(0.3).d, [0.0; 5]);
        assert_eq!(b.jet(1.2).d, [0.0; 5]);
        let near = b.jet(0.3 + 1e-3);
        assert!(near.val() > 0.0 && near.val() < 1e-80);
        let mid = b.jet(0.7);
        assert!((mid.val() - (-1.0f64).exp()).abs() < 1e-15);
        assert!(mid.d1().abs() < 1e-12, "bump is even about its center");
    }

    #[test]
    fn plateau_is_one_inside_and_zero_outside() {
        let p = plateau(0.0, 0.4, 0.9, 1.3);
        assert!((p.jet(0.5).val() - 1.0).abs() < 1e-15);
        assert!(p.jet(0.5).d1().abs() < 1e-12);
        assert_eq!(p.jet(1.35).val(), 0.0);
        let v = p.jet(1.0).val();
        assert!(v > 0.0 && v < 1.0);
    }

    #[test]
    fn two_chart_partition_squares_sum_to_one() {
        let g = PeriodicGrid::unit(1, 64).unwrap();
        let atlas = circle_two_chart(&g, 96).unwrap();
        assert_eq!(atlas.chart_count(), 2);
        for j in 0..g.points() {
            let x = g.x(j);
            let ss: f64 = (0..2).map(|i| atlas.partition(i).jet(x).val().powi(2)).sum();
            assert!((ss - 1.0).abs() < 1e-12, "sum phi^2 = {ss} at x = {x}");
        }
        // Supports stay inside the arcs with the 2-cell margin.
        let m = 2.0 * g.spacing();
        for i in 0..2 {
            let c = &atlas.charts()[i];
            for j in 0..g.points() {
                let x = g.x(j);
                let xl = lift(x, c.lo());
                if xl <= c.lo() + m || xl >= c.hi() - m {
                    assert_eq!(atlas.partition(i).jet(x).val(), 0.0, "leak at {x}");
                }
            }
        }
        assert_eq!(atlas.neighbors(0), &[0, 1]);
        assert_eq!(atlas.second_neighbors(1), &[0, 1]);
    }

    #[test]
    fn partition_derivative_identity_on_the_lattice() {
        // sum phi_i phi_i' = (1/2)(sum phi_i^2)' = 0 pointwise.
        let g = PeriodicGrid::unit(1, 32).unwrap();
        let atlas = circle_two_chart(&g, 64).unwrap();
        for j in 0..g.points() {
            let x = g.x(j);
            let s: f64 = (0..2)
                .map(|i| {
                    let p = atlas.partition(i).jet(x);
                    p.val() * p.d1()
                })
                .sum();
            assert!(s.abs() < 1e-12, "sum phi phi' = {s} at x = {x}");
        }
    }

    #[test]
    fn nonlinear_chart_round_trips() {
        let g = PeriodicGrid::unit(1, 64).unwrap();
        let atlas = circle_two_chart(&g, 96).unwrap();
        let c = &atlas.charts()[1];
        assert!(c.diffeo_floor() > 0.8);
        for k in 0..40 {
            let x = c.lo() + c.arc_len() * (k as f64 + 0.5) / 40.0;
            let u = c.to_local(x.rem_euclid(TAU));
            let back = c.from_local(u);
            assert!((back - x.rem_euclid(TAU)).abs() < 1e-9, "{back} vs {x}");
            assert!(u >= 0.0 && u < c.local_grid().len());
        }
        let (ilo, ihi) = c.image();
        assert!((c.local_grid().len() - 1.5 * (ihi - ilo)).abs() < 1e-12);
    }

    #[test]
    fn ten_chart_layout_certifies_coarse_containment() {
        let g = PeriodicGrid::unit(1, 128).unwrap();
        let atlas = circle_ten_chart(&g, 32).unwrap();
        assert_eq!(atlas.chart_count(), 10);
        for i in 0..10 {
            assert_eq!(atlas.neighbors(i).len(), 3, "adjacent-only overlaps");
            assert_eq!(atlas.second_neighbors(i).len(), 5);
        }
        let coarse = atlas.coarse().expect("coarse atlas attached");
        assert_eq!(coarse.charts().len(), 2);
        for i in 0..10 {
            assert!(coarse.assignment(i) < 2);
        }
    }

    #[test]
    fn two_chart_layout_has_no_coarse_cover() {
        // Each second-neighborhood is the whole circle, which no proper arc
        // can compactly contain; the certificate must refuse.
        let g = PeriodicGrid::unit(1, 64).unwrap();
        let atlas = circle_two_chart(&g, 96).unwrap();
        let id: SmoothFn = Arc::new(|x: Jet| x);
        let big = Chart::new(0, -0.1, TAU - 0.2, id.clone(), id, 96).unwrap();
        assert!(atlas.with_coarse(vec![big]).is_err());
    }

    #[test]
    fn trivial_atlas_has_constant_partition() {
        let g = PeriodicGrid::unit(1, 32).unwrap();
        let atlas = ChartAtlas::trivial(&g).unwrap();
        assert!(atlas.charts()[0].is_full_circle());
        for j in 0..g.points() {
            let p = atlas.partition(0).jet(g.x(j));
            assert_eq!(p.val(), 1.0);
            assert_eq!(p.d1(), 0.0);
        }
    }
}
