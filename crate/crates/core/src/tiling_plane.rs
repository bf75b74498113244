//! Planar tilings built from Fibonacci rows and products of line tilings.
//!
//! Rectangles carry exact `Q[τ]` corners. Tilings are queried through
//! [`PlaneTiling::tiles_in`], which returns every tile meeting a closed
//! axis-parallel rectangle.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::golden::GoldenNumber;
use crate::tiling_line::{conjugate, HierarchicalAddress, LineTiling, TailRule, Tile, TileSpec};
use crate::{Error, Result};

type G = GoldenNumber;

/// Closed axis-parallel rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Rect {
    pub x0: G,
    pub x1: G,
    pub y0: G,
    pub y1: G,
}

impl Rect {
    pub fn new(x0: G, x1: G, y0: G, y1: G) -> Result<Self> {
        if x0 > x1 || y0 > y1 {
            return Err(Error::Invalid("rectangle corners out of order".into()));
        }
        Ok(Rect { x0, x1, y0, y1 })
    }

    /// `[-r, r]²`.
    pub fn square(r: &G) -> Self {
        Rect {
            x0: -r,
            x1: r.clone(),
            y0: -r,
            y1: r.clone(),
        }
    }

    pub fn width(&self) -> G {
        &self.x1 - &self.x0
    }

    pub fn height(&self) -> G {
        &self.y1 - &self.y0
    }

    pub fn area(&self) -> G {
        &self.width() * &self.height()
    }

    pub fn center(&self) -> [G; 2] {
        [(&self.x0 + &self.x1).half(), (&self.y0 + &self.y1).half()]
    }

    pub fn meets(&self, other: &Rect) -> bool {
        self.x0 <= other.x1 && other.x0 <= self.x1 && self.y0 <= other.y1 && other.y0 <= self.y1
    }

    pub fn translate(&self, v: &[G; 2]) -> Rect {
        Rect {
            x0: &self.x0 + &v[0],
            x1: &self.x1 + &v[0],
            y0: &self.y0 + &v[1],
            y1: &self.y1 + &v[1],
        }
    }

    pub fn expand(&self, r: &G) -> Rect {
        Rect {
            x0: &self.x0 - r,
            x1: &self.x1 + r,
            y0: &self.y0 - r,
            y1: &self.y1 + r,
        }
    }

    /// Whether the rectangle meets the open disc of radius `r` about `c`.
    pub fn meets_open_disc(&self, c: &[G; 2], r: &G) -> bool {
        let zero = G::zero();
        let dx = (&self.x0 - &c[0]).max(zero.clone()).max(&c[0] - &self.x1);
        let dy = (&self.y0 - &c[1]).max(zero).max(&c[1] - &self.y1);
        &(&dx * &dx) + &(&dy * &dy) < r * r
    }

    fn corners(&self) -> [[G; 2]; 4] {
        [
            [self.x0.clone(), self.y0.clone()],
            [self.x1.clone(), self.y0.clone()],
            [self.x1.clone(), self.y1.clone()],
            [self.x0.clone(), self.y1.clone()],
        ]
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]x[{}, {}]", self.x0, self.x1, self.y0, self.y1)
    }
}

/// A labelled rectangle.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PlaneTile {
    pub label: String,
    pub rect: Rect,
}

pub trait PlaneTiling {
    /// Every tile meeting the closed rectangle, in a deterministic order.
    fn tiles_in(&self, region: &Rect) -> Result<Vec<PlaneTile>>;

    /// Largest tile width or height.
    fn max_tile_size(&self) -> G;

    fn patch(&self, region: &Rect) -> Result<Patch> {
        Ok(Patch {
            region: region.clone(),
            tiles: self.tiles_in(region)?,
        })
    }
}

/// The tiles meeting a region.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Patch {
    pub region: Rect,
    pub tiles: Vec<PlaneTile>,
}

impl Patch {
    /// Sum of tile areas clipped to the region.
    pub fn covered_area(&self) -> G {
        self.tiles.iter().fold(G::zero(), |acc, t| {
            let w = t.rect.x1.clone().min(self.region.x1.clone()) - t.rect.x0.clone().max(self.region.x0.clone());
            let h = t.rect.y1.clone().min(self.region.y1.clone()) - t.rect.y0.clone().max(self.region.y0.clone());
            if w.is_positive() && h.is_positive() {
                &acc + &(&w * &h)
            } else {
                acc
            }
        })
    }
}

/// A stack of line tilings; row `j` occupies `j ≤ y ≤ j + 1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RowsTiling {
    first_row: i64,
    rows: Vec<LineTiling>,
    horizon: G,
}

/// Row tile widths on the image side: `|A| = τ`, `|B| = τ − 1`.
pub fn rows_image_spec() -> TileSpec {
    TileSpec::new(G::tau(), &G::tau() - &G::one()).expect("positive")
}

/// Unit squares, one seeded Fibonacci row per height, every row with a
/// vertical edge through `x = 0`. Rows are centred on `y = 0`.
pub fn rows_sample(seed: u64, rows: usize, horizon: &G) -> RowsTiling {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first_row = -(rows as i64 / 2);
    let rows = (0..rows)
        .map(|_| {
            let base = if rng.gen_bool(0.5) { Tile::A } else { Tile::B };
            let address = HierarchicalAddress::new(base, Vec::new(), TailRule::new(rng.gen())).expect("empty tower");
            LineTiling::new(address, TileSpec::unit(), G::zero()).expect("offset 0")
        })
        .collect();
    RowsTiling {
        first_row,
        rows,
        horizon: horizon.clone(),
    }
}

impl RowsTiling {
    pub fn new(first_row: i64, rows: Vec<LineTiling>, horizon: G) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Invalid("no rows".into()));
        }
        Ok(RowsTiling {
            first_row,
            rows,
            horizon,
        })
    }

    pub fn first_row(&self) -> i64 {
        self.first_row
    }

    pub fn rows(&self) -> &[LineTiling] {
        &self.rows
    }

    pub fn horizon(&self) -> &G {
        &self.horizon
    }

    pub fn row(&self, j: i64) -> Option<&LineTiling> {
        usize::try_from(j - self.first_row).ok().and_then(|i| self.rows.get(i))
    }

    /// Rows `j` with `j ≥` first and `j + 1 ≤` last covered height.
    pub fn row_range(&self) -> std::ops::Range<i64> {
        self.first_row..self.first_row + self.rows.len() as i64
    }
}

/// Every row mapped by the line conjugacy to [`rows_image_spec`].
pub fn rows_conjugate(x: &RowsTiling, eps: &G) -> Result<RowsTiling> {
    let target = rows_image_spec();
    let rows = x
        .rows
        .iter()
        .map(|r| conjugate(r, &target, eps).map(|c| c.tiling))
        .collect::<Result<Vec<_>>>()?;
    RowsTiling::new(x.first_row, rows, x.horizon.clone())
}

fn clip_horizon(region: &Rect) -> G {
    let m = region.x0.abs().max(region.x1.abs());
    &m + &G::one()
}

impl PlaneTiling for RowsTiling {
    fn tiles_in(&self, region: &Rect) -> Result<Vec<PlaneTile>> {
        let h = clip_horizon(region);
        let mut out = Vec::new();
        for j in self.row_range() {
            let (y0, y1) = (G::integer(j), G::integer(j + 1));
            if y1 < region.y0 || y0 > region.y1 {
                continue;
            }
            let row = self.row(j).expect("in range");
            for (t, left) in row.tiles_in(&h)? {
                let right = &left + row.spec().len(t);
                let rect = Rect {
                    x0: left,
                    x1: right,
                    y0: y0.clone(),
                    y1: y1.clone(),
                };
                if rect.meets(region) {
                    out.push(PlaneTile {
                        label: t.to_string(),
                        rect,
                    });
                }
            }
        }
        Ok(out)
    }

    fn max_tile_size(&self) -> G {
        self.rows.iter().fold(G::one(), |m, r| m.max(r.spec().max_len()))
    }
}

/// For each adjacent pair of rows within radius `R`, the offset from every
/// edge `p` of the lower row with `|p| ≤ R` to the first edge `q ≥ p` of
/// the upper row, bucketed at resolution `δ`; returns the bucket count.
pub fn distinct_offsets(y: &RowsTiling, radius: &G, delta: &G) -> Result<usize> {
    if !delta.is_positive() {
        return Err(Error::Invalid("resolution must be positive".into()));
    }
    let span = &(radius + &y.max_tile_size()) + &G::one();
    let mut buckets: BTreeSet<BigInt> = BTreeSet::new();
    for j in y.row_range() {
        let (Some(lo), Some(hi)) = (y.row(j), y.row(j + 1)) else {
            continue;
        };
        if G::integer(j).abs() > *radius || G::integer(j + 1).abs() > *radius {
            continue;
        }
        let lower = lo.boundary_points(radius)?;
        let upper = hi.boundary_points(&span)?;
        let up = upper.points();
        for p in lower.points() {
            let i = up.partition_point(|q| q < p);
            if let Some(q) = up.get(i) {
                buckets.insert((&(q - p) / delta).floor());
            }
        }
    }
    Ok(buckets.len())
}

/// A translation class of neighbourhoods: tiles relative to the centre.
pub type NeighborhoodClass = Vec<PlaneTile>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Census {
    pub radius: G,
    pub budget: usize,
    /// Tiles eligible as centres; a budget at least this large is exhaustive.
    pub candidates: usize,
    pub classes: BTreeSet<NeighborhoodClass>,
    /// Class count after each quarter of the budget.
    pub growth: Vec<usize>,
    /// No new class appeared during the second half of the budget.
    pub saturated: bool,
}

impl Census {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }
}

/// Visits `budget` tiles of the patch in a seeded shuffled order, without
/// repetition until every candidate has been seen (candidates are tiles
/// whose centres lie far enough inside the region for their neighbourhood
/// to be complete), and classifies the tiles meeting
/// the open disc of radius `R` about each centre, up to translation.
pub fn neighborhood_census(patch: &Patch, radius: &G, budget: usize, seed: u64) -> Result<Census> {
    let max = patch.tiles.iter().fold(G::zero(), |m, t| m.max(t.rect.width()).max(t.rect.height()));
    let margin = radius + &max;
    let inner = Rect {
        x0: &patch.region.x0 + &margin,
        x1: &patch.region.x1 - &margin,
        y0: &patch.region.y0 + &margin,
        y1: &patch.region.y1 - &margin,
    };
    let centres: Vec<[G; 2]> = patch.tiles.iter().map(|t| t.rect.center()).collect();
    let candidates: Vec<usize> = (0..patch.tiles.len())
        .filter(|&i| {
            let c = &centres[i];
            c[0] >= inner.x0 && c[0] <= inner.x1 && c[1] >= inner.y0 && c[1] <= inner.y1
        })
        .collect();
    if candidates.is_empty() {
        return Err(Error::PatchTooSmall(patch.region.to_string()));
    }
    let cell = max.to_f64().max(radius.to_f64()).max(1e-9);
    let key = |x: &G, y: &G| ((x.to_f64() / cell).floor() as i64, (y.to_f64() / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, c) in centres.iter().enumerate() {
        grid.entry(key(&c[0], &c[1])).or_default().push(i);
    }
    let reach = ((radius.to_f64() + max.to_f64()) / cell).ceil() as i64 + 1;
    let approx: Vec<[f64; 4]> = patch
        .tiles
        .iter()
        .map(|t| [t.rect.x0.to_f64(), t.rect.x1.to_f64(), t.rect.y0.to_f64(), t.rect.y1.to_f64()])
        .collect();
    let r_f = radius.to_f64();
    let mut order = candidates;
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut seen: HashSet<NeighborhoodClass> = HashSet::new();
    let mut growth = Vec::new();
    let mut at_half = 0;
    for s in 0..budget {
        let i = order[s % order.len()];
        let c = &centres[i];
        let cf = [c[0].to_f64(), c[1].to_f64()];
        let (kx, ky) = key(&c[0], &c[1]);
        let shift = [-c[0].clone(), -c[1].clone()];
        let mut members: Vec<usize> = Vec::new();
        for dx in -reach..=reach {
            for dy in -reach..=reach {
                for &k in grid.get(&(kx + dx, ky + dy)).map(Vec::as_slice).unwrap_or(&[]) {
                    let [x0, x1, y0, y1] = approx[k];
                    let ex = (x0 - cf[0]).max(0.0).max(cf[0] - x1);
                    let ey = (y0 - cf[1]).max(0.0).max(cf[1] - y1);
                    let d = (ex * ex + ey * ey).sqrt();
                    // Exact test only near the circle.
                    let inside = if d < r_f - 1e-9 {
                        true
                    } else if d > r_f + 1e-9 {
                        false
                    } else {
                        patch.tiles[k].rect.meets_open_disc(c, radius)
                    };
                    if inside {
                        members.push(k);
                    }
                }
            }
        }
        // Translation keeps the order of tiles, so sorting by absolute
        // position gives the sorted class. Floats settle clear cases.
        members.sort_by(|&a, &b| {
            let (ta, tb) = (&patch.tiles[a], &patch.tiles[b]);
            let (ra, rb) = (&ta.rect, &tb.rect);
            ta.label.cmp(&tb.label).then_with(|| {
                let (ca, cb) = ([&ra.x0, &ra.x1, &ra.y0, &ra.y1], [&rb.x0, &rb.x1, &rb.y0, &rb.y1]);
                (0..4)
                    .map(|j| {
                        let (x, y) = (approx[a][j], approx[b][j]);
                        if (x - y).abs() > 1e-9 * (1.0 + x.abs().max(y.abs())) {
                            x.total_cmp(&y)
                        } else {
                            ca[j].cmp(cb[j])
                        }
                    })
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        });
        let class: NeighborhoodClass = members
            .iter()
            .map(|&k| PlaneTile {
                label: patch.tiles[k].label.clone(),
                rect: patch.tiles[k].rect.translate(&shift),
            })
            .collect();
        seen.insert(class);
        if s + 1 == budget / 2 {
            at_half = seen.len();
        }
        if budget >= 4 && (s + 1) % (budget / 4) == 0 {
            growth.push(seen.len());
        }
    }
    let classes: BTreeSet<NeighborhoodClass> = seen.into_iter().collect();
    Ok(Census {
        radius: radius.clone(),
        budget,
        candidates: order.len(),
        saturated: budget >= 2 && classes.len() == at_half,
        classes,
        growth,
    })
}

/// Rectangles `I_i × J_j` for the tiles `I_i` of `h` and `J_j` of `v`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProductTiling {
    pub horizontal: LineTiling,
    pub vertical: LineTiling,
}

impl ProductTiling {
    pub fn new(horizontal: LineTiling, vertical: LineTiling) -> Self {
        ProductTiling { horizontal, vertical }
    }
}

fn line_tiles(x: &LineTiling, lo: &G, hi: &G) -> Result<Vec<(Tile, G, G)>> {
    let h = &lo.abs().max(hi.abs()) + &G::one();
    Ok(x.tiles_in(&h)?
        .into_iter()
        .map(|(t, l)| {
            let r = &l + x.spec().len(t);
            (t, l, r)
        })
        .filter(|(_, l, r)| r >= lo && l <= hi)
        .collect())
}

impl PlaneTiling for ProductTiling {
    fn tiles_in(&self, region: &Rect) -> Result<Vec<PlaneTile>> {
        let cols = line_tiles(&self.horizontal, &region.x0, &region.x1)?;
        let rows = line_tiles(&self.vertical, &region.y0, &region.y1)?;
        let mut out = Vec::with_capacity(cols.len() * rows.len());
        for (tv, y0, y1) in &rows {
            for (th, x0, x1) in &cols {
                out.push(PlaneTile {
                    label: format!("{th}{}{tv}", crate::symbolic::PRODUCT_SEPARATOR),
                    rect: Rect {
                        x0: x0.clone(),
                        x1: x1.clone(),
                        y0: y0.clone(),
                        y1: y1.clone(),
                    },
                });
            }
        }
        Ok(out)
    }

    fn max_tile_size(&self) -> G {
        self.horizontal.spec().max_len().max(self.vertical.spec().max_len())
    }
}

/// Unit squares labelled periodically by a `w × h` block.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PeriodicSquares {
    width: usize,
    labels: Vec<String>,
}

impl PeriodicSquares {
    /// `labels` lists the block row by row, bottom row first.
    pub fn new(width: usize, labels: Vec<String>) -> Result<Self> {
        if width == 0 || labels.is_empty() || !labels.len().is_multiple_of(width) {
            return Err(Error::Invalid("labels must fill a rectangle".into()));
        }
        Ok(PeriodicSquares { width, labels })
    }

    pub fn period(&self) -> (usize, usize) {
        (self.width, self.labels.len() / self.width)
    }
}

impl PlaneTiling for PeriodicSquares {
    fn tiles_in(&self, region: &Rect) -> Result<Vec<PlaneTile>> {
        let (w, h) = self.period();
        let (i0, i1) = (region.x0.floor(), region.x1.floor());
        let (j0, j1) = (region.y0.floor(), region.y1.floor());
        let to_i64 = |b: &BigInt| i64::try_from(b.clone()).map_err(|_| Error::Invalid("region too large".into()));
        let (i0, i1, j0, j1) = (to_i64(&i0)? - 1, to_i64(&i1)?, to_i64(&j0)? - 1, to_i64(&j1)?);
        let mut out = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                let rect = Rect {
                    x0: G::integer(i),
                    x1: G::integer(i + 1),
                    y0: G::integer(j),
                    y1: G::integer(j + 1),
                };
                if rect.meets(region) {
                    let idx = j.rem_euclid(h as i64) as usize * w + i.rem_euclid(w as i64) as usize;
                    out.push(PlaneTile {
                        label: self.labels[idx].clone(),
                        rect,
                    });
                }
            }
        }
        Ok(out)
    }

    fn max_tile_size(&self) -> G {
        G::one()
    }
}

/// Convex polygon given by its vertices in counter-clockwise order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polygon {
    pub vertices: Vec<[G; 2]>,
}

fn sub(a: &[G; 2], b: &[G; 2]) -> [G; 2] {
    [&a[0] - &b[0], &a[1] - &b[1]]
}

fn dot(a: &[G; 2], b: &[G; 2]) -> G {
    &(&a[0] * &b[0]) + &(&a[1] * &b[1])
}

fn cross(a: &[G; 2], b: &[G; 2]) -> G {
    &(&a[0] * &b[1]) - &(&a[1] * &b[0])
}

/// Squared distance from `p` to the segment `ab`.
fn point_segment_sq(p: &[G; 2], a: &[G; 2], b: &[G; 2]) -> G {
    let d = sub(b, a);
    let dd = dot(&d, &d);
    let ap = sub(p, a);
    let q = if dd.is_zero() {
        a.clone()
    } else {
        let t = (&dot(&ap, &d) / &dd).max(G::zero()).min(G::one());
        [&a[0] + &(&t * &d[0]), &a[1] + &(&t * &d[1])]
    };
    let e = sub(p, &q);
    dot(&e, &e)
}

impl Polygon {
    /// `{a·s + b·t : 0 ≤ a ≤ 1, |b| ≤ m}`.
    pub fn tube(s: &[G; 2], t: &[G; 2], m: &G) -> Polygon {
        let bt = [m * &t[0], m * &t[1]];
        let p0 = [-bt[0].clone(), -bt[1].clone()];
        let p1 = [&s[0] - &bt[0], &s[1] - &bt[1]];
        let p2 = [&s[0] + &bt[0], &s[1] + &bt[1]];
        let p3 = bt;
        let mut vertices = vec![p0, p1, p2, p3];
        let area = (0..4).fold(G::zero(), |acc, i| &acc + &cross(&vertices[i], &vertices[(i + 1) % 4]));
        if area.is_negative() {
            vertices.reverse();
        }
        Polygon { vertices }
    }

    fn edges(&self) -> impl Iterator<Item = (&[G; 2], &[G; 2])> {
        let n = self.vertices.len();
        (0..n).map(move |i| (&self.vertices[i], &self.vertices[(i + 1) % n]))
    }

    /// Separating-axis test on closed convex polygons.
    fn intersects(&self, other: &[[G; 2]]) -> bool {
        let other_poly = Polygon {
            vertices: other.to_vec(),
        };
        for poly in [self, &other_poly] {
            for (a, b) in poly.edges() {
                let e = sub(b, a);
                let axis = [-e[1].clone(), e[0].clone()];
                let proj = |vs: &[[G; 2]]| {
                    let mut it = vs.iter().map(|v| dot(v, &axis));
                    let first = it.next().expect("vertices");
                    it.fold((first.clone(), first), |(lo, hi), x| (lo.min(x.clone()), hi.max(x)))
                };
                let (l1, h1) = proj(&self.vertices);
                let (l2, h2) = proj(other);
                if h1 < l2 || h2 < l1 {
                    return false;
                }
            }
        }
        true
    }

    /// Exact squared distance to a rectangle (0 when they meet).
    pub fn distance_sq(&self, rect: &Rect) -> G {
        let corners = rect.corners();
        if self.intersects(&corners) {
            return G::zero();
        }
        let mut best: Option<G> = None;
        let mut consider = |d: G| {
            if best.as_ref().is_none_or(|b| d < *b) {
                best = Some(d);
            }
        };
        for v in &corners {
            for (a, b) in self.edges() {
                consider(point_segment_sq(v, a, b));
            }
        }
        for v in &self.vertices {
            for i in 0..4 {
                consider(point_segment_sq(v, &corners[i], &corners[(i + 1) % 4]));
            }
        }
        best.expect("nonempty")
    }

    fn bounding_box(&self) -> Rect {
        let xs = self.vertices.iter().map(|v| v[0].clone());
        let ys = self.vertices.iter().map(|v| v[1].clone());
        let min = |it: &mut dyn Iterator<Item = G>| it.reduce(|a, b| a.min(b)).expect("vertices");
        let max = |it: &mut dyn Iterator<Item = G>| it.reduce(|a, b| a.max(b)).expect("vertices");
        Rect {
            x0: min(&mut xs.clone()),
            x1: max(&mut xs.clone()),
            y0: min(&mut ys.clone()),
            y1: max(&mut ys.clone()),
        }
    }
}

/// One verified tube: `x` and `σ^shift x` have the same tiles meeting the
/// closed 1-neighbourhood of `{a·along + b·shift : 0 ≤ a ≤ 1, |b| ≤ 1/8}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TubeAgreement {
    pub along: [G; 2],
    pub shift: [G; 2],
    pub tiles_compared: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FrameWitness {
    pub s: [G; 2],
    pub t: [G; 2],
    pub margin: G,
    /// Agreement along `s` under shift `t`, then along `t` under shift `s`.
    pub tubes: [TubeAgreement; 2],
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FrameRefusal {
    pub along: [G; 2],
    pub shift: [G; 2],
    /// A tile present on one side of the comparison and not the other.
    pub tile: PlaneTile,
    /// Whether `tile` belongs to `x` (otherwise to the shifted copy).
    pub in_original: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FrameOutcome {
    Witness(FrameWitness),
    Refusal(FrameRefusal),
}

impl FrameOutcome {
    pub fn is_witness(&self) -> bool {
        matches!(self, FrameOutcome::Witness(_))
    }
}

/// The frame margin `1/8`.
pub fn frame_margin() -> G {
    G::from_fracs(1, 8, 0, 1)
}

fn tube_check(x: &dyn PlaneTiling, along: &[G; 2], shift: &[G; 2]) -> Result<std::result::Result<TubeAgreement, FrameRefusal>> {
    let tube = Polygon::tube(along, shift, &frame_margin());
    let one = G::one();
    let meets = |r: &Rect| tube.distance_sq(r) <= one;
    let bbox = tube.bounding_box().expand(&(&one + &x.max_tile_size()));
    let original: BTreeSet<PlaneTile> = x.tiles_in(&bbox)?.into_iter().filter(|t| meets(&t.rect)).collect();
    // Tiles of σ^shift x are those of x moved by −shift.
    let back = [-shift[0].clone(), -shift[1].clone()];
    let moved: BTreeSet<PlaneTile> = x
        .tiles_in(&bbox.translate(shift))?
        .into_iter()
        .map(|t| PlaneTile {
            label: t.label,
            rect: t.rect.translate(&back),
        })
        .filter(|t| meets(&t.rect))
        .collect();
    if let Some(t) = original.difference(&moved).next() {
        return Ok(Err(FrameRefusal {
            along: along.clone(),
            shift: shift.clone(),
            tile: t.clone(),
            in_original: true,
        }));
    }
    if let Some(t) = moved.difference(&original).next() {
        return Ok(Err(FrameRefusal {
            along: along.clone(),
            shift: shift.clone(),
            tile: t.clone(),
            in_original: false,
        }));
    }
    Ok(Ok(TubeAgreement {
        along: along.clone(),
        shift: shift.clone(),
        tiles_compared: original.len(),
    }))
}

/// Checks that `σ^{as+bt}x` and `σ^{as+(b+1)t}x` agree to distance 1 about
/// the origin for `0 ≤ a ≤ 1, |b| ≤ 1/8`, and the same with `s`, `t`
/// exchanged, as two exact tube agreements.
pub fn frame_check(x: &dyn PlaneTiling, s: &[G; 2], t: &[G; 2]) -> Result<FrameOutcome> {
    if cross(s, t).is_zero() {
        return Err(Error::DependentTranslations);
    }
    let first = match tube_check(x, s, t)? {
        Ok(a) => a,
        Err(r) => return Ok(FrameOutcome::Refusal(r)),
    };
    let second = match tube_check(x, t, s)? {
        Ok(a) => a,
        Err(r) => return Ok(FrameOutcome::Refusal(r)),
    };
    Ok(FrameOutcome::Witness(FrameWitness {
        s: s.clone(),
        t: t.clone(),
        margin: frame_margin(),
        tubes: [first, second],
    }))
}

/// A product Fibonacci tiling with a periodic frame and its translations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FrameFixture {
    pub tiling: ProductTiling,
    pub level: usize,
    pub s: [G; 2],
    pub t: [G; 2],
}

/// Places the origin at the corner shared by four level-k `B×B` supertiles:
/// in each axis the level-k `B` at the origin is followed by another `B`
/// (`…A_k B_k | B_k A_k B_k…`), and `s`, `t` are the level-k `B` length
/// along each axis. `k` is the least level where the shared suffix `B_{k-1}`
/// of `A_k` and `B_k` covers the tube with its margins.
pub fn frame_fixture(spec: &TileSpec, seed: u64) -> Result<FrameFixture> {
    let lens = spec.level_lengths(64);
    let pad = &G::one() + &spec.max_len();
    let level = (1..64)
        .find(|&k| {
            let need = &(&lens[k][1] * &frame_margin()) + &pad;
            lens[k][0] >= need
        })
        .ok_or(Error::HierarchyExhausted(64))?;
    let line = |seed: u64| -> Result<LineTiling> {
        // Leftmost descent from the level-k B, then B ⊂ B (second), B ⊂ A,
        // A ⊂ B (first).
        let mut steps = Vec::new();
        let mut t = Tile::B;
        let mut rev = Vec::new();
        for _ in 0..level {
            let c = t.children()[0];
            rev.push(crate::tiling_line::Step { parent: t, index: 0 });
            t = c;
        }
        rev.reverse();
        steps.extend(rev);
        steps.push(crate::tiling_line::Step { parent: Tile::B, index: 1 });
        steps.push(crate::tiling_line::Step { parent: Tile::A, index: 0 });
        steps.push(crate::tiling_line::Step { parent: Tile::B, index: 0 });
        let address = HierarchicalAddress::new(t, steps, TailRule::new(seed))?;
        LineTiling::new(address, spec.clone(), G::zero())
    };
    let d = lens[level][1].clone();
    Ok(FrameFixture {
        tiling: ProductTiling::new(line(seed)?, line(seed.wrapping_add(1))?),
        level,
        s: [d.clone(), G::zero()],
        t: [G::zero(), d],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling_line::length_invariant;

    fn g(s: &str) -> G {
        s.parse().unwrap()
    }

    #[test]
    fn image_spec_invariant() {
        assert_eq!(length_invariant(&TileSpec::unit()), length_invariant(&rows_image_spec()));
    }

    #[test]
    fn rows_are_aligned() {
        let x = rows_sample(3, 5, &g("20"));
        assert_eq!(x, rows_sample(3, 5, &g("20")));
        for t in x.tiles_in(&Rect::square(&g("6"))).unwrap() {
            assert!(t.rect.x0.is_rational() && t.rect.x0.floor() == t.rect.x0.u().to_integer());
        }
        assert_eq!(distinct_offsets(&x, &g("2"), &g("1e-6")).unwrap(), 1);
    }

    #[test]
    fn equal_rows_have_one_offset() {
        let x = rows_sample(1, 1, &g("10"));
        let y = rows_conjugate(&x, &g("1e-8")).unwrap();
        let row = y.rows()[0].clone();
        let two = RowsTiling::new(0, vec![row.clone(), row], g("10")).unwrap();
        assert_eq!(distinct_offsets(&two, &g("1"), &g("1e-6")).unwrap(), 1);
    }

    #[test]
    fn open_disc_test() {
        let r = Rect::new(g("1"), g("2"), g("0"), g("1")).unwrap();
        let c = [g("0"), g("0")];
        assert!(!r.meets_open_disc(&c, &g("1")));
        assert!(r.meets_open_disc(&c, &g("3/2")));
    }

    #[test]
    fn tube_distance() {
        let tube = Polygon::tube(&[g("4"), g("0")], &[g("0"), g("8")], &frame_margin());
        let near = Rect::new(g("5"), g("6"), g("0"), g("1")).unwrap();
        assert_eq!(tube.distance_sq(&near), g("1"));
        let far = Rect::new(g("5"), g("6"), g("3"), g("4")).unwrap();
        assert_eq!(tube.distance_sq(&far), g("5"));
        let inside = Rect::new(g("1"), g("2"), g("0"), g("1/2")).unwrap();
        assert_eq!(tube.distance_sq(&inside), g("0"));
    }

    #[test]
    fn periodic_frame() {
        let x = PeriodicSquares::new(3, vec!["p".into(), "q".into(), "r".into()]).unwrap();
        let s = [g("9"), g("0")];
        let t = [g("0"), g("9")];
        assert!(frame_check(&x, &s, &t).unwrap().is_witness());
        assert!(!frame_check(&x, &[g("10"), g("0")], &t).unwrap().is_witness());
        assert_eq!(frame_check(&x, &s, &s).unwrap_err(), Error::DependentTranslations);
    }

    #[test]
    fn product_of_unit_tilings_is_grid() {
        let p = ProductTiling::new(LineTiling::unit(), LineTiling::unit());
        let tiles = p.tiles_in(&Rect::square(&g("1/2"))).unwrap();
        assert_eq!(tiles.len(), 4);
        for t in &tiles {
            assert_eq!(t.rect.area(), g("1"));
        }
        let patch = p.patch(&Rect::square(&g("3"))).unwrap();
        assert_eq!(patch.covered_area(), g("36"));
    }
}
