//! One-dimensional Fibonacci tilings with exact tile lengths.
//!
//! A tiling is stored as a tower of supertile memberships: the tile at the
//! origin, the level-1 supertile containing it, and so on. Finitely many
//! levels are explicit and the rest come from a seeded rule, so any finite
//! patch can be expanded on demand. All coordinates live in `Q[τ]`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::golden::GoldenNumber;
use crate::sliding_block::{detect_code_views, Detection};
use crate::{Error, Result};

/// Levels searched before giving up on locating a point in the hierarchy.
pub const MAX_LEVEL: usize = 512;

/// Default number of radii tried by [`tiling_metric`].
pub const DEFAULT_METRIC_CAP: usize = 20_000;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Tile {
    A,
    B,
}

impl Tile {
    /// Children under `A ↦ B`, `B ↦ AB`.
    pub fn children(self) -> &'static [Tile] {
        match self {
            Tile::A => &[Tile::B],
            Tile::B => &[Tile::A, Tile::B],
        }
    }

    pub fn index(self) -> usize {
        match self {
            Tile::A => 0,
            Tile::B => 1,
        }
    }
}

impl fmt::Display for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tile::A => "A",
            Tile::B => "B",
        })
    }
}

impl FromStr for Tile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Tile> {
        match s.trim() {
            "A" | "a" => Ok(Tile::A),
            "B" | "b" => Ok(Tile::B),
            other => Err(Error::UnknownLetter(other.to_string())),
        }
    }
}

/// Lengths of the two prototiles.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TileSpec {
    a: GoldenNumber,
    b: GoldenNumber,
}

impl TileSpec {
    pub fn new(a: GoldenNumber, b: GoldenNumber) -> Result<Self> {
        if !a.is_positive() || !b.is_positive() {
            return Err(Error::NonPositiveLength);
        }
        Ok(TileSpec { a, b })
    }

    /// Both tiles of length 1.
    pub fn unit() -> Self {
        TileSpec::new(GoldenNumber::one(), GoldenNumber::one()).expect("positive")
    }

    /// `|A| = 1`, `|B| = τ`.
    pub fn golden() -> Self {
        TileSpec::new(GoldenNumber::one(), GoldenNumber::tau()).expect("positive")
    }

    /// Tile lengths `(λ, λτ)` with the given length invariant.
    pub fn standard_for(invariant: &GoldenNumber) -> Result<Self> {
        let lambda = invariant / &length_invariant(&TileSpec::golden());
        TileSpec::new(lambda.clone(), &lambda * &GoldenNumber::tau())
    }

    pub fn a(&self) -> &GoldenNumber {
        &self.a
    }

    pub fn b(&self) -> &GoldenNumber {
        &self.b
    }

    pub fn len(&self, t: Tile) -> &GoldenNumber {
        match t {
            Tile::A => &self.a,
            Tile::B => &self.b,
        }
    }

    pub fn max_len(&self) -> GoldenNumber {
        self.a.clone().max(self.b.clone())
    }

    /// Whether `|B| = τ|A|`, so that substitution is scaling by `τ`.
    pub fn is_standard(&self) -> bool {
        self.b == &self.a * &GoldenNumber::tau()
    }

    pub fn scaled(&self, factor: &GoldenNumber) -> Result<Self> {
        TileSpec::new(&self.a * factor, &self.b * factor)
    }

    /// `ℓ_k(A), ℓ_k(B)` for `k = 0..=depth`.
    pub fn level_lengths(&self, depth: usize) -> Vec<[GoldenNumber; 2]> {
        let mut out = Vec::with_capacity(depth + 1);
        out.push([self.a.clone(), self.b.clone()]);
        for k in 0..depth {
            let [a, b] = &out[k];
            let next = [b.clone(), a + b];
            out.push(next);
        }
        out
    }
}

/// `ℓ_A + τ·ℓ_B`; equal invariants are the conjugacy condition.
pub fn length_invariant(spec: &TileSpec) -> GoldenNumber {
    &spec.a + &(&spec.b * &GoldenNumber::tau())
}

/// Membership of a level-k letter in its level-(k+1) parent.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Step {
    pub parent: Tile,
    pub index: usize,
}

impl Step {
    pub fn child(&self) -> Option<Tile> {
        self.parent.children().get(self.index).copied()
    }
}

/// Deterministic choice of parents above the explicit part of a tower.
/// Level `k` uses the generator keyed by `(seed, k − shift)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct TailRule {
    pub seed: u64,
    pub shift: i64,
}

impl TailRule {
    pub fn new(seed: u64) -> Self {
        TailRule { seed, shift: 0 }
    }

    pub fn step(&self, level: usize, letter: Tile) -> Step {
        match letter {
            Tile::A => Step {
                parent: Tile::B,
                index: 0,
            },
            Tile::B => {
                let key = level as i64 - self.shift;
                let mut seed = [0u8; 32];
                seed[..8].copy_from_slice(&self.seed.to_le_bytes());
                seed[8..16].copy_from_slice(&key.to_le_bytes());
                let mut rng = ChaCha8Rng::from_seed(seed);
                if rng.gen_bool(0.5) {
                    Step {
                        parent: Tile::A,
                        index: 0,
                    }
                } else {
                    Step {
                        parent: Tile::B,
                        index: 1,
                    }
                }
            }
        }
    }
}

/// The tile at the origin and its chain of supertiles.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct HierarchicalAddress {
    base: Tile,
    steps: Vec<Step>,
    tail: TailRule,
}

impl HierarchicalAddress {
    pub fn new(base: Tile, steps: Vec<Step>, tail: TailRule) -> Result<Self> {
        let mut t = base;
        for (k, s) in steps.iter().enumerate() {
            if s.child() != Some(t) {
                return Err(Error::Invalid(format!(
                    "level {k}: {t} is not child {} of {}",
                    s.index, s.parent
                )));
            }
            t = s.parent;
        }
        Ok(HierarchicalAddress { base, steps, tail })
    }

    pub fn base(&self) -> Tile {
        self.base
    }

    pub fn explicit_steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn tail(&self) -> TailRule {
        self.tail
    }

    /// Letters `T_0..=T_depth` and steps `0..depth`.
    pub fn tower(&self, depth: usize) -> (Vec<Tile>, Vec<Step>) {
        let mut letters = Vec::with_capacity(depth + 1);
        let mut steps = Vec::with_capacity(depth);
        letters.push(self.base);
        for k in 0..depth {
            let s = self.step_for(k, letters[k]);
            steps.push(s);
            letters.push(s.parent);
        }
        (letters, steps)
    }

    fn step_for(&self, k: usize, letter: Tile) -> Step {
        self.steps.get(k).copied().unwrap_or_else(|| self.tail.step(k, letter))
    }

    /// The same tower with explicit steps that merely repeat the tail removed.
    pub fn canonical(&self) -> HierarchicalAddress {
        let (letters, _) = self.tower(self.steps.len());
        let mut steps = self.steps.clone();
        while let Some(&last) = steps.last() {
            let k = steps.len() - 1;
            if self.tail.step(k, letters[k]) == last {
                steps.pop();
            } else {
                break;
            }
        }
        HierarchicalAddress {
            base: self.base,
            steps,
            tail: self.tail,
        }
    }
}

/// Sum of the lengths of the children preceding `step.index`.
fn preceding(step: &Step, lengths: &[GoldenNumber; 2]) -> GoldenNumber {
    step.parent.children()[..step.index]
        .iter()
        .fold(GoldenNumber::zero(), |acc, c| acc + &lengths[c.index()])
}

/// A Fibonacci tiling: a tower, tile lengths, and the distance from the left
/// end of the origin's tile to the origin.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LineTiling {
    address: HierarchicalAddress,
    spec: TileSpec,
    offset: GoldenNumber,
}

/// Sorted boundary coordinates within a horizon.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BoundarySet {
    points: Vec<GoldenNumber>,
}

impl BoundarySet {
    pub fn new(mut points: Vec<GoldenNumber>) -> Self {
        points.sort();
        points.dedup();
        BoundarySet { points }
    }

    pub fn points(&self) -> &[GoldenNumber] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points within `[-r, r]`.
    pub fn within(&self, r: &GoldenNumber) -> BoundarySet {
        let lo = -r;
        BoundarySet {
            points: self.points.iter().filter(|p| **p >= lo && *p <= r).cloned().collect(),
        }
    }

    pub fn gaps(&self) -> Vec<GoldenNumber> {
        self.points.windows(2).map(|w| &w[1] - &w[0]).collect()
    }
}

impl LineTiling {
    pub fn new(address: HierarchicalAddress, spec: TileSpec, offset: GoldenNumber) -> Result<Self> {
        if offset.is_negative() || offset >= *spec.len(address.base) {
            return Err(Error::Invalid(format!(
                "offset {offset} outside the base tile of length {}",
                spec.len(address.base)
            )));
        }
        Ok(LineTiling {
            address,
            spec,
            offset,
        })
    }

    /// A tiling with a seeded base tile, tail and rational offset.
    pub fn sample(spec: &TileSpec, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = if rng.gen_bool(0.5) { Tile::A } else { Tile::B };
        let frac = GoldenNumber::from_fracs(rng.gen_range(0..997), 997, 0, 1);
        let offset = &frac * spec.len(base);
        let address = HierarchicalAddress::new(base, Vec::new(), TailRule::new(rng.gen())).expect("empty tower");
        LineTiling::new(address, spec.clone(), offset).expect("offset in range")
    }

    /// Unit-length tiles with a boundary at the origin.
    pub fn unit() -> Self {
        let address = HierarchicalAddress::new(Tile::A, Vec::new(), TailRule::new(0)).expect("empty tower");
        LineTiling::new(address, TileSpec::unit(), GoldenNumber::zero()).expect("offset in range")
    }

    pub fn address(&self) -> &HierarchicalAddress {
        &self.address
    }

    pub fn spec(&self) -> &TileSpec {
        &self.spec
    }

    pub fn offset(&self) -> &GoldenNumber {
        &self.offset
    }

    pub fn base(&self) -> Tile {
        self.address.base
    }

    /// The same tower and offset with different tile lengths; fails if the
    /// offset does not fit the new base tile.
    pub fn with_spec(&self, spec: TileSpec) -> Result<Self> {
        LineTiling::new(self.address.clone(), spec, self.offset.clone())
    }

    /// Distance `p_k` from the left end of the level-k supertile to the origin.
    pub fn positions(&self, depth: usize) -> Vec<GoldenNumber> {
        let lens = self.spec.level_lengths(depth);
        let (_, steps) = self.address.tower(depth);
        let mut out = Vec::with_capacity(depth + 1);
        out.push(self.offset.clone());
        for k in 0..depth {
            let next = &out[k] + &preceding(&steps[k], &lens[k]);
            out.push(next);
        }
        out
    }

    /// `σ^α`: moves every tile by `+α`.
    pub fn translate(&self, alpha: &GoldenNumber) -> Result<Self> {
        reanchor(&self.address, &self.spec, &self.offset - alpha)
    }

    /// The lowest level whose supertile contains `[-h, h]`.
    fn covering_level(&self, h: &GoldenNumber) -> Result<(usize, Tile, GoldenNumber, Vec<[GoldenNumber; 2]>)> {
        let mut lens = self.spec.level_lengths(0);
        let mut p = self.offset.clone();
        let mut t = self.address.base;
        for k in 0..MAX_LEVEL {
            if k > 0 {
                grow(&mut lens);
            }
            let right = &lens[k][t.index()] - &p;
            if p >= *h && right >= *h {
                return Ok((k, t, p, lens));
            }
            let s = self.address.step_for(k, t);
            p += &preceding(&s, &lens[k]);
            t = s.parent;
        }
        Err(Error::HierarchyExhausted(MAX_LEVEL))
    }

    /// Tiles meeting `[-h, h]` as `(letter, left end)`, left to right.
    pub fn tiles_in(&self, h: &GoldenNumber) -> Result<Vec<(Tile, GoldenNumber)>> {
        let (k, t, p, lens) = self.covering_level(h)?;
        let mut out = Vec::new();
        emit_tiles(t, k, -p, &lens, &-h, h, &mut out);
        Ok(out)
    }

    /// `∂x ∩ [-h, h]`.
    pub fn boundary_points(&self, h: &GoldenNumber) -> Result<BoundarySet> {
        if !h.is_positive() {
            return Err(Error::Invalid("horizon must be positive".into()));
        }
        let tiles = self.tiles_in(h)?;
        let lo = -h;
        let mut points = Vec::with_capacity(tiles.len() + 1);
        for (t, left) in &tiles {
            if *left >= lo && left <= h {
                points.push(left.clone());
            }
            let right = left + self.spec.len(*t);
            if right >= lo && right <= *h {
                points.push(right);
            }
        }
        Ok(BoundarySet::new(points))
    }

    /// Letters of the tiles meeting `[-h, h]`.
    pub fn word(&self, h: &GoldenNumber) -> Result<Vec<Tile>> {
        Ok(self.tiles_in(h)?.into_iter().map(|(t, _)| t).collect())
    }

    /// Exact test that two values describe the same tiling: equal lengths,
    /// equal tail rule, and the same supertile at the same place at a level
    /// above every explicit step.
    pub fn same_tiling(&self, other: &LineTiling) -> bool {
        self.spec == other.spec && translation_residual(self, other) == Some(GoldenNumber::zero())
    }
}

fn emit_tiles(
    t: Tile,
    level: usize,
    left: GoldenNumber,
    lens: &[[GoldenNumber; 2]],
    lo: &GoldenNumber,
    hi: &GoldenNumber,
    out: &mut Vec<(Tile, GoldenNumber)>,
) {
    let right = &left + &lens[level][t.index()];
    if right < *lo || left > *hi {
        return;
    }
    if level == 0 {
        out.push((t, left));
        return;
    }
    let mut pos = left;
    for &c in t.children() {
        let next = &pos + &lens[level - 1][c.index()];
        emit_tiles(c, level - 1, pos, lens, lo, hi, out);
        pos = next;
    }
}

fn grow(lens: &mut Vec<[GoldenNumber; 2]>) {
    let [a, b] = lens.last().expect("level 0");
    let next = [b.clone(), a + b];
    lens.push(next);
}

/// Rebuilds the tower so that the origin, at distance `p0` from the left end
/// of the current base tile (possibly outside it), lies in the base tile.
fn reanchor(address: &HierarchicalAddress, spec: &TileSpec, p0: GoldenNumber) -> Result<LineTiling> {
    let mut lens = spec.level_lengths(0);
    let mut p = p0;
    let mut t = address.base;
    let mut k = 0;
    loop {
        if k > 0 {
            grow(&mut lens);
        }
        if !p.is_negative() && p < lens[k][t.index()] {
            break;
        }
        if k + 1 >= MAX_LEVEL {
            return Err(Error::HierarchyExhausted(MAX_LEVEL));
        }
        let s = address.step_for(k, t);
        p += &preceding(&s, &lens[k]);
        t = s.parent;
        k += 1;
    }
    let mut rev = Vec::with_capacity(k);
    for level in (0..k).rev() {
        let mut start = GoldenNumber::zero();
        let mut chosen = None;
        for (j, &c) in t.children().iter().enumerate() {
            let end = &start + &lens[level][c.index()];
            if p < end {
                chosen = Some((j, c));
                break;
            }
            start = end;
        }
        let (j, c) = chosen.expect("position inside parent");
        p -= &start;
        rev.push(Step { parent: t, index: j });
        t = c;
    }
    rev.reverse();
    if address.steps.len() > k {
        rev.extend_from_slice(&address.steps[k..]);
    }
    let address = HierarchicalAddress {
        base: t,
        steps: rev,
        tail: address.tail,
    };
    LineTiling::new(address, spec.clone(), p)
}

/// The exact `t` with `∂b = ∂a + t`, when both towers coincide (same tail
/// rule, same letters and steps) above some level; `None` otherwise.
pub fn translation_residual(a: &LineTiling, b: &LineTiling) -> Option<GoldenNumber> {
    if a.spec != b.spec || a.address.tail != b.address.tail {
        return None;
    }
    let start = a.address.steps.len().max(b.address.steps.len());
    let depth = start + 64;
    let (la, _) = a.address.tower(depth);
    let (lb, _) = b.address.tower(depth);
    let k = (start..=depth).find(|&k| la[k] == lb[k])?;
    let pa = a.positions(k);
    let pb = b.positions(k);
    Some(&pa[k] - &pb[k])
}

/// `S_k` for the directed Hausdorff scan: max over `a` of the distance to
/// the nearest point of `b`.
fn directed(a: &[GoldenNumber], b: &[GoldenNumber]) -> GoldenNumber {
    let mut best = GoldenNumber::zero();
    let mut j = 0;
    for x in a {
        while j + 1 < b.len() && b[j + 1] <= *x {
            j += 1;
        }
        let mut d = (x - &b[j]).abs();
        if j + 1 < b.len() {
            d = d.min((&b[j + 1] - x).abs());
        }
        if d > best {
            best = d;
        }
    }
    best
}

/// `max(d̃(A,B), d̃(B,A))` on sorted sets.
pub fn hausdorff(a: &BoundarySet, b: &BoundarySet) -> Result<GoldenNumber> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyHausdorff);
    }
    Ok(directed(&a.points, &b.points).max(directed(&b.points, &a.points)))
}

/// `m_H` of the closed `n`-balls, with the conventions used by the metric:
/// 0 if both are empty and `2n` if exactly one is.
pub fn ball_distance(a: &BoundarySet, b: &BoundarySet, n: u64) -> GoldenNumber {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => GoldenNumber::zero(),
        (false, false) => hausdorff(a, b).expect("nonempty"),
        _ => GoldenNumber::integer(2 * n as i64),
    }
}

/// Per-set data for computing `d̃(P ∩ B_n, Q ∩ B_n)` for many `n`.
struct DirectedScan {
    /// `|p|` sorted ascending, with the running max of full-set nearest
    /// distances.
    by_abs: Vec<(GoldenNumber, GoldenNumber)>,
    prefix_max: Vec<GoldenNumber>,
}

impl DirectedScan {
    fn new(p: &[GoldenNumber], q: &[GoldenNumber]) -> Self {
        let mut by_abs: Vec<(GoldenNumber, GoldenNumber)> = p
            .iter()
            .map(|x| (x.clone(), nearest(q, x, None).unwrap_or_else(GoldenNumber::zero)))
            .collect();
        by_abs.sort_by_key(|a| a.0.abs());
        let mut prefix_max = Vec::with_capacity(by_abs.len());
        let mut m = GoldenNumber::zero();
        for (_, d) in &by_abs {
            if *d > m {
                m = d.clone();
            }
            prefix_max.push(m.clone());
        }
        DirectedScan { by_abs, prefix_max }
    }

    /// `d̃(P ∩ [-n,n], Q ∩ [-n,n])` where interior points (`|p| ≤ n − L`)
    /// use the precomputed full-set nearest distances.
    fn eval(&self, q: &[GoldenNumber], n: &GoldenNumber, l: &GoldenNumber) -> GoldenNumber {
        let interior = n - l;
        let split = self.by_abs.partition_point(|(x, _)| x.abs() <= interior);
        let mut best = if split > 0 {
            self.prefix_max[split - 1].clone()
        } else {
            GoldenNumber::zero()
        };
        for (x, _) in &self.by_abs[split..] {
            if x.abs() > *n {
                break;
            }
            if let Some(d) = nearest(q, x, Some(n)) {
                if d > best {
                    best = d;
                }
            }
        }
        best
    }
}

/// Distance from `x` to the nearest point of sorted `q`, optionally
/// restricted to `[-n, n]`.
fn nearest(q: &[GoldenNumber], x: &GoldenNumber, n: Option<&GoldenNumber>) -> Option<GoldenNumber> {
    let i = q.partition_point(|y| y < x);
    let ok = |y: &GoldenNumber| n.is_none_or(|n| y.abs() <= *n);
    let below = q[..i].iter().rev().find(|y| ok(y)).map(|y| x - y);
    let above = q[i..].iter().find(|y| ok(y)).map(|y| y - x);
    match (below, above) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// `d(x,y) = sup_n (1/n) m_H[B_n(∂x), B_n(∂y)]` over integers `n ≥ 1`.
///
/// Once `n + 1 ≥ L` (the largest tile length) every later term is at most
/// `L/(n+1)`, so the scan stops when that falls to the running maximum.
pub fn tiling_metric(x: &LineTiling, y: &LineTiling) -> Result<GoldenNumber> {
    tiling_metric_capped(x, y, DEFAULT_METRIC_CAP)
}

pub fn tiling_metric_capped(x: &LineTiling, y: &LineTiling, cap: usize) -> Result<GoldenNumber> {
    if x.same_tiling(y) {
        return Ok(GoldenNumber::zero());
    }
    let l = x.spec.max_len().max(y.spec.max_len());
    let mut horizon = 64i64;
    let mut state: Option<(Vec<GoldenNumber>, Vec<GoldenNumber>, DirectedScan, DirectedScan)> = None;
    let mut best = GoldenNumber::zero();
    for n in 1..=cap as i64 {
        if state.is_none() || n > horizon {
            while n > horizon {
                horizon *= 2;
            }
            let h = GoldenNumber::integer(horizon);
            let px = x.boundary_points(&h)?.points;
            let py = y.boundary_points(&h)?.points;
            let sx = DirectedScan::new(&px, &py);
            let sy = DirectedScan::new(&py, &px);
            state = Some((px, py, sx, sy));
        }
        let (px, py, sx, sy) = state.as_ref().expect("initialized");
        let ng = GoldenNumber::integer(n);
        let nx = px.iter().any(|p| p.abs() <= ng);
        let ny = py.iter().any(|p| p.abs() <= ng);
        let m = match (nx, ny) {
            (false, false) => GoldenNumber::zero(),
            (true, true) => sx.eval(py, &ng, &l).max(sy.eval(px, &ng, &l)),
            _ => GoldenNumber::integer(2 * n),
        };
        let ratio = &m / &ng;
        if ratio > best {
            best = ratio;
        }
        let next = GoldenNumber::integer(n + 1);
        if next >= l && &l / &next <= best {
            return Ok(best);
        }
    }
    let next = GoldenNumber::integer(cap as i64 + 1);
    Err(Error::MetricNotCertified {
        cap,
        lower: best.to_string(),
        upper: best.max(&l / &next).to_string(),
    })
}

/// `Δ_k(T) = ℓ^Y_k(T) − ℓ^X_k(T)` for `k = 0..=depth`.
fn level_differences(x: &TileSpec, y: &TileSpec, depth: usize) -> Vec<[GoldenNumber; 2]> {
    let lx = x.level_lengths(depth);
    let ly = y.level_lengths(depth);
    lx.iter()
        .zip(&ly)
        .map(|(a, b)| [&b[0] - &a[0], &b[1] - &a[1]])
        .collect()
}

fn check_conjugate(x: &TileSpec, y: &TileSpec) -> Result<()> {
    if length_invariant(x) != length_invariant(y) {
        return Err(Error::NotConjugate);
    }
    Ok(())
}

/// `|c|τ/2` with `c = ℓ^X(B) − ℓ^Y(B)`: successive approximant offsets
/// differ by at most this times `τ^{-N}`.
pub fn correction_constant(x: &TileSpec, y: &TileSpec) -> GoldenNumber {
    let c = (x.b() - y.b()).abs();
    (&c * &GoldenNumber::tau()).half()
}

/// Bound `|c|τ^{3−N}/2` on the distance from the depth-`N` approximant to
/// the limit.
pub fn tail_bound(x: &TileSpec, y: &TileSpec, depth: usize) -> GoldenNumber {
    let c = (x.b() - y.b()).abs();
    (&c * &GoldenNumber::tau_pow(3 - depth as i64)).half()
}

/// Smallest depth whose tail bound is at most `eps`.
pub fn depth_for(x: &TileSpec, y: &TileSpec, eps: &GoldenNumber) -> Result<usize> {
    if !eps.is_positive() {
        return Err(Error::Invalid("precision must be positive".into()));
    }
    (0..MAX_LEVEL)
        .find(|&n| tail_bound(x, y, n) <= *eps)
        .ok_or(Error::HierarchyExhausted(MAX_LEVEL))
}

/// `δ_N`: the change of origin offset when the level-N supertile of `x` is
/// re-laid with `target` lengths about the same midpoint,
/// `δ_N = Δ_N(T_N)/2 − Σ_{k<N} [i_k = 1] Δ_k(A)`.
pub fn approximant_offset(x: &LineTiling, target: &TileSpec, depth: usize) -> Result<GoldenNumber> {
    Ok(approximant_offsets(x, target, depth)?.pop().expect("nonempty"))
}

/// `δ_0, …, δ_depth`.
pub fn approximant_offsets(x: &LineTiling, target: &TileSpec, depth: usize) -> Result<Vec<GoldenNumber>> {
    check_conjugate(&x.spec, target)?;
    let d = level_differences(&x.spec, target, depth);
    let (letters, steps) = x.address.tower(depth);
    let mut sum = GoldenNumber::zero();
    let mut out = Vec::with_capacity(depth + 1);
    for n in 0..=depth {
        out.push(&d[n][letters[n].index()].half() - &sum);
        if n < depth {
            sum += &preceding(&steps[n], &d[n]);
        }
    }
    Ok(out)
}

/// Exponential decay rate of nonzero corrections, `exp` of the
/// least-squares slope of `ln |δ_{N+1} − δ_N|` against `N`.
pub fn decay_ratio(corrections: &[(usize, GoldenNumber)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = corrections
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(n, c)| (*n as f64, c.abs().to_f64().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some((sxy / sxx).exp())
}

/// A conjugated tiling with the depth used and its certified error bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conjugate {
    pub tiling: LineTiling,
    pub depth: usize,
    pub error_bound: GoldenNumber,
}

/// The tiling over `target` with the same combinatorics as `x`, whose
/// level-N supertile shares its midpoint with that of `x`.
pub fn conjugate_at_depth(x: &LineTiling, target: &TileSpec, depth: usize) -> Result<LineTiling> {
    let delta = approximant_offset(x, target, depth)?;
    reanchor(&x.address, target, &x.offset + &delta)
}

/// The conjugacy with `N` chosen so the tail bound is at most `eps`.
pub fn conjugate(x: &LineTiling, target: &TileSpec, eps: &GoldenNumber) -> Result<Conjugate> {
    check_conjugate(&x.spec, target)?;
    let depth = depth_for(&x.spec, target, eps)?;
    Ok(Conjugate {
        tiling: conjugate_at_depth(x, target, depth)?,
        depth,
        error_bound: tail_bound(&x.spec, target, depth),
    })
}

/// Two tilings agreeing on `[-R, R]` whose images differ by a translation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonSbcWitness {
    pub radius: GoldenNumber,
    /// The level of the `B` supertile centred at the origin.
    pub level: usize,
    pub x: LineTiling,
    pub x_prime: LineTiling,
    /// `∂φ(x) = ∂φ(x′) + t` near the origin.
    pub t: GoldenNumber,
}

/// Builds `x`, `x′` sharing the level-K `B` supertile centred at the origin
/// (`K` minimal with `ℓ_K(B) ≥ 2R`), with `B ⊂ A ⊂ B` above it in `x` and
/// `B ⊂ B ⊂ B` (second child each time) in `x′`, and the same seeded tail.
pub fn non_sbc_witness(x_spec: &TileSpec, y_spec: &TileSpec, radius: &GoldenNumber, seed: u64) -> Result<NonSbcWitness> {
    check_conjugate(x_spec, y_spec)?;
    let two_r = radius + radius;
    let lens = x_spec.level_lengths(MAX_LEVEL);
    let level = (0..MAX_LEVEL)
        .find(|&k| lens[k][1] >= two_r)
        .ok_or(Error::HierarchyExhausted(MAX_LEVEL))?;
    let build = |above: [Step; 2]| -> Result<LineTiling> {
        let tower = HierarchicalAddress {
            base: Tile::B,
            steps: Vec::new(),
            tail: TailRule::new(seed),
        };
        // Descend from the level-K B to the tile containing its midpoint.
        let mid = lens[level][1].half();
        let mut explicit = descend(Tile::B, level, mid, &lens);
        let base = explicit.0;
        explicit.1.extend_from_slice(&above);
        let address = HierarchicalAddress::new(base, explicit.1, tower.tail)?;
        LineTiling::new(address, x_spec.clone(), explicit.2)
    };
    let x = build([
        Step { parent: Tile::A, index: 0 },
        Step { parent: Tile::B, index: 0 },
    ])?;
    let x_prime = build([
        Step { parent: Tile::B, index: 1 },
        Step { parent: Tile::B, index: 1 },
    ])?;
    let depth = level + 2;
    let t = &approximant_offset(&x_prime, y_spec, depth)? - &approximant_offset(&x, y_spec, depth)?;
    Ok(NonSbcWitness {
        radius: radius.clone(),
        level,
        x,
        x_prime,
        t,
    })
}

/// Steps from level `level` (letter `t`) down to the tile containing the
/// point at distance `p` from the supertile's left end.
fn descend(mut t: Tile, level: usize, mut p: GoldenNumber, lens: &[[GoldenNumber; 2]]) -> (Tile, Vec<Step>, GoldenNumber) {
    let mut rev = Vec::with_capacity(level);
    for l in (0..level).rev() {
        let mut start = GoldenNumber::zero();
        let mut pick = (t.children().len() - 1, *t.children().last().expect("children"));
        for (j, &c) in t.children().iter().enumerate() {
            let end = &start + &lens[l][c.index()];
            if p < end {
                pick = (j, c);
                break;
            }
            start = end;
        }
        p -= &start;
        rev.push(Step { parent: t, index: pick.0 });
        t = pick.1;
    }
    rev.reverse();
    (t, rev, p)
}

/// Discretized sliding-block test on witness pairs: keys are the exact
/// boundary sets of `x` within `[-r, r]`, values the boundary of the image
/// nearest the origin at the given depth. Returns one detection per radius.
pub fn witness_detection(
    x_spec: &TileSpec,
    y_spec: &TileSpec,
    radii: &[i64],
    seed: u64,
) -> Result<Vec<(i64, Detection<Vec<GoldenNumber>, GoldenNumber>)>> {
    let mut out = Vec::new();
    for &r in radii {
        let rg = GoldenNumber::integer(r);
        let w = non_sbc_witness(x_spec, y_spec, &rg, seed)?;
        let depth = w.level + 2;
        let mut samples = Vec::new();
        for x in [&w.x, &w.x_prime] {
            let key = x.boundary_points(&rg)?.points;
            let image = conjugate_at_depth(x, y_spec, depth)?;
            let nearest = image
                .boundary_points(&(&y_spec.max_len() + &GoldenNumber::one()))?
                .points
                .into_iter()
                .min_by(|a, b| a.abs().cmp(&b.abs()).then(a.cmp(b)))
                .ok_or(Error::EmptyHausdorff)?;
            samples.push((key, nearest));
        }
        out.push((r, detect_code_views(samples)));
    }
    Ok(out)
}

/// One rung of the modulus probe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeRung {
    pub radius: GoldenNumber,
    /// Largest image translation over the sampled pairs.
    pub max_translation: GoldenNumber,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulusProbe {
    pub rungs: Vec<ProbeRung>,
    /// Index of the first rung whose translations are all below `ε`.
    pub estimate: Option<usize>,
}

/// For `R = R₀τ^j`, samples pairs that agree on the supertile covering
/// `[-R, R]` and differ above it, and records the largest image
/// translation `|t|` (approximants at a depth whose tail bound is `ε/16`).
pub fn modulus_probe(
    x_spec: &TileSpec,
    y_spec: &TileSpec,
    eps: &GoldenNumber,
    r0: &GoldenNumber,
    rungs: usize,
    samples: usize,
    seed: u64,
) -> Result<ModulusProbe> {
    check_conjugate(x_spec, y_spec)?;
    let fine = eps / &GoldenNumber::integer(16);
    let extra = depth_for(x_spec, y_spec, &fine)?;
    let mut out = Vec::new();
    let mut estimate = None;
    for j in 0..rungs {
        let radius = r0 * &GoldenNumber::tau_pow(j as i64);
        let mut worst = GoldenNumber::zero();
        for s in 0..samples {
            let x = LineTiling::sample(x_spec, seed.wrapping_add(s as u64));
            let (k, _, _, _) = x.covering_level(&radius)?;
            let (_, steps) = x.address.tower(k);
            let other_tail = TailRule::new(x.address.tail.seed ^ 0x9e37_79b9_7f4a_7c15);
            let xp = LineTiling::new(
                HierarchicalAddress::new(x.base(), steps, other_tail)?,
                x_spec.clone(),
                x.offset.clone(),
            )?;
            let depth = k + extra;
            let t = (&approximant_offset(&xp, y_spec, depth)? - &approximant_offset(&x, y_spec, depth)?).abs();
            if t > worst {
                worst = t;
            }
        }
        if estimate.is_none() && worst < *eps {
            estimate = Some(j);
        }
        out.push(ProbeRung {
            radius,
            max_translation: worst,
        });
    }
    Ok(ModulusProbe { rungs: out, estimate })
}

/// `ψ` on a tiling with `|B| = τ|A|`: every tile is replaced by its image and
/// the result is scaled by `τ` about the origin.
pub fn substitute_standard(x: &LineTiling) -> Result<LineTiling> {
    if !x.spec.is_standard() {
        return Err(Error::Invalid("substitution needs |B| = tau |A|".into()));
    }
    let scaled = &x.offset * &GoldenNumber::tau();
    let t0 = x.base();
    let (index, base, offset) = match t0 {
        Tile::A => (0, Tile::B, scaled),
        Tile::B => {
            if scaled < *x.spec.a() {
                (0, Tile::A, scaled)
            } else {
                (1, Tile::B, &scaled - x.spec.a())
            }
        }
    };
    let mut steps = vec![Step { parent: t0, index }];
    steps.extend_from_slice(&x.address.steps);
    let tail = TailRule {
        seed: x.address.tail.seed,
        shift: x.address.tail.shift + 1,
    };
    LineTiling::new(HierarchicalAddress::new(base, steps, tail)?, x.spec.clone(), offset)
}

/// `ψ_Y = φ ∘ ψ ∘ φ⁻¹` for the standard spec with the same invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugatedSubstitution {
    pub standard: TileSpec,
    pub target: TileSpec,
    pub eps: GoldenNumber,
}

impl ConjugatedSubstitution {
    pub fn new(target: &TileSpec, eps: &GoldenNumber) -> Result<Self> {
        Ok(ConjugatedSubstitution {
            standard: TileSpec::standard_for(&length_invariant(target))?,
            target: target.clone(),
            eps: eps.clone(),
        })
    }

    pub fn apply(&self, y: &LineTiling) -> Result<LineTiling> {
        if y.spec != self.target {
            return Err(Error::Invalid("tiling spec differs from the target spec".into()));
        }
        let x = conjugate(y, &self.standard, &self.eps)?.tiling;
        let sx = substitute_standard(&x)?;
        Ok(conjugate(&sx, &self.target, &self.eps)?.tiling)
    }

    /// `|t|` with `ψ_Y(σ^α y) = σ^t σ^{ατ} ψ_Y(y)`, exactly.
    pub fn commutation_residual(&self, y: &LineTiling, alpha: &GoldenNumber) -> Result<GoldenNumber> {
        let lhs = self.apply(&y.translate(alpha)?)?;
        let rhs = self.apply(y)?.translate(&(alpha * &GoldenNumber::tau()))?;
        translation_residual(&lhs, &rhs)
            .map(|t| t.abs())
            .ok_or_else(|| Error::Invalid("images have different hierarchies".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GoldenNumber {
        s.parse().unwrap()
    }

    #[test]
    fn invariants() {
        assert_eq!(length_invariant(&TileSpec::golden()), g("2+tau"));
        let rows_x = TileSpec::unit();
        let rows_y = TileSpec::new(g("tau"), g("tau-1")).unwrap();
        assert_eq!(length_invariant(&rows_x), g("1+tau"));
        assert_eq!(length_invariant(&rows_x), length_invariant(&rows_y));
        let doubled = TileSpec::new(g("2"), g("2")).unwrap();
        assert_eq!(length_invariant(&doubled), g("2+2tau"));
        assert_eq!(TileSpec::new(g("0"), g("1")).unwrap_err(), Error::NonPositiveLength);
    }

    #[test]
    fn unit_boundaries() {
        let u = LineTiling::unit();
        let pts = u.boundary_points(&g("2")).unwrap();
        assert_eq!(pts.points(), &[g("-2"), g("-1"), g("0"), g("1"), g("2")]);
        let s = u.translate(&g("1/10")).unwrap();
        assert_eq!(s.boundary_points(&g("1")).unwrap().points(), &[g("-9/10"), g("1/10")]);
    }

    #[test]
    fn golden_prefix_sums() {
        let addr = HierarchicalAddress::new(Tile::A, Vec::new(), TailRule::new(3)).unwrap();
        let x = LineTiling::new(addr, TileSpec::golden(), GoldenNumber::zero()).unwrap();
        let pts = x.boundary_points(&g("3")).unwrap();
        assert!(pts.points().contains(&g("0")));
        assert!(pts.points().contains(&g("1")));
        assert!(pts.points().contains(&g("1+tau")));
        for gap in pts.gaps() {
            assert!(gap == g("1") || gap == g("tau"));
        }
    }

    #[test]
    fn hausdorff_examples() {
        let s = BoundarySet::new(vec![g("-1"), g("0"), g("1")]);
        let t = BoundarySet::new(vec![g("-9/10"), g("1/10")]);
        assert_eq!(hausdorff(&s, &s).unwrap(), GoldenNumber::zero());
        assert_eq!(hausdorff(&s, &t).unwrap(), g("9/10"));
        assert_eq!(
            hausdorff(&BoundarySet::new(vec![g("0")]), &BoundarySet::new(vec![g("3")])).unwrap(),
            g("3")
        );
        assert_eq!(hausdorff(&s, &BoundarySet::new(vec![])).unwrap_err(), Error::EmptyHausdorff);
    }

    #[test]
    fn unit_shift_metric() {
        let u = LineTiling::unit();
        let s = u.translate(&g("1/10")).unwrap();
        assert_eq!(tiling_metric(&u, &s).unwrap(), g("9/10"));
        assert_eq!(tiling_metric(&u, &u).unwrap(), GoldenNumber::zero());
    }

    #[test]
    fn translate_round_trip() {
        let x = LineTiling::sample(&TileSpec::golden(), 11);
        let y = x.translate(&g("7/3+2tau")).unwrap().translate(&g("-7/3-2tau")).unwrap();
        assert!(x.same_tiling(&y));
        assert_eq!(translation_residual(&x, &x.translate(&g("1/2")).unwrap()), Some(g("1/2")));
    }

    #[test]
    fn identity_conjugacy() {
        let x = LineTiling::sample(&TileSpec::golden(), 5);
        let c = conjugate(&x, &TileSpec::golden(), &g("1e-8")).unwrap();
        assert_eq!(c.tiling, x);
        assert_eq!(
            conjugate(&x, &TileSpec::unit(), &g("1e-8")).unwrap_err(),
            Error::NotConjugate
        );
    }

    #[test]
    fn substitution_scales_boundaries() {
        let x = LineTiling::sample(&TileSpec::golden(), 2);
        let y = substitute_standard(&x).unwrap();
        let bx = x.boundary_points(&g("10")).unwrap();
        let by = y.boundary_points(&(&g("10") * &GoldenNumber::tau())).unwrap();
        for p in bx.points() {
            assert!(by.points().contains(&(p * &GoldenNumber::tau())));
        }
    }
}
