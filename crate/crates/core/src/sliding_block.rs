//! Block maps, sliding block codes, composition and detection.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;

use crate::finite_type::{is_member, sft_from_language, WindowSft};
use crate::symbolic::{Alphabet, Dimension, Pattern, PeriodicConfig, Point, Subshift, Symbol, Window};
use crate::{Error, Result};

/// `Φ: Π_n(X) → ℬ` given by an explicit table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMap {
    dim: Dimension,
    radius: usize,
    input: Alphabet,
    output: Alphabet,
    table: BTreeMap<Window, Symbol>,
}

impl BlockMap {
    pub fn new(
        input: Alphabet,
        output: Alphabet,
        dim: Dimension,
        radius: usize,
        table: BTreeMap<Window, Symbol>,
    ) -> Result<Self> {
        for (w, s) in &table {
            if w.radius() != radius || w.dimension() != dim {
                return Err(Error::Invalid("table windows must share radius and dimension".into()));
            }
            if w.pattern().cells().iter().any(|c| !input.contains(*c)) || !output.contains(*s) {
                return Err(Error::IncompatibleAlphabets("table entry outside alphabet".into()));
            }
        }
        Ok(BlockMap {
            dim,
            radius,
            input,
            output,
            table,
        })
    }

    /// The table `w ↦ f(w)` on the given windows.
    pub fn from_fn(
        input: Alphabet,
        output: Alphabet,
        dim: Dimension,
        radius: usize,
        domain: impl IntoIterator<Item = Window>,
        f: impl Fn(&Window) -> Symbol,
    ) -> Result<Self> {
        let table = domain.into_iter().map(|w| {
            let s = f(&w);
            (w, s)
        });
        BlockMap::new(input, output, dim, radius, table.collect())
    }

    /// A radius-0 map applying `f` letterwise.
    pub fn letterwise(input: Alphabet, output: Alphabet, dim: Dimension, f: impl Fn(Symbol) -> Symbol) -> Result<Self> {
        let domain: Vec<Window> = input
            .symbols()
            .map(|s| Window::new(0, Pattern::constant(dim, 1, 1, s)).expect("radius 0"))
            .collect();
        BlockMap::from_fn(input, output, dim, 0, domain, |w| f(w.center()))
    }

    pub fn identity(alphabet: Alphabet, dim: Dimension) -> Self {
        BlockMap::letterwise(alphabet.clone(), alphabet, dim, |s| s).expect("identity")
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn dimension(&self) -> Dimension {
        self.dim
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    pub fn table(&self) -> &BTreeMap<Window, Symbol> {
        &self.table
    }

    pub fn lookup(&self, w: &Window) -> Option<Symbol> {
        self.table.get(w).copied()
    }
}

/// `φ(x)_j = Φ(Π_n σ^j x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlidingBlockCode {
    map: BlockMap,
}

impl SlidingBlockCode {
    pub fn new(map: BlockMap) -> Self {
        SlidingBlockCode { map }
    }

    pub fn identity(alphabet: Alphabet, dim: Dimension) -> Self {
        SlidingBlockCode::new(BlockMap::identity(alphabet, dim))
    }

    pub fn radius(&self) -> usize {
        self.map.radius
    }

    pub fn map(&self) -> &BlockMap {
        &self.map
    }

    fn lookup_at(&self, w: Window, center: Point) -> Result<Symbol> {
        self.map.lookup(&w).ok_or_else(|| Error::OutsideDomain {
            window: self.map.input.render(w.pattern()),
            center,
        })
    }

    fn check_dim(&self, dim: Dimension) -> Result<()> {
        if dim != self.map.dim {
            return Err(Error::DimensionMismatch {
                expected: self.map.dim.rank(),
                found: dim.rank(),
            });
        }
        Ok(())
    }

    /// Image of a periodic configuration; periods are preserved.
    pub fn apply_periodic(&self, config: &PeriodicConfig) -> Result<PeriodicConfig> {
        self.check_dim(config.dimension())?;
        let [w, h] = config.periods();
        let mut cells = Vec::with_capacity(w * h);
        for r in 0..h as i64 {
            for c in 0..w as i64 {
                let center = [c, r];
                cells.push(self.lookup_at(config.project(center, self.radius()), center)?);
            }
        }
        Ok(PeriodicConfig::new(match config.dimension() {
            Dimension::One => Pattern::word(cells),
            Dimension::Two => Pattern::block(w, h, cells)?,
        }))
    }

    /// Image of a finite pattern, which loses `n` cells on every side.
    /// Centres in errors are cell coordinates of the input pattern.
    pub fn apply_pattern(&self, pattern: &Pattern) -> Result<Pattern> {
        self.check_dim(pattern.dimension())?;
        let n = self.radius();
        let side = 2 * n + 1;
        let two_d = pattern.dimension() == Dimension::Two;
        if pattern.width() < side || (two_d && pattern.height() < side) {
            return Err(Error::WindowExceedsPattern);
        }
        let w = pattern.width() - 2 * n;
        let h = if two_d { pattern.height() - 2 * n } else { 1 };
        let wh = if two_d { side } else { 1 };
        let mut cells = Vec::with_capacity(w * h);
        for r in 0..h {
            for c in 0..w {
                let win = Window::new(n, pattern.sub(c, r, side, wh))?;
                let center = [(c + n) as i64, if two_d { (r + n) as i64 } else { 0 }];
                cells.push(self.lookup_at(win, center)?);
            }
        }
        if two_d {
            Pattern::block(w, h, cells)
        } else {
            Pattern::try_word(cells)
        }
    }
}

fn check_chain(outer: &SlidingBlockCode, inner: &SlidingBlockCode) -> Result<()> {
    if inner.map.output != outer.map.input {
        return Err(Error::IncompatibleAlphabets(
            "inner output alphabet differs from outer input alphabet".into(),
        ));
    }
    if inner.map.dim != outer.map.dim {
        return Err(Error::DimensionMismatch {
            expected: inner.map.dim.rank(),
            found: outer.map.dim.rank(),
        });
    }
    Ok(())
}

/// `outer ∘ inner` as a code of size `m + m′` on the given radius-`(m+m′)`
/// windows. Windows whose inner image leaves the outer domain are dropped.
pub fn compose_on_domain(
    outer: &SlidingBlockCode,
    inner: &SlidingBlockCode,
    domain: impl IntoIterator<Item = Window>,
) -> Result<SlidingBlockCode> {
    check_chain(outer, inner)?;
    let k = outer.radius() + inner.radius();
    let mut table = BTreeMap::new();
    for w in domain {
        if w.radius() != k {
            return Err(Error::Invalid(format!("domain window radius must be {k}")));
        }
        let Ok(mid) = inner.apply_pattern(w.pattern()) else { continue };
        let mid = Window::new(outer.radius(), mid)?;
        if let Some(s) = outer.map.lookup(&mid) {
            table.insert(w, s);
        }
    }
    Ok(SlidingBlockCode::new(BlockMap::new(
        inner.map.input.clone(),
        outer.map.output.clone(),
        inner.map.dim,
        k,
        table,
    )?))
}

/// `outer ∘ inner` with size `m + m′`. In 1D the domain is every word of
/// length `2(m+m′)+1` whose inner windows are all in the inner table; in 2D
/// only radius 0 is supported here (use [`compose_on_domain`]).
pub fn compose(outer: &SlidingBlockCode, inner: &SlidingBlockCode) -> Result<SlidingBlockCode> {
    check_chain(outer, inner)?;
    let k = outer.radius() + inner.radius();
    let dim = inner.map.dim;
    let domain: Vec<Window> = match (dim, k) {
        (_, 0) => inner.map.table.keys().cloned().collect(),
        (Dimension::One, _) => {
            let m = inner.radius();
            let inner_side = 2 * m + 1;
            let side = 2 * k + 1;
            let mut by_prefix: BTreeMap<Vec<Symbol>, Vec<Symbol>> = BTreeMap::new();
            for w in inner.map.table.keys() {
                let cells = w.pattern().cells();
                by_prefix
                    .entry(cells[..inner_side - 1].to_vec())
                    .or_default()
                    .push(cells[inner_side - 1]);
            }
            let mut words: Vec<Vec<Symbol>> = inner.map.table.keys().map(|w| w.pattern().cells().to_vec()).collect();
            for _ in inner_side..side {
                let mut next = Vec::new();
                for w in &words {
                    if let Some(ext) = by_prefix.get(&w[w.len() + 1 - inner_side..]) {
                        for &s in ext {
                            let mut v = w.clone();
                            v.push(s);
                            next.push(v);
                        }
                    }
                }
                words = next;
            }
            words
                .into_iter()
                .map(|w| Window::new(k, Pattern::word(w)).expect("window side"))
                .collect()
        }
        (Dimension::Two, _) => {
            return Err(Error::Unsupported(
                "2D composition needs an explicit window domain".into(),
            ))
        }
    };
    compose_on_domain(outer, inner, domain)
}

/// Result of applying a code to a member of `Y_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionReport {
    pub output: PeriodicConfig,
    pub p: usize,
    pub m: usize,
    /// The largest `r ≤ p − m` with the output verified in `X_r`.
    pub verified_radius: Option<usize>,
}

/// Applies a size-`m` code to a configuration of `Y_p` (`p ≥ m`) and reports
/// the largest `r ≤ p − m` for which the image lies in `X_r` of `target`.
pub fn extend_to_finite_type(
    code: &SlidingBlockCode,
    p: usize,
    candidate: &PeriodicConfig,
    source: &WindowSft,
    target: &dyn Subshift,
) -> Result<ExtensionReport> {
    let m = code.radius();
    if p < m {
        return Err(Error::Invalid(format!("p = {p} is smaller than the code size {m}")));
    }
    if source.radius() != p {
        return Err(Error::Invalid("source SFT radius must equal p".into()));
    }
    if !is_member(candidate, source)?.member {
        return Err(Error::NotMember(p));
    }
    let output = code.apply_periodic(candidate)?;
    let mut verified_radius = None;
    for r in (0..=p - m).rev() {
        if is_member(&output, &sft_from_language(target, r)?)?.member {
            verified_radius = Some(r);
            break;
        }
    }
    Ok(ExtensionReport {
        output,
        p,
        m,
        verified_radius,
    })
}

/// Outcome of a sampling test for the sliding-block property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Detection<K, V> {
    Consistent { samples: usize },
    /// Samples `first` and `second` share `key` but have different values.
    Counterexample {
        key: K,
        first: (usize, V),
        second: (usize, V),
    },
}

impl<K, V> Detection<K, V> {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Detection::Consistent { .. })
    }
}

/// Checks that equal keys always come with equal values.
pub fn detect_code_views<K: Ord + Clone, V: Eq + Clone>(
    samples: impl IntoIterator<Item = (K, V)>,
) -> Detection<K, V> {
    let mut seen: BTreeMap<K, (usize, V)> = BTreeMap::new();
    let mut count = 0;
    for (i, (k, v)) in samples.into_iter().enumerate() {
        count += 1;
        match seen.get(&k) {
            Some((j, old)) if *old != v => {
                return Detection::Counterexample {
                    key: k,
                    first: (*j, old.clone()),
                    second: (i, v),
                }
            }
            Some(_) => {}
            None => {
                seen.insert(k, (i, v));
            }
        }
    }
    Detection::Consistent { samples: count }
}

/// Tests, on aligned periodic input/output pairs, whether equal radius-`n`
/// input windows always give equal output letters. Every position in a
/// common period of each pair is sampled.
pub fn detect_code(pairs: &[(PeriodicConfig, PeriodicConfig)], radius: usize) -> Result<Detection<Window, Symbol>> {
    let mut samples = Vec::new();
    for (x, y) in pairs {
        if x.dimension() != y.dimension() {
            return Err(Error::DimensionMismatch {
                expected: x.dimension().rank(),
                found: y.dimension().rank(),
            });
        }
        let [xw, xh] = x.periods();
        let [yw, yh] = y.periods();
        let (w, h) = (xw.lcm(&yw), xh.lcm(&yh));
        for r in 0..h as i64 {
            for c in 0..w as i64 {
                samples.push((x.project([c, r], radius), y.at([c, r])));
            }
        }
    }
    Ok(detect_code_views(samples))
}

/// Radius-`n` windows of a set of periodic configurations.
pub fn windows_of(configs: &[PeriodicConfig], radius: usize) -> BTreeSet<Window> {
    configs
        .iter()
        .flat_map(|c| {
            let [w, h] = c.periods();
            (0..h as i64).flat_map(move |r| (0..w as i64).map(move |col| c.project([col, r], radius)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subst1d::{fibonacci, Substitution1D};

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    fn swap() -> SlidingBlockCode {
        SlidingBlockCode::new(BlockMap::letterwise(ab(), ab(), Dimension::One, |s| Symbol(1 - s.0)).unwrap())
    }

    fn full_domain(radius: usize) -> Vec<Window> {
        let side = 2 * radius + 1;
        (0..1u32 << side)
            .map(|bits| {
                let w = (0..side).map(|i| Symbol(((bits >> i) & 1) as u16)).collect();
                Window::new(radius, Pattern::word(w)).unwrap()
            })
            .collect()
    }

    #[test]
    fn identity_and_swap() {
        let p = PeriodicConfig::new(ab().word("aabab").unwrap());
        let id = SlidingBlockCode::identity(ab(), Dimension::One);
        assert_eq!(id.apply_periodic(&p).unwrap(), p);
        let q = PeriodicConfig::new(ab().word("ab").unwrap());
        let s = swap().apply_periodic(&q).unwrap();
        assert_eq!(s.domain(), &ab().word("ba").unwrap());
        assert!(s.same_config(&q.shift([1, 0])));
    }

    #[test]
    fn margin_loss() {
        let code = SlidingBlockCode::new(
            BlockMap::from_fn(ab(), ab(), Dimension::One, 1, full_domain(1), |w| w.at([1, 0])).unwrap(),
        );
        let out = code.apply_pattern(&ab().word("abbab").unwrap()).unwrap();
        assert_eq!(ab().render(&out), "bab");
    }

    #[test]
    fn unknown_window_is_an_error() {
        let lone = Window::new(0, ab().word("a").unwrap()).unwrap();
        let code = SlidingBlockCode::new(
            BlockMap::new(ab(), ab(), Dimension::One, 0, [(lone, Symbol(0))].into()).unwrap(),
        );
        let err = code.apply_periodic(&PeriodicConfig::new(ab().word("ab").unwrap())).unwrap_err();
        assert_eq!(
            err,
            Error::OutsideDomain {
                window: "b".into(),
                center: [1, 0]
            }
        );
    }

    #[test]
    fn composition_sizes() {
        let id = SlidingBlockCode::identity(ab(), Dimension::One);
        let c = compose(&id, &id).unwrap();
        assert_eq!(c.radius(), 0);
        assert_eq!(c, id);
        let ss = compose(&swap(), &swap()).unwrap();
        assert_eq!(ss, id);

        let f1 = SlidingBlockCode::new(
            BlockMap::from_fn(ab(), ab(), Dimension::One, 1, full_domain(1), |w| {
                Symbol(w.at([-1, 0]).0 ^ w.at([1, 0]).0)
            })
            .unwrap(),
        );
        let f2 = SlidingBlockCode::new(
            BlockMap::from_fn(ab(), ab(), Dimension::One, 2, full_domain(2), |w| {
                Symbol(w.at([-2, 0]).0 & w.at([0, 0]).0)
            })
            .unwrap(),
        );
        let c = compose(&f2, &f1).unwrap();
        assert_eq!(c.radius(), 3);
        assert_eq!(c.map().table().len(), 128);
        let p = PeriodicConfig::new(ab().word("aababbbab").unwrap());
        assert_eq!(
            c.apply_periodic(&p).unwrap(),
            f2.apply_periodic(&f1.apply_periodic(&p).unwrap()).unwrap()
        );
    }

    #[test]
    fn extension_through_swap() {
        let f = fibonacci();
        let swapped = Substitution1D::from_tokens(ab(), &[("a", "ba"), ("b", "a")]).unwrap();
        let p = PeriodicConfig::new(ab().word("ab").unwrap());
        let y1 = sft_from_language(&f, 1).unwrap();
        let rep = extend_to_finite_type(&swap(), 1, &p, &y1, &swapped).unwrap();
        assert_eq!(rep.verified_radius, Some(1));
        let id = SlidingBlockCode::identity(ab(), Dimension::One);
        let rep = extend_to_finite_type(&id, 1, &p, &y1, &f).unwrap();
        assert_eq!(rep.verified_radius, Some(1));
        assert_eq!(rep.output, p);
    }

    #[test]
    fn detection() {
        let p = PeriodicConfig::new(ab().word("aab").unwrap());
        let q = swap().apply_periodic(&p).unwrap();
        assert!(detect_code(&[(p.clone(), q.clone())], 0).unwrap().is_consistent());
        // Output shifted by one is not a radius-0 code, but is radius 1.
        let r = q.shift([1, 0]);
        assert!(!detect_code(&[(p.clone(), r.clone())], 0).unwrap().is_consistent());
        assert!(detect_code(&[(p, r)], 1).unwrap().is_consistent());
        assert!(detect_code_views([(1, 2)]).is_consistent());
    }
}
