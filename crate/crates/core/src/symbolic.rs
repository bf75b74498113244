//! Alphabets, finite patterns, windows and periodic configurations.
//!
//! Coordinates are `[column, row]`: the first axis runs rightward and the
//! second upward, so row 0 of a block is its bottom row. One-dimensional
//! objects use only the first coordinate and have height 1.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_integer::Integer;

use crate::{Error, Result};

/// Separator used when forming product letters such as `a×b`.
pub const PRODUCT_SEPARATOR: char = '×';

/// A lattice vector; the second component is ignored in dimension 1.
pub type Point = [i64; 2];

/// Index of a letter within its [`Alphabet`]; ordering follows the alphabet.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Symbol(pub u16);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Dimension {
    One,
    Two,
}

impl Dimension {
    pub fn rank(self) -> usize {
        match self {
            Dimension::One => 1,
            Dimension::Two => 2,
        }
    }
}

/// A finite, nonempty, ordered set of opaque letter tokens.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Alphabet {
    tokens: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new<I, S>(letters: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut tokens = Vec::new();
        let mut index = HashMap::new();
        for token in letters {
            let token = token.into();
            if index.contains_key(&token) {
                return Err(Error::DuplicateLetter(token));
            }
            let sym = Symbol(
                u16::try_from(tokens.len()).map_err(|_| Error::Invalid("alphabet too large".into()))?,
            );
            index.insert(token.clone(), sym);
            tokens.push(token);
        }
        if tokens.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        Ok(Alphabet { tokens, index })
    }

    /// The product alphabet `h × v`, ordered lexicographically by `(h, v)`.
    pub fn product(horizontal: &Alphabet, vertical: &Alphabet) -> Alphabet {
        let tokens = horizontal
            .tokens
            .iter()
            .flat_map(|u| {
                vertical
                    .tokens
                    .iter()
                    .map(move |v| format!("{u}{PRODUCT_SEPARATOR}{v}"))
            })
            .collect::<Vec<_>>();
        Alphabet::new(tokens).expect("product of valid alphabets is valid")
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.tokens.len()).map(|i| Symbol(i as u16))
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token(&self, sym: Symbol) -> &str {
        &self.tokens[sym.index()]
    }

    pub fn symbol(&self, token: &str) -> Result<Symbol> {
        self.index
            .get(token)
            .copied()
            .ok_or_else(|| Error::UnknownLetter(token.to_string()))
    }

    pub fn contains(&self, sym: Symbol) -> bool {
        sym.index() < self.tokens.len()
    }

    fn compact(&self) -> bool {
        self.tokens.iter().all(|t| t.chars().count() == 1)
    }

    /// Parses a word: per character when every token is one character long,
    /// otherwise as whitespace-separated tokens.
    pub fn word(&self, text: &str) -> Result<Pattern> {
        let cells = if self.compact() && !text.contains(char::is_whitespace) {
            text.chars()
                .map(|c| self.symbol(&c.to_string()))
                .collect::<Result<Vec<_>>>()?
        } else {
            text.split_whitespace()
                .map(|t| self.symbol(t))
                .collect::<Result<Vec<_>>>()?
        };
        Pattern::try_word(cells)
    }

    pub fn render_symbols(&self, cells: &[Symbol]) -> String {
        let sep = if self.compact() { "" } else { " " };
        cells
            .iter()
            .map(|&s| self.token(s))
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Human-readable form: a word in 1D, rows top to bottom in 2D.
    pub fn render(&self, pattern: &Pattern) -> String {
        match pattern.dimension() {
            Dimension::One => self.render_symbols(pattern.cells()),
            Dimension::Two => (0..pattern.height())
                .rev()
                .map(|r| {
                    (0..pattern.width())
                        .map(|c| self.token(pattern.get(c, r)))
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect::<Vec<_>>()
                .join("\n"),
        }
    }
}

/// A finite word or rectangular block with every cell filled.
///
/// Cells are stored row-major from the bottom row; the derived ordering is
/// lexicographic on cells for patterns of equal shape.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Pattern {
    dim: Dimension,
    width: usize,
    height: usize,
    cells: Vec<Symbol>,
}

impl Pattern {
    /// A nonempty 1D word.
    pub fn word(cells: Vec<Symbol>) -> Pattern {
        Pattern::try_word(cells).expect("words are nonempty")
    }

    pub fn try_word(cells: Vec<Symbol>) -> Result<Pattern> {
        if cells.is_empty() {
            return Err(Error::BadExtent {
                width: 0,
                height: 1,
                cells: 0,
            });
        }
        Ok(Pattern {
            dim: Dimension::One,
            width: cells.len(),
            height: 1,
            cells,
        })
    }

    /// A 2D block; `cells` are row-major starting from the bottom row.
    pub fn block(width: usize, height: usize, cells: Vec<Symbol>) -> Result<Pattern> {
        if width == 0 || height == 0 || width * height != cells.len() {
            return Err(Error::BadExtent {
                width,
                height,
                cells: cells.len(),
            });
        }
        Ok(Pattern {
            dim: Dimension::Two,
            width,
            height,
            cells,
        })
    }

    pub fn from_fn(
        dim: Dimension,
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> Symbol,
    ) -> Pattern {
        let height = if dim == Dimension::One { 1 } else { height };
        assert!(width > 0 && height > 0, "patterns are nonempty");
        let mut cells = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                cells.push(f(c, r));
            }
        }
        Pattern {
            dim,
            width,
            height,
            cells,
        }
    }

    pub fn constant(dim: Dimension, width: usize, height: usize, sym: Symbol) -> Pattern {
        Pattern::from_fn(dim, width, height, |_, _| sym)
    }

    pub fn dimension(&self) -> Dimension {
        self.dim
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn extent(&self) -> [usize; 2] {
        [self.width, self.height]
    }

    pub fn area(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[Symbol] {
        &self.cells
    }

    pub fn get(&self, c: usize, r: usize) -> Symbol {
        self.cells[r * self.width + c]
    }

    /// The sub-pattern with lower-left corner `(c, r)` and the given extent.
    pub fn sub(&self, c: usize, r: usize, width: usize, height: usize) -> Pattern {
        debug_assert!(c + width <= self.width && r + height <= self.height);
        Pattern::from_fn(self.dim, width, height, |i, j| self.get(c + i, r + j))
    }

    pub fn row(&self, r: usize) -> Pattern {
        Pattern::word(self.cells[r * self.width..(r + 1) * self.width].to_vec())
    }

    pub fn column(&self, c: usize) -> Pattern {
        Pattern::word((0..self.height).map(|r| self.get(c, r)).collect())
    }

    pub fn letters(&self) -> BTreeSet<Symbol> {
        self.cells.iter().copied().collect()
    }

    /// All distinct sub-patterns of the given extent.
    pub fn factors(&self, width: usize, height: usize) -> BTreeSet<Pattern> {
        let height = if self.dim == Dimension::One { 1 } else { height };
        let mut out = BTreeSet::new();
        if width == 0 || height == 0 || width > self.width || height > self.height {
            return out;
        }
        for r in 0..=self.height - height {
            for c in 0..=self.width - width {
                out.insert(self.sub(c, r, width, height));
            }
        }
        out
    }

    pub fn fits(&self, extent: [usize; 2]) -> bool {
        extent[0] <= self.width && extent[1] <= self.height
    }
}

/// A pattern on the cube `[-n, n]^d`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Window {
    radius: usize,
    pattern: Pattern,
}

impl Window {
    pub fn new(radius: usize, pattern: Pattern) -> Result<Window> {
        let side = 2 * radius + 1;
        let ok = match pattern.dimension() {
            Dimension::One => pattern.width() == side,
            Dimension::Two => pattern.width() == side && pattern.height() == side,
        };
        if !ok {
            return Err(Error::BadExtent {
                width: pattern.width(),
                height: pattern.height(),
                cells: pattern.area(),
            });
        }
        Ok(Window { radius, pattern })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn dimension(&self) -> Dimension {
        self.pattern.dimension()
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn into_pattern(self) -> Pattern {
        self.pattern
    }

    /// The letter at `k` with `k` in `[-n, n]^d`.
    pub fn at(&self, k: Point) -> Symbol {
        let n = self.radius as i64;
        let r = if self.dimension() == Dimension::One { 0 } else { (k[1] + n) as usize };
        self.pattern.get((k[0] + n) as usize, r)
    }

    pub fn center(&self) -> Symbol {
        self.at([0, 0])
    }

    /// The concentric window of smaller radius.
    pub fn restrict(&self, radius: usize) -> Window {
        assert!(radius <= self.radius);
        let d = self.radius - radius;
        let side = 2 * radius + 1;
        let (r0, h) = match self.dimension() {
            Dimension::One => (0, 1),
            Dimension::Two => (d, side),
        };
        Window {
            radius,
            pattern: self.pattern.sub(d, r0, side, h),
        }
    }
}

/// A configuration that is periodic along both axes with the fundamental
/// domain's extent as periods.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PeriodicConfig {
    domain: Pattern,
}

impl PeriodicConfig {
    pub fn new(domain: Pattern) -> PeriodicConfig {
        PeriodicConfig { domain }
    }

    pub fn dimension(&self) -> Dimension {
        self.domain.dimension()
    }

    pub fn domain(&self) -> &Pattern {
        &self.domain
    }

    pub fn periods(&self) -> [usize; 2] {
        self.domain.extent()
    }

    pub fn at(&self, k: Point) -> Symbol {
        let c = k[0].rem_euclid(self.domain.width() as i64) as usize;
        let r = match self.dimension() {
            Dimension::One => 0,
            Dimension::Two => k[1].rem_euclid(self.domain.height() as i64) as usize,
        };
        self.domain.get(c, r)
    }

    /// `(shift(p, j))_k = p_{k+j}`.
    pub fn shift(&self, j: Point) -> PeriodicConfig {
        let [w, h] = self.domain.extent();
        PeriodicConfig {
            domain: Pattern::from_fn(self.dimension(), w, h, |c, r| {
                self.at([c as i64 + j[0], r as i64 + j[1]])
            }),
        }
    }

    /// The restriction of `shift(p, center)` to `[-n, n]^d`.
    pub fn project(&self, center: Point, radius: usize) -> Window {
        let n = radius as i64;
        let side = 2 * radius + 1;
        let pattern = Pattern::from_fn(self.dimension(), side, side, |c, r| {
            let dr = if self.dimension() == Dimension::One { 0 } else { r as i64 - n };
            self.at([center[0] + c as i64 - n, center[1] + dr])
        });
        Window { radius, pattern }
    }

    /// The block of the given extent with lower-left cell at `origin`.
    pub fn block_at(&self, origin: Point, extent: [usize; 2]) -> Pattern {
        Pattern::from_fn(self.dimension(), extent[0], extent[1], |c, r| {
            self.at([origin[0] + c as i64, origin[1] + r as i64])
        })
    }

    /// All factors of the given extent, one placement per cell of the
    /// fundamental domain (which suffices by periodicity).
    pub fn factors(&self, extent: [usize; 2]) -> BTreeSet<Pattern> {
        let [w, h] = self.domain.extent();
        let mut out = BTreeSet::new();
        for r in 0..h {
            for c in 0..w {
                out.insert(self.block_at([c as i64, r as i64], extent));
            }
        }
        out
    }

    /// Equality as functions on the lattice, independent of the chosen domain.
    pub fn same_config(&self, other: &PeriodicConfig) -> bool {
        if self.dimension() != other.dimension() {
            return false;
        }
        let [w1, h1] = self.periods();
        let [w2, h2] = other.periods();
        let (w, h) = (w1.lcm(&w2), h1.lcm(&h2));
        (0..h as i64).all(|r| (0..w as i64).all(|c| self.at([c, r]) == other.at([c, r])))
    }

    /// 1D only: the representative with minimal period and lexicographically
    /// least rotation.
    pub fn canonical_1d(&self) -> PeriodicConfig {
        assert_eq!(self.dimension(), Dimension::One);
        let cells = self.domain.cells();
        let n = cells.len();
        let period = (1..=n)
            .find(|&p| n.is_multiple_of(p) && (0..n).all(|i| cells[i] == cells[(i + p) % n]))
            .unwrap_or(n);
        let base = &cells[..period];
        let best = (0..period)
            .map(|s| (0..period).map(|i| base[(i + s) % period]).collect::<Vec<_>>())
            .min()
            .expect("nonempty");
        PeriodicConfig::new(Pattern::word(best))
    }
}

/// Shift of a periodic configuration.
pub fn shift(config: &PeriodicConfig, j: Point) -> PeriodicConfig {
    config.shift(j)
}

/// Projection `Π_n` of `shift(config, center)`.
pub fn project(config: &PeriodicConfig, center: Point, radius: usize) -> Window {
    config.project(center, radius)
}

/// The set of all radius-`n` windows fully contained in `pattern`.
pub fn subwindows(pattern: &Pattern, radius: usize) -> Result<BTreeSet<Window>> {
    let side = 2 * radius + 1;
    let height = match pattern.dimension() {
        Dimension::One => 1,
        Dimension::Two => side,
    };
    if pattern.width() < side || pattern.height() < height {
        return Err(Error::WindowExceedsPattern);
    }
    Ok(pattern
        .factors(side, height)
        .into_iter()
        .map(|p| Window { radius, pattern: p })
        .collect())
}

/// Offsets `[c, r]` at which `small` occurs in `big`, in lexicographic order.
pub fn contains(big: &Pattern, small: &Pattern) -> Vec<[usize; 2]> {
    let mut out = Vec::new();
    if big.dimension() != small.dimension() || !big.fits(small.extent()) {
        return out;
    }
    let [w, h] = small.extent();
    for c in 0..=big.width() - w {
        for r in 0..=big.height() - h {
            let hit = (0..h).all(|j| (0..w).all(|i| big.get(c + i, r + j) == small.get(i, j)));
            if hit {
                out.push([c, r]);
            }
        }
    }
    out
}

/// A shift-invariant set of configurations described by its finite factors.
pub trait Subshift {
    fn dimension(&self) -> Dimension;

    fn alphabet(&self) -> &Alphabet;

    /// All factors with the given extent (`[len, 1]` in dimension 1).
    fn factors(&self, extent: [usize; 2]) -> Result<BTreeSet<Pattern>>;

    /// Whether `pattern` is a factor of the subshift.
    fn admits(&self, pattern: &Pattern) -> Result<bool> {
        Ok(self.factors(pattern.extent())?.contains(pattern))
    }

    /// The same set as [`Subshift::factors`], computed by a separate
    /// enumeration path where one exists. Used to re-validate certificates.
    fn factors_independent(&self, extent: [usize; 2]) -> Result<BTreeSet<Pattern>> {
        self.factors(extent)
    }

    /// `Π_n[X]`: all radius-`n` windows.
    fn windows(&self, radius: usize) -> Result<BTreeSet<Window>> {
        let side = 2 * radius + 1;
        let extent = match self.dimension() {
            Dimension::One => [side, 1],
            Dimension::Two => [side, side],
        };
        Ok(self
            .factors(extent)?
            .into_iter()
            .map(|p| Window { radius, pattern: p })
            .collect())
    }
}

/// The orbit closure of a periodic configuration, viewed as a subshift.
#[derive(Clone, Debug)]
pub struct Orbit {
    config: PeriodicConfig,
    alphabet: Alphabet,
}

impl Orbit {
    pub fn new(config: PeriodicConfig, alphabet: Alphabet) -> Orbit {
        Orbit { config, alphabet }
    }

    pub fn config(&self) -> &PeriodicConfig {
        &self.config
    }
}

impl Subshift for Orbit {
    fn dimension(&self) -> Dimension {
        self.config.dimension()
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn factors(&self, extent: [usize; 2]) -> Result<BTreeSet<Pattern>> {
        Ok(self.config.factors(extent))
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rank())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    #[test]
    fn alphabet_rejects_duplicates_and_empty() {
        assert_eq!(
            Alphabet::new(["a", "a"]).unwrap_err(),
            Error::DuplicateLetter("a".into())
        );
        assert_eq!(
            Alphabet::new(Vec::<String>::new()).unwrap_err(),
            Error::EmptyAlphabet
        );
    }

    #[test]
    fn shift_of_ab_is_ba() {
        let a = ab();
        let p = PeriodicConfig::new(a.word("ab").unwrap());
        assert_eq!(p.shift([1, 0]).domain(), &a.word("ba").unwrap());
        assert_eq!(p.shift([0, 0]), p);
        assert!(p.shift([2, 0]).same_config(&p));
    }

    #[test]
    fn project_unrolls_period() {
        let a = ab();
        let p = PeriodicConfig::new(a.word("ab").unwrap());
        assert_eq!(p.project([0, 0], 1).pattern(), &a.word("bab").unwrap());
        assert_eq!(p.project([1, 0], 1).pattern(), &a.word("aba").unwrap());
        assert_eq!(p.project([1, 0], 0).center(), a.symbol("b").unwrap());
    }

    #[test]
    fn constant_config_projects_constant() {
        let x = Symbol(0);
        let p = PeriodicConfig::new(Pattern::constant(Dimension::Two, 2, 3, x));
        let w = p.project([5, -7], 2);
        assert!(w.pattern().cells().iter().all(|&s| s == x));
        assert_eq!(w.side(), 5);
    }

    #[test]
    fn subwindows_examples() {
        let a = ab();
        let w = subwindows(&a.word("abbab").unwrap(), 1).unwrap();
        let words: BTreeSet<String> = w.iter().map(|w| a.render(w.pattern())).collect();
        assert_eq!(
            words,
            ["abb", "bba", "bab"].iter().map(|s| s.to_string()).collect()
        );
        let letters = subwindows(&a.word("abbab").unwrap(), 0).unwrap();
        assert_eq!(letters.len(), 2);
        let block = Pattern::constant(Dimension::Two, 2, 2, Symbol(0));
        assert_eq!(subwindows(&block, 0).unwrap().len(), 1);
        assert_eq!(
            subwindows(&block, 1).unwrap_err(),
            Error::WindowExceedsPattern
        );
    }

    #[test]
    fn contains_examples() {
        let a = ab();
        let big = a.word("abbab").unwrap();
        assert_eq!(contains(&big, &a.word("bb").unwrap()), vec![[1, 0]]);
        assert_eq!(contains(&big, &big), vec![[0, 0]]);
        assert!(contains(&big, &a.word("aa").unwrap()).is_empty());
    }

    #[test]
    fn window_restriction_is_concentric() {
        let a = ab();
        let p = PeriodicConfig::new(a.word("aabab").unwrap());
        let w = p.project([3, 0], 2);
        assert_eq!(w.restrict(1), p.project([3, 0], 1));
        let q = PeriodicConfig::new(Pattern::block(2, 2, vec![Symbol(0), Symbol(1), Symbol(1), Symbol(0)]).unwrap());
        assert_eq!(q.project([1, 1], 2).restrict(1), q.project([1, 1], 1));
    }

    #[test]
    fn canonical_rotation_and_period() {
        let a = ab();
        let p = PeriodicConfig::new(a.word("baba").unwrap());
        assert_eq!(p.canonical_1d().domain(), &a.word("ab").unwrap());
    }

    #[test]
    fn product_alphabet_tokens() {
        let a = ab();
        let p = Alphabet::product(&a, &a);
        assert_eq!(p.tokens(), &["a×a", "a×b", "b×a", "b×b"]);
    }
}
