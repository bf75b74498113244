//! Two-dimensional substitutions: products of 1D rules and uniform block rules.

use std::collections::BTreeSet;

use crate::subst1d::{fibonacci, AbelianizationMatrix, Substitution1D};
use crate::symbolic::{Alphabet, Dimension, Pattern, Subshift, Symbol, Window};
use crate::{Error, Result};

const MAX_AREA: usize = 1 << 24;

/// 2D substitution systems that can be iterated letter by letter.
pub trait Substitution2D: Subshift {
    /// `ψ^k(letter)` as a block.
    fn iterate2d(&self, letter: Symbol, level: usize) -> Pattern;

    /// One application of the substitution to a block.
    fn substitute(&self, block: &Pattern) -> Result<Pattern>;

    fn is_primitive(&self) -> bool;

    /// Radius-`n` windows of the subshift.
    fn language2d(&self, radius: usize) -> Result<BTreeSet<Window>> {
        self.windows(radius)
    }
}

/// Factors of the given extent in level-k letters, iterating `k` until the
/// set stabilizes with every level-k letter at least as large as `extent`.
fn saturate(
    letters: Vec<Symbol>,
    expand: impl Fn(Symbol, usize) -> Pattern,
    extent: [usize; 2],
) -> Result<BTreeSet<Pattern>> {
    let [w, h] = extent;
    let mut prev: Option<(BTreeSet<Pattern>, bool)> = None;
    let mut level = 0;
    loop {
        let images: Vec<Pattern> = letters.iter().map(|&a| expand(a, level)).collect();
        let long_enough = images.iter().all(|p| p.fits(extent));
        let mut current = BTreeSet::new();
        for p in &images {
            current.extend(p.factors(w, h));
        }
        if let Some((p, true)) = &prev {
            if *p == current {
                return Ok(current);
            }
        }
        if images.iter().any(|p| p.area() > MAX_AREA) {
            return Err(Error::SaturationCapReached(level));
        }
        prev = Some((current, long_enough));
        level += 1;
    }
}

fn to_windows(radius: usize, patterns: BTreeSet<Pattern>) -> BTreeSet<Window> {
    patterns
        .into_iter()
        .map(|p| Window::new(radius, p).expect("window-sized factor"))
        .collect()
}

/// `ψ_h × ψ_v` acting on the product alphabet `𝒜_h × 𝒜_v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductSubstitution2D {
    horizontal: Substitution1D,
    vertical: Substitution1D,
    alphabet: Alphabet,
}

impl ProductSubstitution2D {
    pub fn new(horizontal: Substitution1D, vertical: Substitution1D) -> Self {
        let alphabet = Alphabet::product(horizontal.alphabet(), vertical.alphabet());
        ProductSubstitution2D {
            horizontal,
            vertical,
            alphabet,
        }
    }

    pub fn horizontal(&self) -> &Substitution1D {
        &self.horizontal
    }

    pub fn vertical(&self) -> &Substitution1D {
        &self.vertical
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Splits `u×v` into its horizontal and vertical components.
    pub fn pair(&self, letter: Symbol) -> (Symbol, Symbol) {
        let nv = self.vertical.alphabet().len();
        (
            Symbol((letter.index() / nv) as u16),
            Symbol((letter.index() % nv) as u16),
        )
    }

    pub fn join(&self, u: Symbol, v: Symbol) -> Symbol {
        Symbol((u.index() * self.vertical.alphabet().len() + v.index()) as u16)
    }

    /// The block `u ⊗ v` with cell `(c, r) = u_c × v_r`.
    pub fn tensor(&self, u: &[Symbol], v: &[Symbol]) -> Pattern {
        Pattern::from_fn(Dimension::Two, u.len(), v.len(), |c, r| self.join(u[c], v[r]))
    }

    pub fn rule(&self, letter: Symbol) -> Pattern {
        self.iterate2d(letter, 1)
    }

    /// Recursive substitution from the single cell; the test oracle for the
    /// product formula.
    pub fn iterate2d_recursive(&self, letter: Symbol, level: usize) -> Result<Pattern> {
        let mut p = Pattern::constant(Dimension::Two, 1, 1, letter);
        for _ in 0..level {
            p = self.substitute(&p)?;
        }
        Ok(p)
    }

    /// Windows by the product characterization: `u ⊗ v` with `u`, `v` in the
    /// 1D languages of length `2n + 1`.
    pub fn language2d_product(&self, radius: usize) -> Result<BTreeSet<Window>> {
        Ok(to_windows(radius, self.factors([2 * radius + 1; 2])?))
    }

    /// Windows by saturating over level-k letters.
    pub fn language2d_saturated(&self, radius: usize) -> Result<BTreeSet<Window>> {
        Ok(to_windows(radius, self.factors_independent([2 * radius + 1; 2])?))
    }
}

impl Subshift for ProductSubstitution2D {
    fn dimension(&self) -> Dimension {
        Dimension::Two
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn factors(&self, extent: [usize; 2]) -> Result<BTreeSet<Pattern>> {
        let us = self.horizontal.language(extent[0])?;
        let vs = self.vertical.language(extent[1])?;
        let mut out = BTreeSet::new();
        for u in &us {
            for v in &vs {
                out.insert(self.tensor(u.cells(), v.cells()));
            }
        }
        Ok(out)
    }

    fn admits(&self, pattern: &Pattern) -> Result<bool> {
        if pattern.dimension() != Dimension::Two {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: 1,
            });
        }
        let [w, h] = pattern.extent();
        let u: Vec<Symbol> = (0..w).map(|c| self.pair(pattern.get(c, 0)).0).collect();
        let v: Vec<Symbol> = (0..h).map(|r| self.pair(pattern.get(0, r)).1).collect();
        if self.tensor(&u, &v) != *pattern {
            return Ok(false);
        }
        Ok(self.horizontal.language(w)?.contains(&Pattern::word(u))
            && self.vertical.language(h)?.contains(&Pattern::word(v)))
    }

    fn factors_independent(&self, extent: [usize; 2]) -> Result<BTreeSet<Pattern>> {
        if !Substitution2D::is_primitive(self) {
            return Err(Error::SaturationNotGuaranteed);
        }
        saturate(self.alphabet.symbols().collect(), |a, k| self.iterate2d(a, k), extent)
    }
}

impl Substitution2D for ProductSubstitution2D {
    fn iterate2d(&self, letter: Symbol, level: usize) -> Pattern {
        let (u, v) = self.pair(letter);
        let hu = self.horizontal.expansion(u, level);
        let vv = self.vertical.expansion(v, level);
        self.tensor(&hu, &vv)
    }

    fn substitute(&self, block: &Pattern) -> Result<Pattern> {
        let [w, h] = block.extent();
        // Column widths from the bottom row, row heights from the left column.
        let widths: Vec<usize> = (0..w)
            .map(|c| self.horizontal.rule(self.pair(block.get(c, 0)).0).len())
            .collect();
        let heights: Vec<usize> = (0..h)
            .map(|r| self.vertical.rule(self.pair(block.get(0, r)).1).len())
            .collect();
        for r in 0..h {
            for c in 0..w {
                let (u, v) = self.pair(block.get(c, r));
                if self.horizontal.rule(u).len() != widths[c] || self.vertical.rule(v).len() != heights[r] {
                    return Err(Error::Inconsistent(format!("cell ({c}, {r})")));
                }
            }
        }
        let col_start: Vec<usize> = widths.iter().scan(0, |s, &x| { let o = *s; *s += x; Some(o) }).collect();
        let row_start: Vec<usize> = heights.iter().scan(0, |s, &x| { let o = *s; *s += x; Some(o) }).collect();
        let (tw, th) = (widths.iter().sum::<usize>(), heights.iter().sum::<usize>());
        let mut cells = vec![Symbol(0); tw * th];
        for r in 0..h {
            for c in 0..w {
                let img = self.rule_direct(block.get(c, r));
                for j in 0..img.height() {
                    for i in 0..img.width() {
                        cells[(row_start[r] + j) * tw + col_start[c] + i] = img.get(i, j);
                    }
                }
            }
        }
        Pattern::block(tw, th, cells)
    }

    fn is_primitive(&self) -> bool {
        self.horizontal.is_primitive() && self.vertical.is_primitive()
    }
}

impl ProductSubstitution2D {
    fn rule_direct(&self, letter: Symbol) -> Pattern {
        let (u, v) = self.pair(letter);
        self.tensor(self.horizontal.rule(u), self.vertical.rule(v))
    }
}

/// The product of the Fibonacci substitution with itself.
pub fn fibonacci_product() -> ProductSubstitution2D {
    ProductSubstitution2D::new(fibonacci(), fibonacci())
}

/// Each letter maps to a `q × q` block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSubstitution2D {
    alphabet: Alphabet,
    q: usize,
    rules: Vec<Pattern>,
}

impl BlockSubstitution2D {
    pub fn new(alphabet: Alphabet, q: usize, rules: Vec<Pattern>) -> Result<Self> {
        if q < 2 {
            return Err(Error::NoGrowth);
        }
        if rules.len() != alphabet.len() {
            let missing = alphabet.tokens().get(rules.len()).cloned().unwrap_or_default();
            return Err(Error::MissingRule(missing));
        }
        for p in &rules {
            if p.dimension() != Dimension::Two || p.extent() != [q, q] {
                return Err(Error::NonUniformBlock { expected: q });
            }
            if p.cells().iter().any(|s| !alphabet.contains(*s)) {
                return Err(Error::UnknownLetter(format!("#{}", p.cells()[0].0)));
            }
        }
        Ok(BlockSubstitution2D { alphabet, q, rules })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn rule(&self, letter: Symbol) -> &Pattern {
        &self.rules[letter.index()]
    }

    pub fn abelianization(&self) -> AbelianizationMatrix {
        let n = self.alphabet.len();
        let mut m = vec![vec![0u64; n]; n];
        for (j, p) in self.rules.iter().enumerate() {
            for s in p.cells() {
                m[s.index()][j] += 1;
            }
        }
        AbelianizationMatrix::from_entries(m)
    }
}

/// Chair orientation letters, in alphabet order.
pub const CHAIR_LETTERS: [&str; 4] = ["NE", "NW", "SE", "SW"];

/// The chair as a 2×2 arrow coding. A letter names the corner the chair's
/// notch opens away from. For orientation `o` the two cells on `o`'s
/// diagonal (`o`'s corner and the opposite one) carry `o`; each remaining
/// cell carries the direction of its own corner. Rows are listed bottom
/// first:
///
/// ```text
/// NE: [NE, SE], [NW, NE]      NW: [SW, NW], [NW, NE]
/// SE: [SW, SE], [SE, NE]      SW: [SW, SE], [NW, SW]
/// ```
pub fn chair() -> BlockSubstitution2D {
    let alphabet = Alphabet::new(CHAIR_LETTERS).expect("valid alphabet");
    // Corner direction of cells (0,0), (1,0), (0,1), (1,1).
    let corners = ["SW", "SE", "NW", "NE"];
    let opposite = |d: &str| match d {
        "NE" => "SW",
        "SW" => "NE",
        "NW" => "SE",
        _ => "NW",
    };
    let rules = CHAIR_LETTERS
        .iter()
        .map(|&o| {
            let cells = corners
                .iter()
                .map(|&d| {
                    let t = if d == o || d == opposite(o) { o } else { d };
                    alphabet.symbol(t).expect("chair letter")
                })
                .collect();
            Pattern::block(2, 2, cells).expect("2x2 block")
        })
        .collect();
    BlockSubstitution2D::new(alphabet, 2, rules).expect("valid chair rules")
}

impl Subshift for BlockSubstitution2D {
    fn dimension(&self) -> Dimension {
        Dimension::Two
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn factors(&self, extent: [usize; 2]) -> Result<BTreeSet<Pattern>> {
        if !Substitution2D::is_primitive(self) {
            return Err(Error::SaturationNotGuaranteed);
        }
        saturate(self.alphabet.symbols().collect(), |a, k| self.iterate2d(a, k), extent)
    }
}

impl Substitution2D for BlockSubstitution2D {
    fn iterate2d(&self, letter: Symbol, level: usize) -> Pattern {
        let mut p = Pattern::constant(Dimension::Two, 1, 1, letter);
        for _ in 0..level {
            p = self.substitute(&p).expect("uniform blocks always fit");
        }
        p
    }

    fn substitute(&self, block: &Pattern) -> Result<Pattern> {
        let q = self.q;
        let [w, h] = block.extent();
        Ok(Pattern::from_fn(Dimension::Two, w * q, h * q, |c, r| {
            self.rule(block.get(c / q, r / q)).get(c % q, r % q)
        }))
    }

    fn is_primitive(&self) -> bool {
        self.abelianization().positive_power().is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(p: &ProductSubstitution2D, pat: &Pattern) -> String {
        p.alphabet().render(pat)
    }

    #[test]
    fn product_rule_table() {
        let f = fibonacci_product();
        let al = f.alphabet().clone();
        let s = |t: &str| al.symbol(t).unwrap();
        assert_eq!(render(&f, &f.rule(s("a×a"))), "b×b");
        assert_eq!(render(&f, &f.rule(s("b×a"))), "a×b b×b");
        assert_eq!(render(&f, &f.rule(s("a×b"))), "b×b\nb×a");
        assert_eq!(render(&f, &f.rule(s("b×b"))), "a×b b×b\na×a b×a");
        let bb = f.rule(s("b×b"));
        assert_eq!(bb.get(0, 0), s("a×a"));
        assert_eq!(bb.get(1, 0), s("b×a"));
        assert_eq!(bb.get(0, 1), s("a×b"));
        assert_eq!(bb.get(1, 1), s("b×b"));
    }

    #[test]
    fn product_iteration_agrees_with_recursion() {
        let f = fibonacci_product();
        for l in f.alphabet().symbols() {
            for k in 0..5 {
                assert_eq!(f.iterate2d(l, k), f.iterate2d_recursive(l, k).unwrap());
            }
        }
        let bb = f.alphabet().symbol("b×b").unwrap();
        assert_eq!(f.iterate2d(bb, 3).extent(), [5, 5]);
    }

    #[test]
    fn product_languages() {
        let f = fibonacci_product();
        assert_eq!(f.language2d_product(0).unwrap().len(), 4);
        let one = f.language2d_product(1).unwrap();
        assert_eq!(one.len(), 16);
        assert_eq!(one, f.language2d_saturated(1).unwrap());
        let bb = f.alphabet().symbol("b×b").unwrap();
        let constant = Window::new(1, Pattern::constant(Dimension::Two, 3, 3, bb)).unwrap();
        assert!(!one.contains(&constant));
        let square = Pattern::constant(Dimension::Two, 2, 2, bb);
        assert!(f.factors([2, 2]).unwrap().contains(&square));
        assert!(f.admits(&square).unwrap());
    }

    #[test]
    fn substitute_rejects_misaligned_blocks() {
        let f = fibonacci_product();
        let al = f.alphabet();
        let cells = vec![al.symbol("a×a").unwrap(), al.symbol("b×b").unwrap()];
        let p = Pattern::block(1, 2, cells).unwrap();
        assert!(matches!(f.substitute(&p), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn chair_table() {
        let c = chair();
        let al = c.alphabet();
        let ne = al.symbol("NE").unwrap();
        assert_eq!(al.render(c.rule(ne)), "NW NE\nNE SE");
        for l in al.symbols() {
            assert_eq!(c.rule(l).extent(), [2, 2]);
            assert_eq!(c.rule(l).cells().iter().filter(|&&s| s == l).count(), 2);
            assert_eq!(c.iterate2d(l, 3).extent(), [8, 8]);
        }
        assert!(Substitution2D::is_primitive(&c));
    }

    #[test]
    fn block_rules_must_be_uniform() {
        let al = Alphabet::new(["x"]).unwrap();
        let p = Pattern::block(2, 1, vec![Symbol(0); 2]).unwrap();
        assert_eq!(
            BlockSubstitution2D::new(al, 2, vec![p]).unwrap_err(),
            Error::NonUniformBlock { expected: 2 }
        );
    }
}
