//! Window shifts of finite type `X_n`, periodic points, and certificates that
//! a substitution subshift differs from its finite-type approximations.

use std::collections::{BTreeMap, BTreeSet};

use crate::subst2d::Substitution2D;
use crate::symbolic::{contains, Alphabet, Dimension, Pattern, PeriodicConfig, Point, Subshift, Symbol, Window};
use crate::{Error, Result};

/// `X_n`: configurations all of whose radius-`n` windows are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowSft {
    dim: Dimension,
    radius: usize,
    allowed: BTreeSet<Window>,
    alphabet: Alphabet,
}

impl WindowSft {
    pub fn new(alphabet: Alphabet, dim: Dimension, radius: usize, allowed: BTreeSet<Window>) -> Result<Self> {
        if allowed.is_empty() {
            return Err(Error::Invalid("allowed window set is empty".into()));
        }
        for w in &allowed {
            if w.radius() != radius || w.dimension() != dim {
                return Err(Error::Invalid("allowed windows must share radius and dimension".into()));
            }
            if w.pattern().cells().iter().any(|s| !alphabet.contains(*s)) {
                return Err(Error::IncompatibleAlphabets("window letter outside alphabet".into()));
            }
        }
        Ok(WindowSft {
            dim,
            radius,
            allowed,
            alphabet,
        })
    }

    /// The SFT generated by the radius-`n` windows of a periodic configuration.
    pub fn from_config(config: &PeriodicConfig, alphabet: Alphabet, radius: usize) -> Self {
        let allowed = domain_centers(config)
            .map(|c| config.project(c, radius))
            .collect();
        WindowSft {
            dim: config.dimension(),
            radius,
            allowed,
            alphabet,
        }
    }

    pub fn dimension(&self) -> Dimension {
        self.dim
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn allowed(&self) -> &BTreeSet<Window> {
        &self.allowed
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn allows(&self, w: &Window) -> bool {
        self.allowed.contains(w)
    }
}

/// `X_n` for the language of `system`.
pub fn sft_from_language(system: &dyn Subshift, radius: usize) -> Result<WindowSft> {
    WindowSft::new(
        system.alphabet().clone(),
        system.dimension(),
        radius,
        system.windows(radius)?,
    )
}

fn domain_centers(config: &PeriodicConfig) -> impl Iterator<Item = Point> {
    let [w, h] = config.periods();
    (0..h as i64).flat_map(move |r| (0..w as i64).map(move |c| [c, r]))
}

/// One line of a membership transcript.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipCheck {
    pub center: Point,
    pub window: Window,
    pub allowed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    pub transcript: Vec<MembershipCheck>,
}

impl Membership {
    pub fn first_failure(&self) -> Option<&MembershipCheck> {
        self.transcript.iter().find(|c| !c.allowed)
    }
}

/// Checks every radius-`n` window centred in one fundamental domain.
pub fn is_member(config: &PeriodicConfig, sft: &WindowSft) -> Result<Membership> {
    if config.dimension() != sft.dim {
        return Err(Error::DimensionMismatch {
            expected: sft.dim.rank(),
            found: config.dimension().rank(),
        });
    }
    let transcript: Vec<MembershipCheck> = domain_centers(config)
        .map(|center| {
            let window = config.project(center, sft.radius);
            let allowed = sft.allows(&window);
            MembershipCheck {
                center,
                window,
                allowed,
            }
        })
        .collect();
    Ok(Membership {
        member: transcript.iter().all(|c| c.allowed),
        transcript,
    })
}

/// Directed graph on allowed 1D windows; `w → w'` when `w` shifted by one
/// agrees with `w'` on the overlap.
#[derive(Clone, Debug)]
pub struct OverlapGraph {
    vertices: Vec<Window>,
    edges: Vec<Vec<usize>>,
}

impl OverlapGraph {
    pub fn new(sft: &WindowSft) -> Result<Self> {
        if sft.dim != Dimension::One {
            return Err(Error::Unsupported("overlap graphs are one-dimensional".into()));
        }
        let vertices: Vec<Window> = sft.allowed.iter().cloned().collect();
        let side = 2 * sft.radius + 1;
        let mut by_prefix: BTreeMap<&[Symbol], Vec<usize>> = BTreeMap::new();
        for (i, w) in vertices.iter().enumerate() {
            by_prefix.entry(&w.pattern().cells()[..side - 1]).or_default().push(i);
        }
        let edges = vertices
            .iter()
            .map(|w| by_prefix.get(&w.pattern().cells()[1..]).cloned().unwrap_or_default())
            .collect();
        Ok(OverlapGraph { vertices, edges })
    }

    pub fn vertices(&self) -> &[Window] {
        &self.vertices
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.edges[v]
    }
}

/// Periodic points of period at most `max_period`, one per shift orbit, in
/// canonical form (minimal period, least rotation), sorted.
pub fn periodic_points_1d(sft: &WindowSft, max_period: usize) -> Result<Vec<PeriodicConfig>> {
    let graph = OverlapGraph::new(sft)?;
    let mut found = BTreeSet::new();
    let mut path = Vec::new();
    for start in 0..graph.vertices.len() {
        path.push(start);
        cycles_from(&graph, start, max_period, &mut path, &mut found);
        path.pop();
    }
    Ok(found.into_iter().collect())
}

fn cycles_from(
    g: &OverlapGraph,
    start: usize,
    max_len: usize,
    path: &mut Vec<usize>,
    found: &mut BTreeSet<PeriodicConfig>,
) {
    let last = *path.last().expect("nonempty path");
    for &next in g.successors(last) {
        if next == start {
            let word = path.iter().map(|&v| g.vertices[v].center()).collect();
            found.insert(PeriodicConfig::new(Pattern::word(word)).canonical_1d());
        }
        // Only extend through vertices after `start` so each cycle is
        // enumerated from its smallest vertex.
        if path.len() < max_len && next > start {
            path.push(next);
            cycles_from(g, start, max_len, path, found);
            path.pop();
        }
    }
}

/// A periodic configuration built from a constant 2×2 block.
#[derive(Clone, Debug)]
pub struct ConstantBlockConfig {
    /// The letter of the constant block.
    pub letter: Symbol,
    /// The level-`witness_level` letter `witness_letter` contains the block
    /// at `witness_offset`.
    pub witness_letter: Symbol,
    pub witness_level: usize,
    pub witness_offset: [usize; 2],
    /// The fundamental domain is the level-`level` letter `letter`.
    pub level: usize,
    pub config: PeriodicConfig,
    pub membership: Membership,
}

pub const DEFAULT_BLOCK_SEARCH_DEPTH: usize = 6;

/// Finds a letter `ℓ` whose constant 2×2 block occurs in some level letter,
/// then returns the configuration repeating `ψ^k(ℓ)` with `k` minimal such
/// that both extents are at least `max(2n+1, 3)`, verified to lie in `X_n`.
pub fn constant_block_configuration<S: Substitution2D>(
    system: &S,
    radius: usize,
    search_depth: usize,
) -> Result<ConstantBlockConfig> {
    let (letter, witness_letter, witness_level, witness_offset) =
        find_constant_block(system, search_depth).ok_or(Error::NoConstantBlock(search_depth))?;
    let need = (2 * radius + 1).max(3);
    let mut level = 0;
    let domain = loop {
        let w = system.iterate2d(letter, level);
        if w.width() >= need && w.height() >= need {
            break w;
        }
        if w.area() > 1 << 22 {
            return Err(Error::NoConstantBlock(search_depth));
        }
        level += 1;
    };
    let config = PeriodicConfig::new(domain);
    let membership = is_member(&config, &sft_from_language(system, radius)?)?;
    if !membership.member {
        return Err(Error::NotMember(radius));
    }
    Ok(ConstantBlockConfig {
        letter,
        witness_letter,
        witness_level,
        witness_offset,
        level,
        config,
        membership,
    })
}

fn find_constant_block<S: Substitution2D>(system: &S, depth: usize) -> Option<(Symbol, Symbol, usize, [usize; 2])> {
    let letters: Vec<Symbol> = system.alphabet().symbols().collect();
    for k in 0..=depth {
        for &w in &letters {
            let p = system.iterate2d(w, k);
            for &l in &letters {
                let block = Pattern::constant(Dimension::Two, 2, 2, l);
                if let Some(&off) = contains(&p, &block).first() {
                    return Some((l, w, k, off));
                }
            }
        }
    }
    None
}

/// A window of a configuration that is absent from a subshift's language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refutation {
    /// The absent factor and the lattice position of its lower-left cell.
    pub factor: Pattern,
    pub origin: Point,
    /// The smallest window containing the factor, centred at `center`.
    pub center: Point,
    pub window: Window,
}

impl Refutation {
    pub fn radius(&self) -> usize {
        self.window.radius()
    }

    /// Word length in 1D, window radius in 2D.
    pub fn size(&self) -> usize {
        match self.factor.dimension() {
            Dimension::One => self.factor.width(),
            Dimension::Two => self.window.radius(),
        }
    }
}

/// Default refutation cap: eight times the largest domain extent.
pub fn default_m_cap(config: &PeriodicConfig) -> usize {
    8 * config.periods()[0].max(config.periods()[1])
}

/// Smallest refutation of `config` by the language of `system`. In 1D the
/// search runs over word lengths `1..=m_cap`; in 2D over window radii
/// `0..=m_cap`.
pub fn refute_membership(config: &PeriodicConfig, system: &dyn Subshift, m_cap: usize) -> Result<Refutation> {
    refute_with(config, m_cap, |extent| system.factors(extent))
}

fn refute_with(
    config: &PeriodicConfig,
    m_cap: usize,
    mut language: impl FnMut([usize; 2]) -> Result<BTreeSet<Pattern>>,
) -> Result<Refutation> {
    let dim = config.dimension();
    let sizes: Box<dyn Iterator<Item = usize>> = match dim {
        Dimension::One => Box::new(1..=m_cap),
        Dimension::Two => Box::new(0..=m_cap),
    };
    for m in sizes {
        let extent = match dim {
            Dimension::One => [m, 1],
            Dimension::Two => [2 * m + 1, 2 * m + 1],
        };
        let allowed = language(extent)?;
        for origin in domain_centers(config) {
            let factor = config.block_at(origin, extent);
            if !allowed.contains(&factor) {
                let (center, radius) = match dim {
                    Dimension::One => ([origin[0] + (m / 2) as i64, 0], m / 2),
                    Dimension::Two => ([origin[0] + m as i64, origin[1] + m as i64], m),
                };
                return Ok(Refutation {
                    factor,
                    origin,
                    center,
                    window: config.project(center, radius),
                });
            }
        }
    }
    Err(Error::NoRefutation(m_cap))
}

/// Finite evidence that `X_n` strictly contains the subshift: a periodic
/// member of `X_n` with a window outside the language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationCertificate {
    pub radius: usize,
    pub config: PeriodicConfig,
    pub transcript: Vec<MembershipCheck>,
    pub refutation: Refutation,
}

impl SeparationCertificate {
    /// Rechecks every claim against freshly enumerated languages, using the
    /// system's independent enumeration path.
    pub fn revalidate(&self, system: &dyn Subshift) -> Result<()> {
        let fail = |m: String| Err(Error::CertificateInvalid(m));
        let dim = self.config.dimension();
        if dim != system.dimension() {
            return fail("dimension mismatch".into());
        }
        let side = 2 * self.radius + 1;
        let extent = match dim {
            Dimension::One => [side, 1],
            Dimension::Two => [side, side],
        };
        let allowed = system.factors_independent(extent)?;
        let centers: BTreeSet<Point> = domain_centers(&self.config).collect();
        let covered: BTreeSet<Point> = self.transcript.iter().map(|c| c.center).collect();
        if centers != covered || self.transcript.len() != centers.len() {
            return fail("transcript does not cover the fundamental domain".into());
        }
        for check in &self.transcript {
            if self.config.project(check.center, self.radius) != check.window {
                return fail(format!("window at {:?} does not match the configuration", check.center));
            }
            if !check.allowed || !allowed.contains(check.window.pattern()) {
                return fail(format!("window at {:?} is not allowed", check.center));
            }
        }
        let r = &self.refutation;
        if r.window.radius() <= self.radius {
            return fail("refutation radius does not exceed n".into());
        }
        if self.config.block_at(r.origin, r.factor.extent()) != r.factor
            || self.config.project(r.center, r.window.radius()) != r.window
            || contains(r.window.pattern(), &r.factor).is_empty()
        {
            return fail("refutation does not match the configuration".into());
        }
        if system.factors_independent(r.factor.extent())?.contains(&r.factor) {
            return fail("refuting factor occurs in the language".into());
        }
        Ok(())
    }
}

/// Bundles membership of `config` in `X_n` with its refutation.
pub fn certify_separation(
    config: PeriodicConfig,
    system: &dyn Subshift,
    radius: usize,
    m_cap: usize,
) -> Result<SeparationCertificate> {
    let membership = is_member(&config, &sft_from_language(system, radius)?)?;
    if !membership.member {
        return Err(Error::NotMember(radius));
    }
    let refutation = refute_membership(&config, system, m_cap)?;
    Ok(SeparationCertificate {
        radius,
        config,
        transcript: membership.transcript,
        refutation,
    })
}

/// The constant-block pipeline: builds the periodic configuration and
/// certifies `X_n ≠ X`. `m_cap` defaults to [`default_m_cap`].
pub fn separation_certificate<S: Substitution2D>(
    system: &S,
    radius: usize,
    m_cap: Option<usize>,
) -> Result<SeparationCertificate> {
    let built = constant_block_configuration(system, radius, DEFAULT_BLOCK_SEARCH_DEPTH)?;
    let cap = m_cap.unwrap_or_else(|| default_m_cap(&built.config));
    certify_separation(built.config, system, radius, cap)
}

/// Per-candidate line of an aperiodicity report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicCandidate {
    pub period: usize,
    pub config: PeriodicConfig,
    /// Whether the candidate lies in `X_1`.
    pub passes_radius1: bool,
    /// The refuting word, when one was found within the cap.
    pub refutation: Option<Refutation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AperiodicityReport {
    pub period_cap: usize,
    pub m_cap: usize,
    pub candidates: Vec<PeriodicCandidate>,
}

impl AperiodicityReport {
    pub fn survivors(&self) -> Vec<&PeriodicCandidate> {
        self.candidates.iter().filter(|c| c.refutation.is_none()).collect()
    }

    pub fn all_refuted(&self) -> bool {
        self.candidates.iter().all(|c| c.refutation.is_some())
    }
}

/// Every periodic configuration of minimal period at most `period_cap`,
/// one per shift orbit, in canonical form.
pub fn necklaces(alphabet: &Alphabet, period_cap: usize) -> Vec<PeriodicConfig> {
    let k = alphabet.len();
    let mut out = Vec::new();
    for p in 1..=period_cap {
        let mut digits = vec![0usize; p];
        loop {
            let word: Vec<Symbol> = digits.iter().map(|&d| Symbol(d as u16)).collect();
            let c = PeriodicConfig::new(Pattern::word(word));
            if c.canonical_1d() == c {
                out.push(c);
            }
            let mut i = p;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < k {
                    break;
                }
                digits[i] = 0;
            }
            if digits.iter().all(|&d| d == 0) {
                break;
            }
        }
    }
    out
}

/// Refutes every periodic configuration of period at most `period_cap`
/// against the 1D language of `system`, by words of length at most `m_cap`.
pub fn aperiodicity_certificate_1d(
    system: &dyn Subshift,
    period_cap: usize,
    m_cap: usize,
) -> Result<AperiodicityReport> {
    if system.dimension() != Dimension::One {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 2,
        });
    }
    if period_cap == 0 {
        return Err(Error::Invalid("period cap must be >= 1".into()));
    }
    let x1 = sft_from_language(system, 1)?;
    let mut cache: BTreeMap<usize, BTreeSet<Pattern>> = BTreeMap::new();
    let mut candidates = Vec::new();
    for config in necklaces(system.alphabet(), period_cap) {
        let passes_radius1 = is_member(&config, &x1)?.member;
        let refutation = match refute_with(&config, m_cap, |extent| {
            if let Some(hit) = cache.get(&extent[0]) {
                return Ok(hit.clone());
            }
            let set = system.factors(extent)?;
            cache.insert(extent[0], set.clone());
            Ok(set)
        }) {
            Ok(r) => Some(r),
            Err(Error::NoRefutation(_)) => None,
            Err(e) => return Err(e),
        };
        candidates.push(PeriodicCandidate {
            period: config.periods()[0],
            config,
            passes_radius1,
            refutation,
        });
    }
    Ok(AperiodicityReport {
        period_cap,
        m_cap,
        candidates,
    })
}
