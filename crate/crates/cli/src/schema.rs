//! Rule files, tiling files and the JSON encodings shared by every report.
//!
//! Exact numbers are written as `{"u": "p/q", "v": "r/s", "decimal": "..."}`
//! meaning `u + v·tau`. On input a plain string such as `"3-tau"` or `"1/2"`
//! is accepted as well, and the decimal field is ignored.

use std::collections::BTreeMap;

use hierarch::finite_type::{MembershipCheck, Refutation, SeparationCertificate};
use hierarch::golden::parse_rational;
use hierarch::subst1d::Substitution1D;
use hierarch::subst2d::{BlockSubstitution2D, ProductSubstitution2D};
use hierarch::symbolic::Subshift;
use hierarch::tiling_line::{HierarchicalAddress, LineTiling, Step, TailRule, Tile, TileSpec};
use hierarch::tiling_plane::{PeriodicSquares, PlaneTile, PlaneTiling, ProductTiling, Rect, RowsTiling};
use hierarch::{Alphabet, Dimension, GoldenNumber, Pattern, PeriodicConfig, Symbol, Window};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::CliError;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum NumberDoc {
    Text(String),
    Pair {
        u: String,
        v: String,
        #[serde(default)]
        decimal: Option<String>,
    },
}

impl NumberDoc {
    pub fn value(&self) -> Result<GoldenNumber, CliError> {
        match self {
            NumberDoc::Text(t) => parse_number(t),
            NumberDoc::Pair { u, v, .. } => Ok(GoldenNumber::new(
                parse_rational(u).map_err(CliError::parse)?,
                parse_rational(v).map_err(CliError::parse)?,
            )),
        }
    }
}

pub fn parse_number(text: &str) -> Result<GoldenNumber, CliError> {
    text.trim()
        .parse::<GoldenNumber>()
        .map_err(|e| CliError::Parse(format!("bad number {text:?}: {e}")))
}

/// `"x,y"` as an exact vector.
pub fn parse_vector(text: &str) -> Result<[GoldenNumber; 2], CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::Parse(format!("expected \"x,y\", got {text:?}")));
    }
    Ok([parse_number(parts[0])?, parse_number(parts[1])?])
}

pub fn number(g: &GoldenNumber) -> Value {
    json!({
        "u": g.u().to_string(),
        "v": g.v().to_string(),
        "decimal": format!("{:.12}", g.to_f64()),
    })
}

fn number_doc(g: &GoldenNumber) -> NumberDoc {
    NumberDoc::Pair {
        u: g.u().to_string(),
        v: g.v().to_string(),
        decimal: Some(format!("{:.12}", g.to_f64())),
    }
}

pub fn vector(v: &[GoldenNumber; 2]) -> Value {
    json!([number(&v[0]), number(&v[1])])
}

// Rule files.

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rules1dDoc {
    pub alphabet: Vec<String>,
    pub rules: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RuleDoc {
    Substitution1d {
        alphabet: Vec<String>,
        rules: BTreeMap<String, Vec<String>>,
    },
    Product2d {
        horizontal: Rules1dDoc,
        vertical: Rules1dDoc,
    },
    /// Each image is listed row by row, top row first.
    Block2d {
        alphabet: Vec<String>,
        q: usize,
        rules: BTreeMap<String, Vec<Vec<String>>>,
    },
    Tiles {
        a: NumberDoc,
        b: NumberDoc,
    },
}

pub enum System {
    One(Substitution1D),
    Product(ProductSubstitution2D),
    Block(BlockSubstitution2D),
    Tiles(TileSpec),
}

impl System {
    pub fn subshift(&self) -> Result<&dyn Subshift, CliError> {
        match self {
            System::One(s) => Ok(s),
            System::Product(s) => Ok(s),
            System::Block(s) => Ok(s),
            System::Tiles(_) => Err(CliError::Usage("a tile-length file has no substitution rules".into())),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            System::One(_) => "substitution1d",
            System::Product(_) => "product2d",
            System::Block(_) => "block2d",
            System::Tiles(_) => "tiles",
        }
    }
}

fn build_1d(alphabet: &[String], rules: &BTreeMap<String, Vec<String>>) -> Result<Substitution1D, CliError> {
    let alpha = Alphabet::new(alphabet.iter().cloned()).map_err(CliError::parse)?;
    for key in rules.keys() {
        alpha.symbol(key).map_err(CliError::parse)?;
    }
    let images = alphabet
        .iter()
        .map(|l| {
            let image = rules.get(l).ok_or_else(|| CliError::Parse(format!("letter {l:?} has no rule")))?;
            image.iter().map(|t| alpha.symbol(t)).collect::<hierarch::Result<Vec<_>>>().map_err(CliError::parse)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Substitution1D::new(alpha, images).map_err(CliError::parse)
}

impl RuleDoc {
    pub fn build(&self) -> Result<System, CliError> {
        Ok(match self {
            RuleDoc::Substitution1d { alphabet, rules } => System::One(build_1d(alphabet, rules)?),
            RuleDoc::Product2d { horizontal, vertical } => System::Product(ProductSubstitution2D::new(
                build_1d(&horizontal.alphabet, &horizontal.rules)?,
                build_1d(&vertical.alphabet, &vertical.rules)?,
            )),
            RuleDoc::Block2d { alphabet, q, rules } => {
                let alpha = Alphabet::new(alphabet.iter().cloned()).map_err(CliError::parse)?;
                for key in rules.keys() {
                    alpha.symbol(key).map_err(CliError::parse)?;
                }
                let images = alphabet
                    .iter()
                    .map(|l| {
                        let rows = rules.get(l).ok_or_else(|| CliError::Parse(format!("letter {l:?} has no rule")))?;
                        block_from_rows(&alpha, rows)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                System::Block(BlockSubstitution2D::new(alpha, *q, images).map_err(CliError::parse)?)
            }
            RuleDoc::Tiles { a, b } => System::Tiles(TileSpec::new(a.value()?, b.value()?).map_err(CliError::parse)?),
        })
    }
}

fn block_from_rows(alpha: &Alphabet, rows: &[Vec<String>]) -> Result<Pattern, CliError> {
    let height = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    let mut cells = Vec::with_capacity(width * height);
    for row in rows.iter().rev() {
        if row.len() != width {
            return Err(CliError::Parse("block rows have different lengths".into()));
        }
        for t in row {
            cells.push(alpha.symbol(t).map_err(CliError::parse)?);
        }
    }
    Pattern::block(width, height, cells).map_err(CliError::parse)
}

// Patterns, windows and certificates.

/// A word as text in 1D, rows top first in 2D.
pub fn pattern(alpha: &Alphabet, p: &Pattern) -> Value {
    match p.dimension() {
        Dimension::One => Value::String(alpha.render(p)),
        Dimension::Two => Value::Array(
            (0..p.height())
                .rev()
                .map(|r| {
                    let row: Vec<&str> = (0..p.width()).map(|c| alpha.token(p.get(c, r))).collect();
                    Value::String(row.join(" "))
                })
                .collect(),
        ),
    }
}

pub fn read_pattern(alpha: &Alphabet, dim: Dimension, v: &Value) -> Result<Pattern, CliError> {
    let bad = || CliError::Parse("malformed pattern".into());
    match dim {
        Dimension::One => alpha.word(v.as_str().ok_or_else(bad)?).map_err(CliError::parse),
        Dimension::Two => {
            let rows = v
                .as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|r| Ok(r.as_str().ok_or_else(bad)?.split_whitespace().map(String::from).collect()))
                .collect::<Result<Vec<Vec<String>>, CliError>>()?;
            block_from_rows(alpha, &rows)
        }
    }
}

pub fn window(alpha: &Alphabet, w: &Window) -> Value {
    json!({ "radius": w.radius(), "pattern": pattern(alpha, w.pattern()) })
}

fn read_window(alpha: &Alphabet, dim: Dimension, v: &Value) -> Result<Window, CliError> {
    let radius = read_usize(&v["radius"])?;
    Window::new(radius, read_pattern(alpha, dim, &v["pattern"])?).map_err(CliError::parse)
}

pub fn config(alpha: &Alphabet, c: &PeriodicConfig) -> Value {
    json!({ "periods": c.periods(), "domain": pattern(alpha, c.domain()) })
}

fn read_config(alpha: &Alphabet, dim: Dimension, v: &Value) -> Result<PeriodicConfig, CliError> {
    Ok(PeriodicConfig::new(read_pattern(alpha, dim, &v["domain"])?))
}

fn read_usize(v: &Value) -> Result<usize, CliError> {
    v.as_u64().map(|n| n as usize).ok_or_else(|| CliError::Parse("expected a nonnegative integer".into()))
}

fn read_point(v: &Value) -> Result<[i64; 2], CliError> {
    let bad = || CliError::Parse("expected an integer pair".into());
    let a = v.as_array().ok_or_else(bad)?;
    if a.len() != 2 {
        return Err(bad());
    }
    Ok([a[0].as_i64().ok_or_else(bad)?, a[1].as_i64().ok_or_else(bad)?])
}

pub fn refutation(alpha: &Alphabet, r: &Refutation) -> Value {
    json!({
        "factor": pattern(alpha, &r.factor),
        "origin": r.origin,
        "center": r.center,
        "window": window(alpha, &r.window),
    })
}

pub fn read_refutation(alpha: &Alphabet, dim: Dimension, v: &Value) -> Result<Refutation, CliError> {
    Ok(Refutation {
        factor: read_pattern(alpha, dim, &v["factor"])?,
        origin: read_point(&v["origin"])?,
        center: read_point(&v["center"])?,
        window: read_window(alpha, dim, &v["window"])?,
    })
}

pub fn separation_doc(alpha: &Alphabet, c: &SeparationCertificate) -> Value {
    let transcript: Vec<Value> = c
        .transcript
        .iter()
        .map(|m| json!({ "center": m.center, "window": window(alpha, &m.window), "allowed": m.allowed }))
        .collect();
    json!({
        "radius": c.radius,
        "config": config(alpha, &c.config),
        "transcript": transcript,
        "refutation": refutation(alpha, &c.refutation),
    })
}

pub fn read_separation(alpha: &Alphabet, dim: Dimension, v: &Value) -> Result<SeparationCertificate, CliError> {
    let transcript = v["transcript"]
        .as_array()
        .ok_or_else(|| CliError::Parse("missing transcript".into()))?
        .iter()
        .map(|m| {
            Ok(MembershipCheck {
                center: read_point(&m["center"])?,
                window: read_window(alpha, dim, &m["window"])?,
                allowed: m["allowed"].as_bool().ok_or_else(|| CliError::Parse("missing allowed flag".into()))?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(SeparationCertificate {
        radius: read_usize(&v["radius"])?,
        config: read_config(alpha, dim, &v["config"])?,
        transcript,
        refutation: read_refutation(alpha, dim, &v["refutation"])?,
    })
}

pub fn read_periodic(alpha: &Alphabet, dim: Dimension, v: &Value) -> Result<PeriodicConfig, CliError> {
    read_config(alpha, dim, v)
}

pub fn symbol_counts(alpha: &Alphabet, p: &Pattern) -> Value {
    let mut counts: BTreeMap<String, usize> = alpha.tokens().iter().map(|t| (t.clone(), 0)).collect();
    for &s in p.cells() {
        *counts.get_mut(alpha.token(s)).expect("letter of the alphabet") += 1;
    }
    json!(counts)
}

pub fn letter(alpha: &Alphabet, text: &str) -> Result<Symbol, CliError> {
    alpha.symbol(text).map_err(CliError::parse)
}

// Tiling files.

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDoc {
    pub a: NumberDoc,
    pub b: NumberDoc,
}

impl SpecDoc {
    pub fn of(spec: &TileSpec) -> Self {
        SpecDoc {
            a: number_doc(spec.a()),
            b: number_doc(spec.b()),
        }
    }

    pub fn value(&self) -> Result<TileSpec, CliError> {
        TileSpec::new(self.a.value()?, self.b.value()?).map_err(CliError::parse)
    }
}

/// Level `level` of the tower: `letter` is child number `index` of the
/// level `level + 1` tile `parent`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct StepDoc {
    pub level: usize,
    pub letter: String,
    pub parent: String,
    pub index: usize,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TailDoc {
    pub seed: u64,
    pub shift: i64,
}

/// A line tiling: the origin lies `offset` to the right of the left end of
/// the base tile.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LineDoc {
    pub spec: SpecDoc,
    pub base: String,
    pub tower: Vec<StepDoc>,
    pub tail: TailDoc,
    pub offset: NumberDoc,
}

fn parse_tile(text: &str) -> Result<Tile, CliError> {
    text.parse::<Tile>().map_err(CliError::parse)
}

impl LineDoc {
    pub fn of(x: &LineTiling) -> Self {
        let a = x.address();
        let mut letter = a.base();
        let tower = a
            .explicit_steps()
            .iter()
            .enumerate()
            .map(|(level, s)| {
                let doc = StepDoc {
                    level,
                    letter: letter.to_string(),
                    parent: s.parent.to_string(),
                    index: s.index,
                };
                letter = s.parent;
                doc
            })
            .collect();
        LineDoc {
            spec: SpecDoc::of(x.spec()),
            base: a.base().to_string(),
            tower,
            tail: TailDoc {
                seed: a.tail().seed,
                shift: a.tail().shift,
            },
            offset: number_doc(x.offset()),
        }
    }

    pub fn value(&self) -> Result<LineTiling, CliError> {
        let base = parse_tile(&self.base)?;
        let mut letter = base;
        let mut steps = Vec::with_capacity(self.tower.len());
        for (k, s) in self.tower.iter().enumerate() {
            if s.level != k {
                return Err(CliError::Parse(format!("tower entry {k} has level {}", s.level)));
            }
            if parse_tile(&s.letter)? != letter {
                return Err(CliError::Parse(format!("tower level {k} letter does not match the level below")));
            }
            let step = Step {
                parent: parse_tile(&s.parent)?,
                index: s.index,
            };
            if step.child() != Some(letter) {
                return Err(CliError::Parse(format!("tower level {k}: {} is not child {} of {}", s.letter, s.index, s.parent)));
            }
            letter = step.parent;
            steps.push(step);
        }
        let tail = TailRule {
            seed: self.tail.seed,
            shift: self.tail.shift,
        };
        let address = HierarchicalAddress::new(base, steps, tail).map_err(CliError::parse)?;
        LineTiling::new(address, self.spec.value()?, self.offset.value()?).map_err(CliError::parse)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TilingDoc {
    Line(LineDoc),
    Product {
        horizontal: LineDoc,
        vertical: LineDoc,
    },
    /// Row `first_row + i` is `rows[i]`; tiles are listed out to `horizon`.
    Rows {
        first_row: i64,
        horizon: NumberDoc,
        rows: Vec<LineDoc>,
    },
    /// Unit squares; `labels` fills the period block bottom row first.
    PeriodicSquares { width: usize, labels: Vec<String> },
}

pub enum Tiling {
    Line(LineTiling),
    Plane(Box<dyn PlaneTiling>),
}

impl TilingDoc {
    pub fn product(p: &ProductTiling) -> Self {
        TilingDoc::Product {
            horizontal: LineDoc::of(&p.horizontal),
            vertical: LineDoc::of(&p.vertical),
        }
    }

    pub fn rows(r: &RowsTiling) -> Self {
        TilingDoc::Rows {
            first_row: r.first_row(),
            horizon: number_doc(r.horizon()),
            rows: r.rows().iter().map(LineDoc::of).collect(),
        }
    }

    pub fn value(&self) -> Result<Tiling, CliError> {
        Ok(match self {
            TilingDoc::Line(l) => Tiling::Line(l.value()?),
            TilingDoc::Product { horizontal, vertical } => {
                Tiling::Plane(Box::new(ProductTiling::new(horizontal.value()?, vertical.value()?)))
            }
            TilingDoc::Rows { first_row, horizon, rows } => {
                let rows = rows.iter().map(LineDoc::value).collect::<Result<Vec<_>, _>>()?;
                Tiling::Plane(Box::new(
                    RowsTiling::new(*first_row, rows, horizon.value()?).map_err(CliError::parse)?,
                ))
            }
            TilingDoc::PeriodicSquares { width, labels } => {
                Tiling::Plane(Box::new(PeriodicSquares::new(*width, labels.clone()).map_err(CliError::parse)?))
            }
        })
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("tiling documents serialize")
    }
}

pub fn rect(r: &Rect) -> Value {
    json!({ "x0": number(&r.x0), "x1": number(&r.x1), "y0": number(&r.y0), "y1": number(&r.y1) })
}

pub fn plane_tile(t: &PlaneTile) -> Value {
    json!({ "label": t.label, "rect": rect(&t.rect) })
}
