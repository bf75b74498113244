use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use hierarch::finite_type::{
    aperiodicity_certificate_1d, certify_separation, constant_block_configuration, default_m_cap, is_member,
    necklaces, sft_from_language, DEFAULT_BLOCK_SEARCH_DEPTH,
};
use hierarch::subst1d::Substitution1D;
use hierarch::subst2d::{fibonacci_product, Substitution2D};
use hierarch::symbolic::{contains, Subshift};
use hierarch::tiling_line::{
    conjugate as conjugate_line, conjugate_at_depth, length_invariant, non_sbc_witness, tiling_metric_capped,
    translation_residual, LineTiling, TileSpec, DEFAULT_METRIC_CAP,
};
use hierarch::tiling_plane::{
    frame_check, frame_fixture, neighborhood_census, rows_conjugate, rows_sample, distinct_offsets, FrameOutcome,
    PlaneTiling, ProductTiling, Rect,
};
use hierarch::{Alphabet, Dimension, Error, GoldenNumber, Pattern, PeriodicConfig, Symbol};
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::report::{read_input, sha256_hex, Report};
use crate::schema::*;
use crate::svg::{self, Box2, Cell, Outline};
use crate::{CliError, Side, TilingKind};

type G = GoldenNumber;

/// Largest patch `substitute` will build.
const MAX_CELLS: u128 = 1 << 20;

fn load_rules(report: &mut Report, role: &str, path: &str) -> Result<System, CliError> {
    let text = read_input(report, role, path)?;
    let doc: RuleDoc = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{path}: {e}")))?;
    doc.build()
}

/// A tiles file, or an inline `"a,b"` pair.
fn load_spec(report: &mut Report, role: &str, text: &str) -> Result<TileSpec, CliError> {
    if Path::new(text).is_file() {
        return match load_rules(report, role, text)? {
            System::Tiles(s) => Ok(s),
            other => Err(CliError::Usage(format!("{text} is a {} file, not tile lengths", other.kind()))),
        };
    }
    let [a, b] = parse_vector(text)?;
    Ok(TileSpec::new(a, b)?)
}

fn load_tiling(report: &mut Report, role: &str, path: &str) -> Result<Tiling, CliError> {
    let text = read_input(report, role, path)?;
    let doc: TilingDoc = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{path}: {e}")))?;
    doc.value()
}

fn load_line(report: &mut Report, role: &str, path: &str) -> Result<LineTiling, CliError> {
    match load_tiling(report, role, path)? {
        Tiling::Line(x) => Ok(x),
        Tiling::Plane(_) => Err(CliError::Usage(format!("{path} is a plane tiling, expected a line tiling"))),
    }
}

fn positive(text: &str, what: &str) -> Result<G, CliError> {
    let g = parse_number(text)?;
    if !g.is_positive() {
        return Err(CliError::Usage(format!("{what} must be positive")));
    }
    Ok(g)
}

fn write_svg(path: &str, text: &str) -> Result<String, CliError> {
    fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {path}: {e}")))?;
    Ok(sha256_hex(text.as_bytes()))
}

// Substitutions.

/// Level-`j` supertiles inside the level-`level` letter, as `(start, len)`.
fn intervals(s: &Substitution1D, letter: Symbol, level: usize, j: usize) -> Vec<(usize, usize)> {
    let mut pos = 0;
    s.expansion(letter, level - j)
        .iter()
        .map(|&c| {
            let n = s.expansion(c, j).len();
            let out = (pos, n);
            pos += n;
            out
        })
        .collect()
}

fn grid(cols: &[(usize, usize)], rows: &[(usize, usize)]) -> Vec<Box2> {
    rows.iter()
        .flat_map(|&(y, h)| {
            cols.iter().map(move |&(x, w)| Box2 {
                x: x as f64,
                y: y as f64,
                w: w as f64,
                h: h as f64,
            })
        })
        .collect()
}

fn uniform(n: usize, q: usize) -> Vec<(usize, usize)> {
    (0..n / q).map(|i| (i * q, q)).collect()
}

fn check_cells(level: usize, cells: u128) -> Result<(), CliError> {
    if cells > MAX_CELLS {
        return Err(CliError::Usage(format!(
            "invalid level {level}: the patch would have {cells} cells (limit {MAX_CELLS})"
        )));
    }
    Ok(())
}

fn big_to_u128(n: &impl ToPrimitive) -> u128 {
    n.to_u128().unwrap_or(u128::MAX)
}

pub fn substitute(rules: &str, letter_text: &str, level: usize, render: Option<&str>) -> Result<Report, CliError> {
    let mut r = Report::new("substitute");
    r.arg("rules", rules).arg("letter", letter_text).arg("level", level).arg("render", render);
    let sys = load_rules(&mut r, "rules", rules)?;
    let (alpha, p, outlines): (Alphabet, Pattern, Vec<Outline>) = match &sys {
        System::One(s) => {
            let l = letter(s.alphabet(), letter_text)?;
            check_cells(level, big_to_u128(&s.level_length(l, level)))?;
            let p = s.iterate(l, level);
            let outlines = (1..=level)
                .map(|j| Outline {
                    level: j,
                    boxes: grid(&intervals(s, l, level, j), &[(0, 1)]),
                })
                .collect();
            (s.alphabet().clone(), p, outlines)
        }
        System::Product(s) => {
            let l = letter(s.alphabet(), letter_text)?;
            let (h, v) = s.pair(l);
            let w = big_to_u128(&s.horizontal().level_length(h, level));
            let ht = big_to_u128(&s.vertical().level_length(v, level));
            check_cells(level, w.saturating_mul(ht))?;
            let p = s.iterate2d(l, level);
            let outlines = (1..=level)
                .map(|j| Outline {
                    level: j,
                    boxes: grid(&intervals(s.horizontal(), h, level, j), &intervals(s.vertical(), v, level, j)),
                })
                .collect();
            (s.alphabet().clone(), p, outlines)
        }
        System::Block(s) => {
            let l = letter(s.alphabet(), letter_text)?;
            let side = (s.q() as u128).checked_pow(level as u32).unwrap_or(u128::MAX);
            check_cells(level, side.saturating_mul(side))?;
            let p = s.iterate2d(l, level);
            let n = p.width();
            let outlines = (1..=level)
                .map(|j| {
                    let q = s.q().pow(j as u32);
                    Outline {
                        level: j,
                        boxes: grid(&uniform(n, q), &uniform(n, q)),
                    }
                })
                .collect();
            (s.alphabet().clone(), p, outlines)
        }
        System::Tiles(_) => return Err(CliError::Usage("substitute needs substitution rules".into())),
    };
    let mut result = json!({
        "letter": letter_text,
        "level": level,
        "extent": p.extent(),
        "pattern": pattern(&alpha, &p),
        "counts": symbol_counts(&alpha, &p),
    });
    if let Some(path) = render {
        let cells: Vec<Cell> = (0..p.height())
            .flat_map(|row| (0..p.width()).map(move |c| (c, row)))
            .map(|(c, row)| Cell {
                rect: Box2 {
                    x: c as f64,
                    y: row as f64,
                    w: 1.0,
                    h: 1.0,
                },
                label: alpha.token(p.get(c, row)).to_string(),
                color: p.get(c, row).index(),
            })
            .collect();
        let frame = Box2 {
            x: 0.0,
            y: 0.0,
            w: p.width() as f64,
            h: p.height() as f64,
        };
        let text = svg::render(&format!("{letter_text} at level {level}"), frame, 16.0, &cells, &outlines);
        let digest = write_svg(path, &text)?;
        // Level-0 cells are unit squares, so areas are cell counts.
        let cell_area = cells.len();
        let patch_area = p.width() * p.height();
        result["render"] = json!({
            "path": path,
            "sha256": digest,
            "cells": cells.len(),
            "cell_area": cell_area,
            "patch_area": patch_area,
            "outline_levels": level,
        });
        r.verified(cell_area == patch_area);
    }
    r.result(result);
    Ok(r)
}

pub fn language(rules: &str, length: Option<usize>, radius: Option<usize>) -> Result<Report, CliError> {
    let mut r = Report::new("language");
    r.arg("rules", rules).arg("length", length).arg("radius", radius);
    let sys = load_rules(&mut r, "rules", rules)?;
    let sub = sys.subshift()?;
    let extent = match (sub.dimension(), length, radius) {
        (Dimension::One, Some(m), None) if m >= 1 => [m, 1],
        (Dimension::Two, None, Some(n)) => [2 * n + 1, 2 * n + 1],
        _ => return Err(CliError::Usage("1D rules take --length m >= 1, 2D rules take --radius n".into())),
    };
    let main = sub.factors(extent)?;
    let independent = sub.factors_independent(extent)?;
    let agree = main == independent;
    let items: Vec<Value> = main.iter().map(|p| pattern(sub.alphabet(), p)).collect();
    r.result(json!({ "extent": extent, "count": main.len(), "items": items, "cross_check": agree }));
    r.verified(agree);
    Ok(r)
}

pub fn aperiodic(rules: &str, period_cap: usize, m_cap: usize) -> Result<Report, CliError> {
    let mut r = Report::new("aperiodic");
    r.arg("rules", rules).arg("period_cap", period_cap).arg("m_cap", m_cap);
    let sys = load_rules(&mut r, "rules", rules)?;
    let sub = sys.subshift()?;
    let alpha = sub.alphabet();
    let rep = aperiodicity_certificate_1d(sub, period_cap, m_cap)?;
    let candidates: Vec<Value> = rep
        .candidates
        .iter()
        .map(|c| {
            json!({
                "period": c.period,
                "config": config(alpha, &c.config),
                "passes_radius1": c.passes_radius1,
                "refutation": c.refutation.as_ref().map(|x| refutation(alpha, x)),
            })
        })
        .collect();
    let survivors: Vec<Value> = rep.survivors().iter().map(|c| pattern(alpha, c.config.domain())).collect();
    r.result(json!({
        "candidates": rep.candidates.len(),
        "survivors": survivors,
        "all_refuted": rep.all_refuted(),
    }));
    r.certificate(json!({ "period_cap": period_cap, "m_cap": m_cap, "candidates": candidates }));
    r.verified(rep.all_refuted());
    Ok(r)
}

fn constant_block<S: Substitution2D>(s: &S, radius: usize) -> Result<(PeriodicConfig, Value), CliError> {
    let built = constant_block_configuration(s, radius, DEFAULT_BLOCK_SEARCH_DEPTH)?;
    let a = s.alphabet();
    let info = json!({
        "letter": a.token(built.letter),
        "level": built.level,
        "witness_letter": a.token(built.witness_letter),
        "witness_level": built.witness_level,
        "witness_offset": built.witness_offset,
    });
    Ok((built.config, info))
}

pub fn separation(rules: Option<&str>, radius: usize, m_cap: Option<usize>, cfg: Option<&str>) -> Result<Report, CliError> {
    let mut r = Report::new("separation");
    r.arg("rules", rules).arg("radius", radius).arg("m_cap", m_cap).arg("config", cfg);
    let sys = match rules {
        Some(p) => load_rules(&mut r, "rules", p)?,
        None => System::Product(fibonacci_product()),
    };
    let (config_value, construction) = match (&sys, cfg) {
        (System::One(s), Some(word)) => (PeriodicConfig::new(s.alphabet().word(word)?), Value::Null),
        (System::One(_), None) => return Err(CliError::Usage("1D separation needs --config".into())),
        (System::Product(s), None) => constant_block(s, radius)?,
        (System::Block(s), None) => constant_block(s, radius)?,
        (System::Product(_) | System::Block(_), Some(_)) => {
            return Err(CliError::Usage("2D separation builds its own configuration".into()))
        }
        (System::Tiles(_), _) => return Err(CliError::Usage("separation needs substitution rules".into())),
    };
    let sub = sys.subshift()?;
    let alpha = sub.alphabet();
    let cap = m_cap.unwrap_or_else(|| default_m_cap(&config_value));
    match certify_separation(config_value.clone(), sub, radius, cap) {
        Ok(cert) => {
            let check = cert.revalidate(sub);
            r.result(json!({
                "system": sys.kind(),
                "radius": radius,
                "m_cap": cap,
                "construction": construction,
                "refutation_radius": cert.refutation.radius(),
                "refutation_size": cert.refutation.size(),
                "refuting_factor": pattern(alpha, &cert.refutation.factor),
                "revalidated": check.is_ok(),
                "revalidation_error": check.as_ref().err().map(|e| e.to_string()),
            }));
            r.certificate(separation_doc(alpha, &cert));
            r.verified(check.is_ok());
        }
        Err(e @ Error::NoRefutation(_)) => {
            r.result(json!({
                "system": sys.kind(),
                "radius": radius,
                "m_cap": cap,
                "construction": construction,
                "error": e.to_string(),
                "survivor": config(alpha, &config_value),
                "member": true,
            }));
            r.verified(false);
        }
        Err(e @ Error::NotMember(_)) => {
            let membership = is_member(&config_value, &sft_from_language(sub, radius)?)?;
            let failure = membership.first_failure().map(|c| json!({ "center": c.center, "window": window(alpha, &c.window) }));
            r.result(json!({
                "system": sys.kind(),
                "radius": radius,
                "m_cap": cap,
                "error": e.to_string(),
                "config": config(alpha, &config_value),
                "member": false,
                "first_failure": failure,
            }));
            r.verified(false);
        }
        Err(e) => return Err(e.into()),
    }
    Ok(r)
}

pub fn check_certificate(path: &str, rules: Option<&str>) -> Result<Report, CliError> {
    let mut r = Report::new("check-certificate");
    r.arg("report", path).arg("rules", rules);
    let text = read_input(&mut r, "report", path)?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{path}: {e}")))?;
    let command = doc["command"].as_str().unwrap_or("").to_string();
    let mut problems: Vec<String> = Vec::new();
    let recorded = doc["arguments"]["rules"].as_str().map(String::from);
    let sys = match rules.map(String::from).or(recorded.clone()) {
        Some(p) => {
            let sys = load_rules(&mut r, "rules", &p)?;
            let now = sha256_hex(&fs::read(&p).map_err(|e| CliError::Usage(format!("cannot read {p}: {e}")))?);
            let then = doc["inputs"]
                .as_array()
                .and_then(|v| v.iter().find(|i| i["role"] == "rules"))
                .and_then(|i| i["sha256"].as_str());
            if then != Some(now.as_str()) {
                problems.push("rule file digest differs from the report".into());
            }
            sys
        }
        None if command == "separation" => System::Product(fibonacci_product()),
        None => return Err(CliError::Usage("the report names no rule file; pass --rules".into())),
    };
    let sub = sys.subshift()?;
    let (alpha, dim) = (sub.alphabet(), sub.dimension());
    let cert = &doc["certificate"];
    if cert.is_null() {
        problems.push("report carries no certificate".into());
    } else {
        match command.as_str() {
            "separation" => {
                let c = read_separation(alpha, dim, cert)?;
                if let Err(e) = c.revalidate(sub) {
                    problems.push(e.to_string());
                }
            }
            "aperiodic" => problems.extend(check_aperiodic(sub, cert)?),
            other => return Err(CliError::Usage(format!("cannot check a {other:?} report"))),
        }
    }
    r.result(json!({ "checked": command, "problems": problems }));
    r.verified(problems.is_empty());
    Ok(r)
}

/// Re-enumerates the candidates and checks each refuting word against the
/// independent language enumeration.
fn check_aperiodic(sub: &dyn Subshift, cert: &Value) -> Result<Vec<String>, CliError> {
    let (alpha, dim) = (sub.alphabet(), sub.dimension());
    let cap = |k: &str| cert[k].as_u64().map(|n| n as usize).ok_or_else(|| CliError::Parse(format!("missing {k}")));
    let (period_cap, m_cap) = (cap("period_cap")?, cap("m_cap")?);
    let listed = cert["candidates"].as_array().ok_or_else(|| CliError::Parse("missing candidates".into()))?;
    let mut problems = Vec::new();
    let mut configs = Vec::new();
    let mut languages: BTreeMap<usize, _> = BTreeMap::new();
    for c in listed {
        let config_value = read_periodic(alpha, dim, &c["config"])?;
        configs.push(config_value.clone());
        let word = alpha.render(config_value.domain());
        if c["refutation"].is_null() {
            problems.push(format!("{word} has no refutation"));
            continue;
        }
        let refu = read_refutation(alpha, dim, &c["refutation"])?;
        let len = refu.factor.width();
        if len > m_cap || config_value.block_at(refu.origin, refu.factor.extent()) != refu.factor {
            problems.push(format!("refutation of {word} does not match the configuration"));
            continue;
        }
        if contains(refu.window.pattern(), &refu.factor).is_empty() {
            problems.push(format!("refutation window of {word} misses the factor"));
        }
        if let std::collections::btree_map::Entry::Vacant(e) = languages.entry(len) {
            e.insert(sub.factors_independent([len, 1])?);
        }
        if languages[&len].contains(&refu.factor) {
            problems.push(format!("refuting word of {word} occurs in the language"));
        }
    }
    if configs != necklaces(alpha, period_cap) {
        problems.push("candidate list differs from the periodic configurations up to the cap".into());
    }
    Ok(problems)
}

// Tilings.

pub fn conjugate(
    from: &str,
    to: &str,
    tiling: Option<&str>,
    seed: Option<u64>,
    witness: Option<&str>,
    precision: &str,
) -> Result<Report, CliError> {
    let mut r = Report::new("conjugate");
    r.arg("from", from)
        .arg("to", to)
        .arg("tiling", tiling)
        .arg("seed", seed)
        .arg("witness", witness)
        .arg("precision", precision);
    let xs = load_spec(&mut r, "from", from)?;
    let ys = load_spec(&mut r, "to", to)?;
    let eps = positive(precision, "precision")?;
    let (ix, iy) = (length_invariant(&xs), length_invariant(&ys));
    if let Some(w) = witness {
        let radius = positive(w, "witness radius")?;
        let wit = non_sbc_witness(&xs, &ys, &radius, seed.unwrap_or(0))?;
        let agree = wit.x.boundary_points(&radius)? == wit.x_prime.boundary_points(&radius)?;
        let fx = conjugate_at_depth(&wit.x, &ys, wit.level + 2)?;
        let fxp = conjugate_at_depth(&wit.x_prime, &ys, wit.level + 2)?;
        let one = G::integer(1);
        let reach = &one + &(&wit.t.abs() + &ys.max_len());
        let near: Vec<G> = fxp
            .boundary_points(&reach)?
            .points()
            .iter()
            .map(|p| p + &wit.t)
            .filter(|p| p.abs() <= one)
            .collect();
        let split = fx.boundary_points(&one)?.points() == &near[..];
        r.result(json!({
            "mode": "witness",
            "invariant_from": number(&ix),
            "invariant_to": number(&iy),
            "radius": number(&radius),
            "level": wit.level,
            "t": number(&wit.t),
            "abs_t": number(&wit.t.abs()),
            "local_agreement": agree,
            "images_differ_by_t": split,
        }));
        r.certificate(json!({
            "x": TilingDoc::Line(LineDoc::of(&wit.x)).to_value(),
            "x_prime": TilingDoc::Line(LineDoc::of(&wit.x_prime)).to_value(),
            "t": number(&wit.t),
        }));
        r.verified(agree && split && !wit.t.is_zero());
        return Ok(r);
    }
    let x = match (tiling, seed) {
        (Some(p), _) => load_line(&mut r, "tiling", p)?,
        (None, Some(s)) => LineTiling::sample(&xs, s),
        (None, None) => return Err(CliError::Usage("conjugate needs --tiling, --seed or --witness".into())),
    };
    if x.spec() != &xs {
        return Err(CliError::Usage("the tiling's lengths differ from --from".into()));
    }
    let c = conjugate_line(&x, &ys, &eps)?;
    let back = conjugate_line(&c.tiling, &xs, &eps)?;
    let residual = translation_residual(&x, &back.tiling);
    let round_trip = residual.as_ref().is_some_and(|t| t.abs() <= &eps + &eps);
    r.result(json!({
        "mode": "conjugate",
        "invariant_from": number(&ix),
        "invariant_to": number(&iy),
        "depth": c.depth,
        "error_bound": number(&c.error_bound),
        "round_trip_residual": residual.as_ref().map(number),
        "tiling": TilingDoc::Line(LineDoc::of(&c.tiling)).to_value(),
    }));
    r.verified(c.error_bound <= eps && round_trip);
    Ok(r)
}

pub fn metric(a: &str, b: &str, cap: Option<usize>) -> Result<Report, CliError> {
    let mut r = Report::new("metric");
    r.arg("a", a).arg("b", b).arg("cap", cap);
    let x = load_line(&mut r, "a", a)?;
    let y = load_line(&mut r, "b", b)?;
    match tiling_metric_capped(&x, &y, cap.unwrap_or(DEFAULT_METRIC_CAP)) {
        Ok(d) => {
            r.result(json!({ "distance": number(&d), "same_tiling": x.same_tiling(&y) }));
        }
        Err(e @ Error::MetricNotCertified { .. }) => {
            let Error::MetricNotCertified { lower, upper, .. } = &e else { unreachable!() };
            r.result(json!({ "error": e.to_string(), "lower": lower, "upper": upper }));
            r.verified(false);
        }
        Err(e) => return Err(e.into()),
    }
    Ok(r)
}

pub fn offsets(seed: u64, rows: usize, radius: &str, resolution: &str, precision: &str) -> Result<Report, CliError> {
    let mut r = Report::new("offsets");
    r.arg("seed", seed)
        .arg("rows", rows)
        .arg("radius", radius)
        .arg("resolution", resolution)
        .arg("precision", precision);
    let radius = positive(radius, "radius")?;
    let delta = positive(resolution, "resolution")?;
    let eps = positive(precision, "precision")?;
    let x = rows_sample(seed, rows, &(&radius + &G::integer(8)));
    let y = rows_conjugate(&x, &eps)?;
    r.result(json!({
        "radius": number(&radius),
        "image_side": distinct_offsets(&y, &radius, &delta)?,
        "source_side": distinct_offsets(&x, &radius, &delta)?,
    }));
    Ok(r)
}

#[allow(clippy::too_many_arguments)]
pub fn census(
    seed: u64,
    rows: usize,
    width: &str,
    radius: &str,
    budget: usize,
    side: Side,
    precision: &str,
) -> Result<Report, CliError> {
    let mut r = Report::new("census");
    r.arg("seed", seed)
        .arg("rows", rows)
        .arg("width", width)
        .arg("radius", radius)
        .arg("budget", budget)
        .arg("side", format!("{side:?}").to_lowercase())
        .arg("precision", precision);
    let half = positive(width, "width")?;
    let radius = positive(radius, "radius")?;
    let eps = positive(precision, "precision")?;
    if rows == 0 {
        return Err(CliError::Usage("rows must be positive".into()));
    }
    let x = rows_sample(seed, rows, &(&half + &G::integer(4)));
    let tiling = match side {
        Side::X => x,
        Side::Y => rows_conjugate(&x, &eps)?,
    };
    let y0 = -(rows as i64 / 2);
    let region = Rect::new(-half.clone(), half, G::integer(y0), G::integer(y0 + rows as i64))?;
    let census = neighborhood_census(&tiling.patch(&region)?, &radius, budget, seed)?;
    r.result(json!({
        "candidates": census.candidates,
        "classes": census.class_count(),
        "growth": census.growth,
        "saturated": census.saturated,
    }));
    Ok(r)
}

pub fn frame(path: &str, s: &str, t: &str) -> Result<Report, CliError> {
    let mut r = Report::new("frame");
    r.arg("tiling", path).arg("s", s).arg("t", t);
    let Tiling::Plane(x) = load_tiling(&mut r, "tiling", path)? else {
        return Err(CliError::Usage(format!("{path} is a line tiling, expected a plane tiling")));
    };
    let (sv, tv) = (parse_vector(s)?, parse_vector(t)?);
    match frame_check(&*x, &sv, &tv)? {
        FrameOutcome::Witness(w) => {
            let tubes: Vec<Value> = w
                .tubes
                .iter()
                .map(|a| json!({ "along": vector(&a.along), "shift": vector(&a.shift), "tiles_compared": a.tiles_compared }))
                .collect();
            r.result(json!({ "outcome": "witness", "s": vector(&w.s), "t": vector(&w.t), "margin": number(&w.margin), "tubes": tubes }));
        }
        FrameOutcome::Refusal(f) => {
            r.result(json!({
                "outcome": "refusal",
                "along": vector(&f.along),
                "shift": vector(&f.shift),
                "tile": plane_tile(&f.tile),
                "in_original": f.in_original,
            }));
            r.verified(false);
        }
    }
    Ok(r)
}

pub fn patch(path: &str, radius: &str, render: Option<&str>) -> Result<Report, CliError> {
    let mut r = Report::new("patch");
    r.arg("tiling", path).arg("radius", radius).arg("render", render);
    let radius = positive(radius, "radius")?;
    let tiling = load_tiling(&mut r, "tiling", path)?;
    let (tiles, labels, cells, covered, area) = match &tiling {
        Tiling::Line(x) => {
            let tiles = x.tiles_in(&radius)?;
            let mut covered = G::zero();
            let mut json_tiles = Vec::new();
            let mut cells = Vec::new();
            for (tile, left) in &tiles {
                let right = left + x.spec().len(*tile);
                covered += &(&right.clone().min(radius.clone()) - &left.clone().max(-radius.clone()));
                json_tiles.push(json!({ "label": tile.to_string(), "left": number(left), "right": number(&right) }));
                cells.push(Cell {
                    rect: Box2 {
                        x: left.to_f64(),
                        y: 0.0,
                        w: x.spec().len(*tile).to_f64(),
                        h: 1.0,
                    },
                    label: tile.to_string(),
                    color: tile.index(),
                });
            }
            let area = &radius + &radius;
            (json_tiles, Vec::new(), cells, covered, area)
        }
        Tiling::Plane(x) => {
            let region = Rect::square(&radius);
            let p = x.patch(&region)?;
            let mut labels: Vec<String> = p.tiles.iter().map(|t| t.label.clone()).collect();
            labels.sort();
            labels.dedup();
            let cells = p
                .tiles
                .iter()
                .map(|t| Cell {
                    rect: Box2 {
                        x: t.rect.x0.to_f64(),
                        y: t.rect.y0.to_f64(),
                        w: t.rect.width().to_f64(),
                        h: t.rect.height().to_f64(),
                    },
                    label: t.label.clone(),
                    color: labels.binary_search(&t.label).unwrap_or(0),
                })
                .collect();
            (p.tiles.iter().map(plane_tile).collect(), labels, cells, p.covered_area(), region.area())
        }
    };
    let mut result = json!({
        "tiles": tiles,
        "count": cells.len(),
        "covered": number(&covered),
        "region": number(&area),
    });
    if !labels.is_empty() {
        result["labels"] = json!(labels);
    }
    if let Some(out) = render {
        let rf = radius.to_f64();
        let (y, h) = match tiling {
            Tiling::Line(_) => (0.0, 1.0),
            Tiling::Plane(_) => (-rf, 2.0 * rf),
        };
        let frame = Box2 { x: -rf, y, w: 2.0 * rf, h };
        let text = svg::render(&format!("patch of radius {radius}"), frame, 24.0, &cells, &[]);
        result["render"] = json!({ "path": out, "sha256": write_svg(out, &text)?, "cells": cells.len() });
    }
    r.result(result);
    r.verified(covered == area);
    Ok(r)
}

/// Writes a tiling document rather than a report, so generated tilings can
/// feed the other commands directly.
pub fn tiling_file(
    kind: TilingKind,
    spec: Option<&str>,
    seed: u64,
    rows: usize,
    horizon: &str,
    translate: Option<&str>,
) -> Result<String, CliError> {
    let mut scratch = Report::new("tiling");
    let spec = match spec {
        Some(t) => load_spec(&mut scratch, "spec", t)?,
        None => TileSpec::golden(),
    };
    let doc = match kind {
        TilingKind::Line | TilingKind::Unit => {
            let mut x = match kind {
                TilingKind::Unit => LineTiling::unit(),
                _ => LineTiling::sample(&spec, seed),
            };
            if let Some(a) = translate {
                x = x.translate(&parse_number(a)?)?;
            }
            TilingDoc::Line(LineDoc::of(&x))
        }
        TilingKind::Product => TilingDoc::product(&ProductTiling::new(
            LineTiling::sample(&spec, 2 * seed),
            LineTiling::sample(&spec, 2 * seed + 1),
        )),
        TilingKind::Rows => TilingDoc::rows(&rows_sample(seed, rows, &positive(horizon, "horizon")?)),
        TilingKind::FrameFixture => {
            let fx = frame_fixture(&spec, seed)?;
            // The frame translations are not part of the tiling document.
            eprintln!("level {}: --s {},{} --t {},{}", fx.level, fx.s[0], fx.s[1], fx.t[0], fx.t[1]);
            TilingDoc::product(&fx.tiling)
        }
    };
    if translate.is_some() && !matches!(kind, TilingKind::Line | TilingKind::Unit) {
        return Err(CliError::Usage("--translate applies to line tilings".into()));
    }
    let mut text = serde_json::to_string_pretty(&doc.to_value()).expect("tiling documents serialize");
    text.push('\n');
    Ok(text)
}
