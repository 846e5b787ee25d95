//! Text formats for point sets and covers.
//!
//! Point sets:
//!
//! ```text
//! p 3 m 3
//! 1,0,0,0
//! 0,1,-1,1   # any representative, reduced and normalized on load
//! ```
//!
//! Covers, members given by a dual vector or by subgroup generators:
//!
//! ```text
//! p 3 d 4
//! dual: 0,0,0,1
//! gens: 1,0,0,0; 0,1,0,0; 0,0,-1,1
//! ```
//!
//! `#` starts a comment. Blank lines are ignored.

use crate::blocking::PointSet;
use crate::covers::{dual_from_generators, DualCover, SubgroupDescriptor};
use crate::error::{Error, Result};
use crate::gflin::{FieldVector, PrimeModulus};
use crate::projgeom::{normalize_point, ProjectivePoint, SpaceDescriptor};

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

/// Non-blank lines with comments stripped, with 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        (!body.trim().is_empty()).then_some((i + 1, body))
    })
}

/// Column (1-based) of `part` within `line`, which it must borrow from.
fn col(line: &str, part: &str) -> usize {
    let lead = part.len() - part.trim_start().len();
    part.as_ptr() as usize - line.as_ptr() as usize + lead + 1
}

fn parse_header(text: &str, second: &str) -> Result<(usize, PrimeModulus, usize)> {
    let (ln, body) = lines(text).next().ok_or_else(|| parse_err(1, 1, "missing header"))?;
    let toks: Vec<&str> = body.split_whitespace().collect();
    let expect = format!("expected header \"p <prime> {second} <integer>\"");
    if toks.len() != 4 || toks[0] != "p" || toks[2] != second {
        return Err(parse_err(ln, col(body, body), expect));
    }
    let num = |t: &str| -> Result<u64> { t.parse().map_err(|_| parse_err(ln, col(body, t), format!("not a non-negative integer: {t:?}"))) };
    let pv = num(toks[1])?;
    let p = u32::try_from(pv)
        .ok()
        .and_then(|v| PrimeModulus::new(v).ok())
        .ok_or_else(|| parse_err(ln, col(body, toks[1]), format!("{pv} is not a supported prime")))?;
    let dim = num(toks[3])? as usize;
    Ok((ln, p, dim))
}

fn parse_coords(ln: usize, line: &str, part: &str, p: PrimeModulus, len: usize) -> Result<FieldVector> {
    let mut vals = Vec::new();
    for tok in part.split(',') {
        let t = tok.trim();
        let v: i64 = t.parse().map_err(|_| parse_err(ln, col(line, tok), format!("not an integer: {t:?}")))?;
        vals.push(v);
    }
    if vals.len() != len {
        return Err(parse_err(ln, col(line, part), format!("expected {len} coordinates, found {}", vals.len())));
    }
    FieldVector::from_signed(p, &vals)
}

/// Parses a point set; `ambient` must match the header dimension when given.
pub fn parse_point_set(text: &str, ambient: Option<usize>) -> Result<PointSet> {
    let (hl, p, m) = parse_header(text, "m")?;
    if let Some(a) = ambient {
        if a != m {
            return Err(Error::DimensionMismatch { expected: a, got: m });
        }
    }
    let space = SpaceDescriptor::new(m, p).map_err(|e| parse_err(hl, 1, e.to_string()))?;
    let mut points: Vec<ProjectivePoint> = Vec::new();
    for (ln, body) in lines(text).skip(1) {
        let v = parse_coords(ln, body, body, p, m + 1)?;
        let pt = normalize_point(&v).map_err(|_| parse_err(ln, col(body, body), "zero vector"))?;
        if points.contains(&pt) {
            return Err(parse_err(ln, col(body, body), format!("duplicate point {pt}")));
        }
        points.push(pt);
    }
    if points.is_empty() {
        return Err(parse_err(hl, 1, "no points"));
    }
    PointSet::new(space, points)
}

/// Point-set text: header then one normalized point per line.
pub fn point_set_to_text(b: &PointSet) -> String {
    let space = b.space();
    let mut out = format!("p {} m {}\n", space.modulus(), space.dimension());
    for x in b.points() {
        let cs: Vec<String> = x.coords().iter().map(|c| c.to_string()).collect();
        out.push_str(&cs.join(","));
        out.push('\n');
    }
    out
}

/// How a cover member was written in the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MemberSource {
    Dual,
    Generators(SubgroupDescriptor),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedCover {
    pub cover: DualCover,
    pub sources: Vec<MemberSource>,
}

pub fn parse_cover(text: &str) -> Result<ParsedCover> {
    let (hl, p, d) = parse_header(text, "d")?;
    if d < 2 {
        return Err(parse_err(hl, 1, "d must be at least 2"));
    }
    let mut duals: Vec<ProjectivePoint> = Vec::new();
    let mut sources = Vec::new();
    for (ln, body) in lines(text).skip(1) {
        let (tag, rest) = body.split_once(':').ok_or_else(|| parse_err(ln, col(body, body), "expected \"dual:\" or \"gens:\""))?;
        let (pt, src) = match tag.trim() {
            "dual" => {
                let v = parse_coords(ln, body, rest, p, d)?;
                (normalize_point(&v).map_err(|_| parse_err(ln, col(body, rest), "zero vector"))?, MemberSource::Dual)
            }
            "gens" => {
                let gens = rest.split(';').map(|g| parse_coords(ln, body, g, p, d)).collect::<Result<Vec<_>>>()?;
                let s = SubgroupDescriptor::new(gens)?;
                (dual_from_generators(&s)?, MemberSource::Generators(s))
            }
            other => return Err(parse_err(ln, col(body, tag), format!("unknown member kind {other:?}"))),
        };
        if duals.contains(&pt) {
            return Err(parse_err(ln, col(body, body), format!("duplicate member M_{pt}")));
        }
        duals.push(pt);
        sources.push(src);
    }
    Ok(ParsedCover { cover: DualCover::new(p, d, duals)?, sources })
}

/// Cover text with every member as a dual line.
pub fn cover_to_text(c: &DualCover) -> String {
    let mut out = format!("p {} d {}\n", c.modulus(), c.d());
    for b in c.duals() {
        let cs: Vec<String> = b.coords().iter().map(|x| x.to_string()).collect();
        out.push_str(&format!("dual: {}\n", cs.join(",")));
    }
    out
}
