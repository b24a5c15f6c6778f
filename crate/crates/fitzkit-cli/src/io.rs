//! Input documents and output artifacts.
//!
//! Inputs are JSON: a single tagged document type covers both function
//! builtins (sampled onto grids) and operator descriptions (built exactly).
//! Numbers may be written as JSON numbers (lifted exactly from their binary
//! value) or as `"p/q"` strings for rationals a float cannot spell.
//!
//! Outputs are CSV for grids (header `axis1,...,axisd,value`, row-major node
//! order, `+inf`/`-inf` sentinels) and JSON for everything structured.  All
//! files are written atomically: temp file in the target directory, then a
//! rename.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use fitzkit::catalog::rotation_linear;
use fitzkit::gates::build_cw_h;
use fitzkit::operators::{CurvePiece, FiniteOperator, LinearOperator, Operator, PwlCurve1d};
use fitzkit::{Exact, ExtReal, GridFn, GridSpec, PrimalDualPoint, Scalar};

// ---------------------------------------------------------------------------
// Numbers
// ---------------------------------------------------------------------------

/// A scalar in a spec document: a JSON number, or a rational written as
/// `"p/q"` (or a plain integer string).
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum NumberDoc {
    Float(f64),
    Text(String),
}

impl NumberDoc {
    pub fn to_exact(&self) -> Result<Exact> {
        match self {
            NumberDoc::Float(v) => <Exact as Scalar>::from_f64_exact(*v)
                .with_context(|| format!("number {v} is not finite")),
            NumberDoc::Text(s) => {
                let parse = |t: &str| -> Result<i64> {
                    t.trim()
                        .parse::<i64>()
                        .with_context(|| format!("`{t}` is not an integer"))
                };
                match s.split_once('/') {
                    Some((num, den)) => {
                        let den = parse(den)?;
                        if den == 0 {
                            bail!("rational `{s}` has a zero denominator");
                        }
                        Ok(<Exact as Scalar>::ratio(parse(num)?, den))
                    }
                    None => Ok(<Exact as Scalar>::from_int(parse(s)?)),
                }
            }
        }
    }

    pub fn to_f64(&self) -> Result<f64> {
        Ok(self.to_exact()?.to_f64())
    }
}

fn opt_exact(n: &Option<NumberDoc>) -> Result<Option<Exact>> {
    n.as_ref().map(|v| v.to_exact()).transpose()
}

// ---------------------------------------------------------------------------
// Spec documents
// ---------------------------------------------------------------------------

/// A JSON input document.  The first five kinds are function builtins
/// (sampled onto a grid); the last four describe operators (built exactly).
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpecDoc {
    /// `sum z_i^2 / 2` on `dim` axes.
    Young { dim: usize },
    /// `|x| + indicator(|x*| <= 1)` on two axes.
    AbsBox,
    /// The duality pairing `sum x_i x*_i` on `dim` (even) axes.
    Pairing { dim: usize },
    /// Indicator of the single point `at` (which must be a grid node).
    PointIndicator { at: Vec<NumberDoc> },
    /// The bounded-range construction on four axes (square window).
    Cw,
    /// A finite graph: explicit primal/dual point pairs.
    Finite { pairs: Vec<PairDoc> },
    /// A monotone piecewise-linear plane curve.
    Pwl1d { pieces: Vec<PieceDoc> },
    /// A linear map given by its rows.
    Linear { rows: Vec<Vec<NumberDoc>> },
    /// The standard planar rotation by a quarter turn.
    Rotation,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairDoc {
    pub x: Vec<NumberDoc>,
    pub xstar: Vec<NumberDoc>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PieceDoc {
    /// `y* = a y + b` for `y in [lo, hi]`; omit a bound for a ray.
    Sloped {
        #[serde(default)]
        lo: Option<NumberDoc>,
        #[serde(default)]
        hi: Option<NumberDoc>,
        a: NumberDoc,
        b: NumberDoc,
    },
    /// Fixed `y = v` with `y*` running over `[lo, hi]`.
    Vertical {
        v: NumberDoc,
        #[serde(default)]
        lo: Option<NumberDoc>,
        #[serde(default)]
        hi: Option<NumberDoc>,
    },
}

/// One entry of a user-supplied catalog file: `[{"name": ..., "operator": {...}}]`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntryDoc {
    pub name: String,
    pub operator: SpecDoc,
}

pub fn load_spec(path: &Path) -> Result<SpecDoc> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read spec file {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("malformed spec in {}", path.display()))
}

pub fn load_catalog_file(path: &Path) -> Result<Vec<CatalogEntryDoc>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read catalog file {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("malformed catalog in {}", path.display()))
}

impl SpecDoc {
    /// Number of product-space axes the document naturally lives on.
    pub fn dim(&self) -> Result<usize> {
        Ok(match self {
            SpecDoc::Young { dim } | SpecDoc::Pairing { dim } => *dim,
            SpecDoc::AbsBox => 2,
            SpecDoc::PointIndicator { at } => at.len(),
            SpecDoc::Cw => 4,
            _ => 2 * self.build_operator()?.space_dim(),
        })
    }

    /// Builds the operator an operator-kind document describes.
    pub fn build_operator(&self) -> Result<Operator<Exact>> {
        match self {
            SpecDoc::Finite { pairs } => {
                let pts = pairs
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        let x: Vec<Exact> =
                            p.x.iter().map(|v| v.to_exact()).collect::<Result<_>>()?;
                        let xs: Vec<Exact> =
                            p.xstar.iter().map(|v| v.to_exact()).collect::<Result<_>>()?;
                        PrimalDualPoint::new(x, xs)
                            .with_context(|| format!("pair #{i} is malformed"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Operator::Finite(
                    FiniteOperator::new(pts).context("finite operator document rejected")?,
                ))
            }
            SpecDoc::Pwl1d { pieces } => {
                let ps = pieces
                    .iter()
                    .map(|p| {
                        Ok(match p {
                            PieceDoc::Sloped { lo, hi, a, b } => CurvePiece::Sloped {
                                lo: opt_exact(lo)?,
                                hi: opt_exact(hi)?,
                                a: a.to_exact()?,
                                b: b.to_exact()?,
                            },
                            PieceDoc::Vertical { v, lo, hi } => CurvePiece::Vertical {
                                v: v.to_exact()?,
                                lo: opt_exact(lo)?,
                                hi: opt_exact(hi)?,
                            },
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Operator::Curve(
                    PwlCurve1d::new(ps).context("curve document rejected")?,
                ))
            }
            SpecDoc::Linear { rows } => {
                let rs = rows
                    .iter()
                    .map(|r| r.iter().map(|v| v.to_exact()).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Ok(Operator::Linear(
                    LinearOperator::new(rs).context("linear operator document rejected")?,
                ))
            }
            SpecDoc::Rotation => Ok(Operator::Linear(rotation_linear())),
            _ => bail!("this document describes a function builtin, not an operator"),
        }
    }

    /// Samples a function-kind document onto the grid.
    pub fn build_function(&self, spec: &GridSpec) -> Result<GridFn<f64>> {
        let d = spec.dim();
        let need = |want: usize| -> Result<()> {
            if d != want {
                bail!("this builtin lives on {want} axes, but the grid has {d}");
            }
            Ok(())
        };
        let from_values = |values: Vec<ExtReal<f64>>| -> Result<GridFn<f64>> {
            GridFn::new(spec.clone(), values).context("grid assembly failed")
        };
        match self {
            SpecDoc::Young { dim } => {
                need(*dim)?;
                from_values(
                    (0..spec.num_nodes())
                        .map(|i| {
                            let z = spec.node_coords(i);
                            ExtReal::Finite(z.iter().map(|c| 0.5 * c * c).sum())
                        })
                        .collect(),
                )
            }
            SpecDoc::AbsBox => {
                need(2)?;
                from_values(
                    (0..spec.num_nodes())
                        .map(|i| {
                            let z = spec.node_coords(i);
                            if z[1].abs() <= 1.0 {
                                ExtReal::Finite(z[0].abs())
                            } else {
                                ExtReal::PosInf
                            }
                        })
                        .collect(),
                )
            }
            SpecDoc::Pairing { dim } => {
                need(*dim)?;
                if d % 2 != 0 {
                    bail!("the pairing builtin needs an even axis count");
                }
                let n = d / 2;
                from_values(
                    (0..spec.num_nodes())
                        .map(|i| {
                            let z = spec.node_coords(i);
                            ExtReal::Finite((0..n).map(|k| z[k] * z[n + k]).sum())
                        })
                        .collect(),
                )
            }
            SpecDoc::PointIndicator { at } => {
                need(at.len())?;
                let coords = at.iter().map(|v| v.to_f64()).collect::<Result<Vec<_>>>()?;
                let node = spec
                    .find_node(&coords, 1e-9)
                    .with_context(|| format!("point {coords:?} is not a node of the grid"))?;
                from_values(
                    (0..spec.num_nodes())
                        .map(|i| if i == node { ExtReal::Finite(0.0) } else { ExtReal::PosInf })
                        .collect(),
                )
            }
            SpecDoc::Cw => {
                need(4)?;
                build_cw_h(spec).context("the construction rejected this grid")
            }
            _ => bail!("this document describes an operator; use an operator-aware command or method"),
        }
    }
}

// ---------------------------------------------------------------------------
// Grid flag parsing
// ---------------------------------------------------------------------------

/// Parses `--grid`: either one `lo:hi:m` triple applied to every axis, or a
/// comma-separated triple per axis.
pub fn parse_grid(flag: &str, dim: usize) -> Result<GridSpec> {
    let triples: Vec<&str> = flag.split(',').collect();
    let parse_triple = |t: &str| -> Result<(f64, f64, usize)> {
        let parts: Vec<&str> = t.split(':').collect();
        if parts.len() != 3 {
            bail!("grid triple `{t}` is not of the form lo:hi:m");
        }
        Ok((
            parts[0].trim().parse().with_context(|| format!("bad lower bound in `{t}`"))?,
            parts[1].trim().parse().with_context(|| format!("bad upper bound in `{t}`"))?,
            parts[2].trim().parse().with_context(|| format!("bad node count in `{t}`"))?,
        ))
    };
    let axes: Vec<(f64, f64, usize)> = if triples.len() == 1 {
        vec![parse_triple(triples[0])?; dim]
    } else if triples.len() == dim {
        triples.iter().map(|t| parse_triple(t)).collect::<Result<_>>()?
    } else {
        bail!("grid has {} triples but the input lives on {dim} axes", triples.len());
    };
    let specs = axes
        .into_iter()
        .map(|(lo, hi, m)| fitzkit::AxisSpec::new(lo, hi, m))
        .collect::<fitzkit::Result<Vec<_>>>()
        .context("grid axis rejected")?;
    GridSpec::new(specs).context("grid rejected")
}

/// The default window when `--grid` is omitted.
pub fn default_grid(dim: usize) -> Result<GridSpec> {
    GridSpec::cube(-2.0, 2.0, 17, dim).context("default grid construction failed")
}

// ---------------------------------------------------------------------------
// Artifact writers
// ---------------------------------------------------------------------------

/// Writes bytes atomically: temp file next to the target, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(d) = dir {
        fs::create_dir_all(d).with_context(|| format!("cannot create {}", d.display()))?;
    }
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or_else(|| Path::new(".")))
        .context("cannot create temp file")?;
    tmp.write_all(bytes).context("write failed")?;
    tmp.persist(path)
        .with_context(|| format!("cannot move output into place at {}", path.display()))?;
    Ok(())
}

fn ext_cell(v: &ExtReal<f64>) -> String {
    match v {
        ExtReal::Finite(x) => format!("{x}"),
        ExtReal::PosInf => "+inf".into(),
        ExtReal::NegInf => "-inf".into(),
    }
}

fn csv_header(d: usize, last: &str) -> String {
    let mut s = String::new();
    for i in 1..=d {
        let _ = write!(s, "axis{i},");
    }
    s.push_str(last);
    s.push('\n');
    s
}

/// Grid values, row-major in node order.
pub fn write_grid_csv(path: &Path, f: &GridFn<f64>) -> Result<()> {
    let spec = f.spec();
    let mut out = csv_header(spec.dim(), "value");
    for i in 0..spec.num_nodes() {
        for c in spec.node_coords(i) {
            let _ = write!(out, "{c},");
        }
        out.push_str(&ext_cell(f.value(i)));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

/// Saturation mask, `1` = masked (boundary-attained, untrusted).
pub fn write_mask_csv(path: &Path, spec: &GridSpec, mask: &[bool]) -> Result<()> {
    let mut out = csv_header(spec.dim(), "masked");
    for i in 0..spec.num_nodes() {
        for c in spec.node_coords(i) {
            let _ = write!(out, "{c},");
        }
        let _ = writeln!(out, "{}", u8::from(mask[i]));
    }
    write_atomic(path, out.as_bytes())
}

/// A point cloud in the product space (extracted graphs).
pub fn write_graph_csv(path: &Path, points: &[Vec<f64>]) -> Result<()> {
    if points.is_empty() {
        return write_atomic(path, b"empty\n");
    }
    let mut out = csv_header(points[0].len() - 1, &format!("axis{}", points[0].len()));
    for p in points {
        let cells: Vec<String> = p.iter().map(|c| format!("{c}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).context("serialization failed")?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}
