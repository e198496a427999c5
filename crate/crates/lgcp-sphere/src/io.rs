//! CSV and manifest persistence.
//!
//! Everything is plain text: point patterns and curves as small CSV files,
//! run metadata as sorted key=value manifests. Angles are radians
//! internally; degree input is honored at ingestion when the file carries a
//! `# units=degrees` comment.

use std::io::{BufRead, Write};

use crate::envelope::{CurveSet, EnvelopeResult, ThinningSweep};
use crate::error::{Error, Result};
use crate::field::GridField;
use crate::fitting::FitResult;
use crate::geometry::{UnitVector, Window};
use crate::process::PointPattern;
use crate::summaries::{CurveKind, DistanceGrid, SummaryCurve};

/// Writes a pattern as `theta,phi` rows in radians, 15 significant digits.
pub fn write_pattern(w: &mut impl Write, pattern: &PointPattern) -> Result<()> {
    writeln!(w, "theta,phi")?;
    for p in pattern.points() {
        // atan2 longitudes live in (-pi, pi]; the file format wants [0, 2 pi).
        let mut phi = p.longitude();
        if phi < 0.0 {
            phi += 2.0 * std::f64::consts::PI;
        }
        if phi >= 2.0 * std::f64::consts::PI {
            phi = 0.0;
        }
        writeln!(w, "{:.14e},{:.14e}", p.colatitude(), phi)?;
    }
    Ok(())
}

/// Reads a `theta,phi` catalog, dropping points outside `window`.
///
/// Leading `#` comment lines may set `# units=degrees`; the header row
/// `theta,phi` is mandatory. After conversion to radians every row must
/// satisfy theta in [0, pi] and phi in [0, 2 pi). Returns the pattern
/// together with the number of omitted (out-of-window) points.
pub fn read_pattern(r: impl BufRead, window: Window) -> Result<(PointPattern, usize)> {
    let mut degrees = false;
    let mut saw_header = false;
    let mut points = Vec::new();
    let mut omitted = 0usize;
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        let lineno = idx + 1;
        if text.is_empty() {
            continue;
        }
        if let Some(comment) = text.strip_prefix('#') {
            if saw_header {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "comments must precede the header".into(),
                });
            }
            if comment.trim() == "units=degrees" {
                degrees = true;
            }
            continue;
        }
        if !saw_header {
            if text != "theta,phi" {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected header 'theta,phi', found '{text}'"),
                });
            }
            saw_header = true;
            continue;
        }
        let (a, b) = text.split_once(',').ok_or(Error::Parse {
            line: lineno,
            msg: format!("expected 'theta,phi', found '{text}'"),
        })?;
        let parse = |s: &str| -> std::result::Result<f64, Error> {
            s.trim().parse::<f64>().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad number '{s}'"),
            })
        };
        let mut theta = parse(a)?;
        let mut phi = parse(b)?;
        if degrees {
            theta = theta.to_radians();
            phi = phi.to_radians();
        }
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("colatitude {theta} outside [0, pi]"),
            });
        }
        if !(0.0..2.0 * std::f64::consts::PI).contains(&phi) {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("longitude {phi} outside [0, 2 pi)"),
            });
        }
        let u = UnitVector::from_spherical(theta, phi).map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        if window.contains(&u) {
            points.push(u);
        } else {
            omitted += 1;
        }
    }
    if !saw_header {
        return Err(Error::Parse {
            line: 1,
            msg: "missing header 'theta,phi'".into(),
        });
    }
    Ok((PointPattern::new(points, window)?, omitted))
}

/// Writes curves as `r,value,kind` rows; missing values become empty
/// fields. Values use the shortest round-trip decimal form.
pub fn write_curves(w: &mut impl Write, curves: &[&SummaryCurve]) -> Result<()> {
    writeln!(w, "r,value,kind")?;
    for curve in curves {
        let kind = curve.kind();
        for (r, v) in curve.grid().values().iter().zip(curve.values()) {
            if v.is_nan() {
                writeln!(w, "{r},,{kind}")?;
            } else {
                writeln!(w, "{r},{v},{kind}")?;
            }
        }
    }
    Ok(())
}

/// Reads back curves written by [`write_curves`], one per contiguous kind
/// block. Empty value fields become NaN.
pub fn read_curves(r: impl BufRead) -> Result<Vec<SummaryCurve>> {
    let mut saw_header = false;
    let mut out: Vec<SummaryCurve> = Vec::new();
    let mut grid: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut kind: Option<CurveKind> = None;
    let flush = |grid: &mut Vec<f64>,
                     values: &mut Vec<f64>,
                     kind: &mut Option<CurveKind>|
     -> Result<Option<SummaryCurve>> {
        match kind.take() {
            Some(k) => {
                let g = DistanceGrid::new(std::mem::take(grid))?;
                Ok(Some(SummaryCurve::new(g, std::mem::take(values), k)?))
            }
            None => Ok(None),
        }
    };
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        let lineno = idx + 1;
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        if !saw_header {
            if text != "r,value,kind" {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected header 'r,value,kind', found '{text}'"),
                });
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = text.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let r_val = fields[0].trim().parse::<f64>().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad distance '{}'", fields[0]),
        })?;
        let v = if fields[1].trim().is_empty() {
            f64::NAN
        } else {
            fields[1].trim().parse::<f64>().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad value '{}'", fields[1]),
            })?
        };
        let k: CurveKind = fields[2].trim().parse().map_err(|e: Error| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        if kind != Some(k) {
            if let Some(done) = flush(&mut grid, &mut values, &mut kind)? {
                out.push(done);
            }
            kind = Some(k);
        }
        grid.push(r_val);
        values.push(v);
    }
    if !saw_header {
        return Err(Error::Parse {
            line: 1,
            msg: "missing header 'r,value,kind'".into(),
        });
    }
    if let Some(done) = flush(&mut grid, &mut values, &mut kind)? {
        out.push(done);
    }
    Ok(out)
}

/// Writes an envelope as `coordinate,segment,r,lower,observed,upper` rows;
/// masked coordinates keep their index with empty value fields.
pub fn write_envelope(
    w: &mut impl Write,
    curves: &CurveSet,
    envelope: &EnvelopeResult,
) -> Result<()> {
    writeln!(w, "coordinate,segment,r,lower,observed,upper")?;
    let field = |x: f64| {
        if x.is_nan() {
            String::new()
        } else {
            x.to_string()
        }
    };
    for j in 0..curves.len() {
        let segment = curves
            .segment_of(j)
            .map(|k| k.to_string())
            .unwrap_or_default();
        writeln!(
            w,
            "{j},{segment},{},{},{},{}",
            curves.r()[j],
            field(envelope.lower[j]),
            field(curves.observed()[j]),
            field(envelope.upper[j]),
        )?;
    }
    Ok(())
}

/// Writes a field as `node_index,x,y,z,value` rows.
pub fn write_field(w: &mut impl Write, field: &GridField) -> Result<()> {
    writeln!(w, "node_index,x,y,z,value")?;
    for (i, (node, v)) in field.mesh().nodes().iter().zip(field.values()).enumerate() {
        writeln!(w, "{i},{},{},{},{v}", node.x(), node.y(), node.z())?;
    }
    Ok(())
}

/// Writes a fit report as key=value lines.
pub fn write_fit_report(w: &mut impl Write, fit: &FitResult) -> Result<()> {
    for (name, value) in fit.names.iter().zip(&fit.params) {
        writeln!(w, "{name}={value}")?;
    }
    writeln!(w, "contrast={}", fit.contrast_value)?;
    writeln!(w, "converged={}", fit.converged)?;
    writeln!(w, "at_boundary={}", fit.at_boundary)?;
    writeln!(w, "n_evals={}", fit.n_evals)?;
    Ok(())
}

/// Writes the optimizer trace as `step,<param names...>,contrast` rows.
pub fn write_fit_trace(w: &mut impl Write, fit: &FitResult) -> Result<()> {
    write!(w, "step")?;
    for name in &fit.names {
        write!(w, ",{name}")?;
    }
    writeln!(w, ",contrast")?;
    for (step, (params, value)) in fit.trace.iter().enumerate() {
        write!(w, "{step}")?;
        for p in params {
            write!(w, ",{p}")?;
        }
        writeln!(w, ",{value}")?;
    }
    Ok(())
}

/// Writes a thinning sweep as `thinning,p_lo,p_hi` rows.
pub fn write_sweep(w: &mut impl Write, sweep: &ThinningSweep) -> Result<()> {
    writeln!(w, "thinning,p_lo,p_hi")?;
    for (t, (lo, hi)) in sweep.p_lo.iter().zip(&sweep.p_hi).enumerate() {
        writeln!(w, "{t},{lo},{hi}")?;
    }
    Ok(())
}

/// Writes a manifest: key=value lines sorted by key, so identical
/// configurations produce identical bytes.
pub fn write_manifest(w: &mut impl Write, entries: &[(&str, String)]) -> Result<()> {
    let mut sorted: Vec<_> = entries.to_vec();
    sorted.sort();
    for (key, value) in sorted {
        writeln!(w, "{key}={value}")?;
    }
    Ok(())
}
