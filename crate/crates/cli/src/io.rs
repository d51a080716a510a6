//! Field export and import: CSV samples, 16-bit PGM heatmap.

use anyhow::{anyhow, Context};
use breather_core::{Complex, Error, FieldMeta, GridSpec, Real, WaveField};
use std::io::Write;
use std::path::{Path, PathBuf};

/// Write PREFIX.csv and PREFIX.pgm; returns the artifact paths (the JSON
/// metadata is written by the manifest module).
pub fn write_field_outputs<R: Real>(
    field: &WaveField<R>,
    prefix: &Path,
) -> anyhow::Result<Vec<PathBuf>> {
    let csv = prefix.with_extension("csv");
    let pgm = prefix.with_extension("pgm");

    let g = field.grid();
    let xs = g.x_values();
    let ts = g.t_values();
    let mut w = std::io::BufWriter::new(std::fs::File::create(&csv)?);
    writeln!(w, "x,t,re_v,im_v,abs_v")?;
    for (it, t) in ts.iter().enumerate() {
        for (ix, x) in xs.iter().enumerate() {
            let v = field.value(ix, it);
            writeln!(w, "{},{},{},{},{}", x, t, v.re, v.im, v.abs())?;
        }
    }
    w.flush()?;

    // 16-bit binary PGM, |v| mapped linearly from [0, 2N+1]; top row is t_max
    let peak = (2 * field.meta().order + 1) as f64;
    let mut bytes = Vec::with_capacity(64 + 2 * g.nx * g.nt);
    bytes.extend_from_slice(format!("P5\n{} {}\n65535\n", g.nx, g.nt).as_bytes());
    for it in (0..g.nt).rev() {
        for ix in 0..g.nx {
            let m = field.modulus(ix, it);
            let v = if m.is_finite() {
                ((m / peak).clamp(0.0, 1.0) * 65535.0).round() as u16
            } else {
                0
            };
            bytes.extend_from_slice(&v.to_be_bytes());
        }
    }
    std::fs::write(&pgm, bytes)?;
    Ok(vec![csv, pgm])
}

/// Parse a field CSV back into a wave field, reconstructing the grid from
/// the sample coordinates. Looks for the sibling metadata JSON to recover
/// provenance; absent metadata only disables classification.
pub fn read_field_csv(path: &Path) -> anyhow::Result<(WaveField<f64>, Option<FieldMeta>)> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, 1, "empty file"))?;
    if header.trim() != "x,t,re_v,im_v,abs_v" {
        return Err(parse_err(1, 1, "expected header `x,t,re_v,im_v,abs_v`"));
    }
    let mut xs: Vec<f64> = Vec::new();
    let mut ts: Vec<f64> = Vec::new();
    let mut values: Vec<Complex<f64>> = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(parse_err(i + 1, 1, "expected 5 comma-separated fields"));
        }
        let field = |j: usize| -> anyhow::Result<f64> {
            cols[j].trim().parse::<f64>().map_err(|_| {
                parse_err(
                    i + 1,
                    cols[..j].iter().map(|c| c.len() + 1).sum::<usize>() + 1,
                    "not a number",
                )
            })
        };
        let x = field(0)?;
        let t = field(1)?;
        let re = field(2)?;
        let im = field(3)?;
        if ts.last() != Some(&t) {
            ts.push(t);
        }
        if ts.len() == 1 {
            xs.push(x);
        }
        values.push(Complex::new(re, im));
    }
    if values.is_empty() || xs.is_empty() {
        return Err(parse_err(2, 1, "no samples"));
    }
    if values.len() != xs.len() * ts.len() {
        return Err(anyhow!(
            "ragged grid: {} samples for {} x-values and {} t-values",
            values.len(),
            xs.len(),
            ts.len()
        ));
    }
    let grid = GridSpec::new(
        xs[0],
        *xs.last().unwrap(),
        xs.len(),
        ts[0],
        *ts.last().unwrap(),
        ts.len(),
    )
    .map_err(|e| anyhow!("{e}"))?;

    let meta = read_sibling_meta(path);
    let fallback = FieldMeta {
        order: 0,
        a_tilde: vec![],
        b_tilde: vec![],
        phase: 0.0,
        precision: 53,
        representation: "unknown".into(),
    };
    let field = WaveField::from_samples(grid, values, meta.clone().unwrap_or(fallback))
        .map_err(|e: Error| anyhow!("{e}"))?;
    Ok((field, meta))
}

fn read_sibling_meta(path: &Path) -> Option<FieldMeta> {
    let sib = path.with_extension("json");
    let text = std::fs::read_to_string(sib).ok()?;
    let v: serde_json::Value = serde_json::from_str(&text).ok()?;
    serde_json::from_value(v.get("field")?.clone()).ok()
}

fn parse_err(line: usize, column: usize, message: &str) -> anyhow::Error {
    anyhow!(Error::Parse {
        line,
        column,
        message: message.to_string(),
    })
}
