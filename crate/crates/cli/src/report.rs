//! CSV emission helpers. All floating-point values are written with 17
//! significant digits so files are diff-able and reproducible bit for bit.

use std::fs;
use std::io::Write;
use std::path::Path;

use rom_core::estimator::{EffectivitySeries, ErrorEstimate};

/// Full-precision formatting (17 significant digits).
pub fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Write rows of already-formatted fields.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut f = fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}

/// Per-step estimator series. Row `k` carries the estimate at node `k` and
/// the residual/Lipschitz data of the step that produced it (empty at
/// `k = 0`). The exact-error and effectivity columns appear only when a full
/// solve was available.
pub fn write_series(
    path: &Path,
    dt: f64,
    estimate: &ErrorEstimate,
    exact: Option<(&[f64], &EffectivitySeries)>,
) -> anyhow::Result<()> {
    let mut header = vec!["k", "t", "delta_tilde", "residual", "lip_A", "lip_h"];
    if exact.is_some() {
        header.push("exact_error");
        header.push("kappa");
    }
    let mut rows = Vec::with_capacity(estimate.per_step.len());
    for (k, delta) in estimate.per_step.iter().enumerate() {
        let mut row = vec![k.to_string(), fmt(k as f64 * dt), fmt(*delta)];
        if k == 0 {
            row.extend(["", "", ""].map(str::to_string));
        } else {
            row.push(fmt(estimate.residual_norms[k - 1]));
            row.push(fmt(estimate.lip_op[k - 1]));
            row.push(fmt(estimate.lip_flux[k - 1]));
        }
        if let Some((errors, eff)) = exact {
            row.push(fmt(errors[k]));
            row.push(eff.values[k].map(fmt).unwrap_or_default());
        }
        rows.push(row);
    }
    write_csv(path, &header, &rows)
}
