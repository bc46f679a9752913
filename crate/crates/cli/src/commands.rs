use std::collections::BTreeMap;
use std::f64::consts::PI;

use orbifold_spectral::basis::{
    check_resolvable, enumerate_basis, resolvable_prefix, BasisSpec, SampledBasis,
};
use orbifold_spectral::engine::{
    dirichlet_energy_coeffs, forward_transform, inverse_transform, l2_norm, lowpass_coeffs,
};
use orbifold_spectral::export::{
    format_number, write_basis_jsonl, write_coeffs_csv, write_field_csv, FieldDomain,
};
use orbifold_spectral::geometry::moebius_embed_raw;
use orbifold_spectral::mesh::{export_mesh, MoebiusMesh};
use orbifold_spectral::periodicity::{p_jnd, p_jnd_sym, p_plus_grid, Cents, PeriodicityConfig};
use orbifold_spectral::{GridField, SpectrumCoeffs};
use serde::Serialize;

use crate::args::{
    BasisArgs, Command, Common, MeshField, MoebiusArgs, OutputFormat, PeriodicityCurveArgs,
    SectionArgs, SmoothArgs,
};
use crate::manifest::{OutputSet, RunManifest};
use crate::RunError;

/// Runs one subcommand and returns the manifest it wrote.
pub fn run(command: &Command) -> Result<RunManifest, RunError> {
    validate_common(command.common())?;
    match command {
        Command::PeriodicityCurve(a) => periodicity_curve(a),
        Command::Basis(a) => basis(a),
        Command::Smooth(a) => smooth(a),
        Command::Section(a) => section(a),
        Command::Moebius(a) => moebius(a),
    }
}

fn usage(msg: impl Into<String>) -> RunError {
    RunError::Usage(msg.into())
}

fn validate_common(c: &Common) -> Result<(), RunError> {
    if !(c.gamma > 0.0 && c.gamma.is_finite()) {
        return Err(usage(format!("--gamma must be positive, got {}", c.gamma)));
    }
    if c.grid < 2 {
        return Err(usage(format!("--grid must be at least 2, got {}", c.grid)));
    }
    if !(c.jnd_cents > 0.0 && c.jnd_cents.is_finite()) {
        return Err(usage(format!("--jnd-cents must be positive, got {}", c.jnd_cents)));
    }
    if !(c.f0 > 0.0 && c.f0.is_finite()) {
        return Err(usage(format!("--f0 must be positive, got {}", c.f0)));
    }
    if c.n_modes == 0 {
        return Err(usage("--n-modes must be at least 1"));
    }
    Ok(())
}

fn require_format(c: &Common, allowed: &[OutputFormat], command: &str) -> Result<OutputFormat, RunError> {
    match c.format {
        None => Ok(allowed[0]),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => Err(usage(format!(
            "{command} cannot write --format {f:?}; supported: {allowed:?}"
        ))),
    }
}

fn periodicity_config(c: &Common) -> Result<PeriodicityConfig, RunError> {
    Ok(PeriodicityConfig::new(c.jnd_cents)?)
}

fn manifest_base(command: &str, c: &Common, flags: impl Serialize) -> RunManifest {
    RunManifest {
        command: command.to_string(),
        software_version: env!("CARGO_PKG_VERSION").to_string(),
        gamma: c.gamma,
        grid: c.grid,
        jnd_cents: c.jnd_cents,
        n_cut: c.n_cut,
        n_modes: c.n_modes,
        f0_hz: c.f0,
        flags: serde_json::to_value(flags).unwrap_or(serde_json::Value::Null),
        basis_ordering: None,
        truncation: None,
        diagnostics: BTreeMap::new(),
        outputs: Vec::new(),
    }
}

fn record_basis(m: &mut RunManifest, c: &Common) {
    m.basis_ordering = Some(BasisSpec::ordering_description().to_string());
    m.truncation = Some(format!(
        "first {} symmetric modes on a {}x{} grid",
        c.n_modes, c.grid, c.grid
    ));
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> orbifold_spectral::Result<()>) -> Result<Vec<u8>, RunError> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn periodicity_curve(a: &PeriodicityCurveArgs) -> Result<RunManifest, RunError> {
    let c = &a.common;
    let format = require_format(c, &[OutputFormat::Csv, OutputFormat::Json], "periodicity-curve")?;
    if !(a.d_step > 0.0 && a.d_step.is_finite()) {
        return Err(usage("--d-step must be positive"));
    }
    if !(0.0 <= a.d_min && a.d_min <= a.d_max && a.d_max <= 1200.0) {
        return Err(usage("need 0 <= --d-min <= --d-max <= 1200"));
    }
    let cfg = periodicity_config(c)?;
    let steps = ((a.d_max - a.d_min) / a.d_step + 1e-9).floor() as usize;

    #[derive(Serialize)]
    struct Row {
        d_cents: f64,
        p_jnd: f64,
        p_plus: f64,
    }
    let mut rows = Vec::with_capacity(steps + 1);
    for s in 0..=steps {
        let d = (a.d_min + s as f64 * a.d_step).min(a.d_max);
        rows.push(Row {
            d_cents: d,
            p_jnd: p_jnd(Cents(d), &cfg)?,
            p_plus: p_jnd_sym(Cents(d), &cfg)?,
        });
    }

    let mut out = OutputSet::new(&c.out_dir)?;
    match format {
        OutputFormat::Json => {
            let mut text = serde_json::to_string_pretty(&rows)
                .map_err(|e| RunError::Internal(e.to_string()))?;
            text.push('\n');
            out.write("periodicity_curve.json", text.as_bytes())?;
        }
        _ => {
            let mut text = String::from("d_cents,P_JND,P_plus\n");
            for r in &rows {
                text.push_str(&format!(
                    "{},{},{}\n",
                    format_number(r.d_cents),
                    format_number(r.p_jnd),
                    format_number(r.p_plus)
                ));
            }
            out.write("periodicity_curve.csv", text.as_bytes())?;
        }
    }
    let mut m = manifest_base("periodicity-curve", c, a);
    m.diagnostics.insert("rows".into(), rows.len() as f64);
    out.finish(m)
}

fn nyquist_refusal(c: &Common, modes: &[orbifold_spectral::SymmetricMode]) -> Result<(), RunError> {
    if let Err(e) = check_resolvable(modes, c.grid) {
        let fit = resolvable_prefix(modes, c.grid);
        return Err(RunError::Numerical(format!(
            "{e}; at most {fit} of the requested {} modes fit on this grid",
            modes.len()
        )));
    }
    Ok(())
}

fn basis(a: &BasisArgs) -> Result<RunManifest, RunError> {
    let c = &a.common;
    require_format(c, &[OutputFormat::Json], "basis")?;
    let spec = BasisSpec::new(c.gamma, c.n_modes)?;
    let modes = enumerate_basis(&spec);
    nyquist_refusal(c, &modes)?;
    if let Some(&k) = a.mode_fields.iter().find(|&&k| k >= modes.len()) {
        return Err(usage(format!("--mode-fields index {k} is beyond --n-modes {}", modes.len())));
    }

    let mut out = OutputSet::new(&c.out_dir)?;
    out.write("basis.jsonl", &csv_bytes(|w| write_basis_jsonl(&modes, w))?)?;
    for &k in &a.mode_fields {
        let field = modes[k].sample_field(c.grid)?;
        let bytes = csv_bytes(|w| write_field_csv(&field, a.domain.into(), w))?;
        out.write(&format!("mode_{k}.csv"), &bytes)?;
    }
    let mut m = manifest_base("basis", c, a);
    record_basis(&mut m, c);
    m.diagnostics.insert("max_eigenvalue".into(), modes.last().map_or(0.0, |m| m.eigenvalue));
    out.finish(m)
}

/// Sampled periodicity field, its coefficients, and the smoothed field.
pub struct Smoothing {
    pub basis: SampledBasis,
    pub original: GridField,
    pub coeffs: SpectrumCoeffs,
    pub smoothed: GridField,
}

/// Samples P+ on the grid and projects it onto the first `n_cut + 1` modes.
pub fn smoothing_pipeline(c: &Common) -> Result<Smoothing, RunError> {
    if c.n_cut >= c.n_modes {
        return Err(usage(format!(
            "--n-cut {} must be below --n-modes {}",
            c.n_cut, c.n_modes
        )));
    }
    let spec = BasisSpec::new(c.gamma, c.n_modes)?;
    let modes = enumerate_basis(&spec);
    nyquist_refusal(c, &modes)?;
    let basis = SampledBasis::from_modes(spec, modes, c.grid)?;
    let cfg = periodicity_config(c)?;
    let original = p_plus_grid(c.gamma, c.grid, &cfg)?;
    let coeffs = forward_transform(&original, &basis)?;
    let smoothed = inverse_transform(&coeffs.truncated(c.n_cut), &basis)?;
    Ok(Smoothing {
        basis,
        original,
        coeffs,
        smoothed,
    })
}

fn smoothing_diagnostics(m: &mut RunManifest, s: &Smoothing, n_cut: usize) -> Result<(), RunError> {
    let d = &mut m.diagnostics;
    d.insert("original_min".into(), s.original.min_value());
    d.insert("original_max".into(), s.original.max_value());
    d.insert("smoothed_min".into(), s.smoothed.min_value());
    d.insert("smoothed_max".into(), s.smoothed.max_value());
    d.insert(
        "smoothed_negative_nodes".into(),
        s.smoothed.samples().iter().filter(|&&v| v < 0.0).count() as f64,
    );
    d.insert("l2_original".into(), l2_norm(&s.original));
    d.insert("l2_residual".into(), l2_norm(&s.original.sub(&s.smoothed)?));
    d.insert(
        "dirichlet_energy_smoothed".into(),
        dirichlet_energy_coeffs(&s.coeffs.truncated(n_cut), &s.basis)?,
    );
    d.insert(
        "dirichlet_energy_basis".into(),
        dirichlet_energy_coeffs(&s.coeffs, &s.basis)?,
    );
    Ok(())
}

fn smooth(a: &SmoothArgs) -> Result<RunManifest, RunError> {
    let c = &a.common;
    require_format(c, &[OutputFormat::Csv], "smooth")?;
    let s = smoothing_pipeline(c)?;
    let filter = lowpass_coeffs(c.n_cut, s.basis.len())?;
    let filter_field = inverse_transform(&SpectrumCoeffs::new(*s.basis.spec(), filter.values)?, &s.basis)?;
    let domain: FieldDomain = a.domain.into();

    let mut out = OutputSet::new(&c.out_dir)?;
    out.write("original.csv", &csv_bytes(|w| write_field_csv(&s.original, domain, w))?)?;
    out.write("filter.csv", &csv_bytes(|w| write_field_csv(&filter_field, domain, w))?)?;
    out.write("smoothed.csv", &csv_bytes(|w| write_field_csv(&s.smoothed, domain, w))?)?;
    out.write(
        "coefficients.csv",
        &csv_bytes(|w| write_coeffs_csv(&s.coeffs, s.basis.modes(), w))?,
    )?;
    out.write("basis.jsonl", &csv_bytes(|w| write_basis_jsonl(s.basis.modes(), w))?)?;

    let mut m = manifest_base("smooth", c, a);
    record_basis(&mut m, c);
    smoothing_diagnostics(&mut m, &s, c.n_cut)?;
    out.finish(m)
}

/// Node pairs on the line `(c + t, c - t)` with `c = gamma / 2`, as
/// `(t, i, j)` for `t` running over the grid spacing from `-c` to `c`.
pub fn section_nodes(gamma: f64, n: usize) -> Vec<(f64, usize, usize)> {
    let half = (n / 2) as isize;
    let h = gamma / n as f64;
    (-half..=half)
        .map(|m| {
            let i = (half + m).rem_euclid(n as isize) as usize;
            let j = (half - m).rem_euclid(n as isize) as usize;
            (m as f64 * h, i, j)
        })
        .collect()
}

fn section(a: &SectionArgs) -> Result<RunManifest, RunError> {
    let c = &a.common;
    require_format(c, &[OutputFormat::Csv], "section")?;
    if c.grid % 2 != 0 {
        return Err(usage("section needs an even --grid so the centre is a node"));
    }
    let s = smoothing_pipeline(c)?;
    let nodes = section_nodes(c.gamma, c.grid);
    let mut text = String::from("arc_parameter,P_plus_sampled,P_plus_smoothed\n");
    let (mut tv_orig, mut tv_smooth) = (0.0, 0.0);
    let mut section_min = f64::INFINITY;
    let mut prev: Option<(f64, f64)> = None;
    for &(t, i, j) in &nodes {
        let (o, sm) = (s.original.get(i, j), s.smoothed.get(i, j));
        text.push_str(&format!(
            "{},{},{}\n",
            format_number(t),
            format_number(o),
            format_number(sm)
        ));
        if let Some((po, ps)) = prev {
            tv_orig += (o - po).abs();
            tv_smooth += (sm - ps).abs();
        }
        section_min = section_min.min(sm);
        prev = Some((o, sm));
    }

    let mut out = OutputSet::new(&c.out_dir)?;
    out.write("section.csv", text.as_bytes())?;
    let mut m = manifest_base("section", c, a);
    record_basis(&mut m, c);
    smoothing_diagnostics(&mut m, &s, c.n_cut)?;
    m.diagnostics.insert("section_smoothed_min".into(), section_min);
    m.diagnostics.insert("section_total_variation_sampled".into(), tv_orig);
    m.diagnostics.insert("section_total_variation_smoothed".into(), tv_smooth);
    out.finish(m)
}

fn moebius(a: &MoebiusArgs) -> Result<RunManifest, RunError> {
    let c = &a.common;
    require_format(c, &[OutputFormat::Ply], "moebius")?;
    let resolution = a.resolution.unwrap_or(c.grid / 2);
    if resolution == 0 {
        return Err(usage("--resolution must be at least 1"));
    }
    if c.grid % (2 * resolution) != 0 {
        return Err(usage(format!(
            "--grid {} must be a multiple of twice --resolution {resolution}",
            c.grid
        )));
    }
    let field = match a.field {
        MeshField::Periodicity => p_plus_grid(c.gamma, c.grid, &periodicity_config(c)?)?,
        MeshField::Smoothed => smoothing_pipeline(c)?.smoothed,
        MeshField::Eigenfunction => {
            if a.mode >= c.n_modes {
                return Err(usage(format!("--mode {} is beyond --n-modes {}", a.mode, c.n_modes)));
            }
            let modes = enumerate_basis(&BasisSpec::new(c.gamma, a.mode + 1)?);
            let mode = modes[a.mode];
            nyquist_refusal(c, std::slice::from_ref(&mode))?;
            mode.sample_field(c.grid)?
        }
    };
    let mesh = export_mesh(&field, resolution)?;
    let mut ply = Vec::new();
    mesh.write_ply(&mut ply)?;

    let mut out = OutputSet::new(&c.out_dir)?;
    out.write("moebius.ply", &ply)?;
    let mut m = manifest_base("moebius", c, a);
    if a.field != MeshField::Periodicity {
        record_basis(&mut m, c);
    }
    let d = &mut m.diagnostics;
    d.insert("vertices".into(), mesh.vertices.len() as f64);
    d.insert("faces".into(), mesh.faces.len() as f64);
    d.insert("scalar_min".into(), mesh.scalars.iter().copied().fold(f64::INFINITY, f64::min));
    d.insert("scalar_max".into(), mesh.scalars.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    d.insert("seam_max_gap".into(), seam_gap(&mesh));
    out.finish(m)
}

/// Largest distance between the strip end `(pi, r)` and the vertex it is
/// welded to.
pub fn seam_gap(mesh: &MoebiusMesh) -> f64 {
    let m = mesh.resolution;
    (0..=m)
        .map(|j| {
            let r = j as f64 / m as f64 - 0.5;
            moebius_embed_raw(PI, r).distance(&mesh.vertices[m - j])
        })
        .fold(0.0, f64::max)
}
