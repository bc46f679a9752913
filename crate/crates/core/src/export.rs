//! Text exports: CSV field and coefficient dumps, JSON-lines basis
//! manifests. Numbers are written with at most 9 significant digits so
//! output is byte-stable across platforms.

use std::io::Write;

use serde::Serialize;

use crate::basis::{ModeKind, SymmetricMode};
use crate::engine::SpectrumCoeffs;
use crate::error::Result;
use crate::field::GridField;

/// Shortest decimal that round-trips the value rounded to 9 significant
/// digits. Negative zero prints as `0`.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.8e}")
        .parse()
        .expect("formatted float parses");
    format!("{rounded}")
}

/// Which nodes a field dump covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldDomain {
    /// Nodes with `y <= x`, one per orbit apart from the fixed diagonal.
    Fundamental,
    /// Every torus node.
    Torus,
}

/// `x,y,value` rows in node order.
pub fn write_field_csv<W: Write>(field: &GridField, domain: FieldDomain, w: &mut W) -> Result<()> {
    writeln!(w, "x,y,value")?;
    let n = field.n();
    for i in 0..n {
        let cols = match domain {
            FieldDomain::Fundamental => i + 1,
            FieldDomain::Torus => n,
        };
        for j in 0..cols {
            writeln!(
                w,
                "{},{},{}",
                format_number(field.coord(i)),
                format_number(field.coord(j)),
                format_number(field.get(i, j))
            )?;
        }
    }
    Ok(())
}

/// `k,c1,c2,eigenvalue,coefficient` rows.
pub fn write_coeffs_csv<W: Write>(
    coeffs: &SpectrumCoeffs,
    modes: &[SymmetricMode],
    w: &mut W,
) -> Result<()> {
    writeln!(w, "k,c1,c2,eigenvalue,coefficient")?;
    for (m, c) in modes.iter().zip(&coeffs.coeffs) {
        writeln!(
            w,
            "{},{},{},{},{}",
            m.k,
            m.c1,
            m.c2,
            format_number(m.eigenvalue),
            format_number(*c)
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ManifestRow {
    k: usize,
    kind: ModeKind,
    c1: i32,
    c2: i32,
    eigenvalue: f64,
    norm_const: f64,
}

/// One JSON object per mode with `k, kind, c1, c2, eigenvalue, norm_const`.
pub fn write_basis_jsonl<W: Write>(modes: &[SymmetricMode], w: &mut W) -> Result<()> {
    for m in modes {
        let row = ManifestRow {
            k: m.k,
            kind: m.kind,
            c1: m.c1,
            c2: m.c2,
            eigenvalue: m.eigenvalue,
            norm_const: m.norm_const,
        };
        serde_json::to_writer(&mut *w, &row).map_err(std::io::Error::from)?;
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{enumerate_basis, BasisSpec};

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(0.1), "0.1");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(-2.5), "-2.5");
        assert_eq!(format_number(std::f64::consts::PI), "3.14159265");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333");
        assert_eq!(format_number(123456789012.0), "123456789000");
        assert_eq!(format_number(2f64.log2() * 14f64.log2()), "3.80735492");
    }

    #[test]
    fn field_csv_domains() {
        let f = GridField::from_fn(12.0, 3, |x, y| x + y).unwrap();
        let mut buf = Vec::new();
        write_field_csv(&f, FieldDomain::Fundamental, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "x,y,value\n0,0,0\n4,0,4\n4,4,8\n8,0,8\n8,4,12\n8,8,16\n");
        let mut buf = Vec::new();
        write_field_csv(&f, FieldDomain::Torus, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 10);
    }

    #[test]
    fn basis_jsonl_rows() {
        let modes = enumerate_basis(&BasisSpec::new(12.0, 3).unwrap());
        let mut buf = Vec::new();
        write_basis_jsonl(&modes, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<serde_json::Value> =
            text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0]["kind"], "constant");
        assert_eq!(rows[1]["kind"], "offdiag-cos");
        assert_eq!(rows[2]["c1"], 1);
        assert_eq!(rows[1]["eigenvalue"].as_f64().unwrap(), modes[1].eigenvalue);
    }

    #[test]
    fn coeff_csv_rows() {
        let spec = BasisSpec::new(12.0, 2).unwrap();
        let modes = enumerate_basis(&spec);
        let c = SpectrumCoeffs::new(spec, vec![1.5, -0.25]).unwrap();
        let mut buf = Vec::new();
        write_coeffs_csv(&c, &modes, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "k,c1,c2,eigenvalue,coefficient\n0,0,0,0,1.5\n1,1,0,0.274155678,-0.25\n"
        );
    }
}
