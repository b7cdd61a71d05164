//! Coefficient-table file formats.
//!
//! Text: `# key: value` header lines (`kind`, `weight`/`spectral`,
//! `normalization`, `limit`) followed by `n value` body lines, one per
//! coefficient, values at 17 significant digits. Binary: magic `SCL1`,
//! little-endian u64 limit, then `limit` IEEE-754 doubles for n = 1..limit.
//!
//! Maass tables (`kind: maass`) are ingested as-is; the header records the
//! claimed normalization but nothing here can verify it.

use crate::error::{Error, Result};
use crate::forms::{CoefficientTable, TableKind};
use std::io::{BufRead, BufWriter, Read, Write};
use std::path::Path;

pub const BINARY_MAGIC: &[u8; 4] = b"SCL1";

fn kind_to_header(kind: &TableKind) -> Vec<(String, String)> {
    match kind {
        TableKind::Eigenvalue { weight } => vec![
            ("kind".into(), "eigenvalue".into()),
            ("weight".into(), weight.to_string()),
            (
                "normalization".into(),
                "lambda(n)=a(n)/n^((k-1)/2)".into(),
            ),
        ],
        TableKind::SymPower { r } => vec![
            ("kind".into(), "sym_power".into()),
            ("r".into(), r.to_string()),
        ],
        TableKind::RankinSquare { r } => vec![
            ("kind".into(), "rankin_square".into()),
            ("r".into(), r.to_string()),
        ],
        TableKind::Multiplicative => vec![("kind".into(), "multiplicative".into())],
        TableKind::Maass { spectral } => vec![
            ("kind".into(), "maass".into()),
            ("spectral".into(), format!("{spectral:.17e}")),
            (
                "normalization".into(),
                "lambda(n) as supplied (trusted)".into(),
            ),
        ],
    }
}

fn kind_from_headers(h: &std::collections::BTreeMap<String, String>) -> Result<TableKind> {
    match h.get("kind").map(|s| s.as_str()) {
        Some("eigenvalue") => {
            let weight: u32 = h
                .get("weight")
                .ok_or_else(|| Error::parse("missing weight header"))?
                .parse()
                .map_err(|_| Error::parse("bad weight header"))?;
            Ok(TableKind::Eigenvalue { weight })
        }
        Some("sym_power") => Ok(TableKind::SymPower {
            r: h.get("r")
                .ok_or_else(|| Error::parse("missing r header"))?
                .parse()
                .map_err(|_| Error::parse("bad r header"))?,
        }),
        Some("rankin_square") => Ok(TableKind::RankinSquare {
            r: h.get("r")
                .ok_or_else(|| Error::parse("missing r header"))?
                .parse()
                .map_err(|_| Error::parse("bad r header"))?,
        }),
        Some("multiplicative") => Ok(TableKind::Multiplicative),
        Some("maass") => Ok(TableKind::Maass {
            spectral: h
                .get("spectral")
                .ok_or_else(|| Error::parse("missing spectral header"))?
                .parse()
                .map_err(|_| Error::parse("bad spectral header"))?,
        }),
        Some(other) => Err(Error::parse(format!("unknown table kind '{other}'"))),
        None => Err(Error::parse("missing kind header")),
    }
}

/// Write the text format.
pub fn write_text(table: &CoefficientTable, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    let mut w = BufWriter::new(f);
    for (k, v) in kind_to_header(&table.kind) {
        writeln!(w, "# {k}: {v}")?;
    }
    writeln!(w, "# limit: {}", table.limit)?;
    writeln!(w, "# source: {}", table.source)?;
    for n in 1..=table.limit {
        writeln!(w, "{n} {:.16e}", table.value(n))?;
    }
    w.flush()?;
    Ok(())
}

/// Read the text format back.
pub fn read_text(path: &Path) -> Result<CoefficientTable> {
    let f = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(f);
    let mut headers = std::collections::BTreeMap::new();
    let mut values: Vec<f64> = Vec::new();
    let mut limit: Option<u64> = None;
    for line in reader.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once(':') {
                headers.insert(k.trim().to_string(), v.trim().to_string());
                if k.trim() == "limit" {
                    limit = Some(
                        v.trim()
                            .parse()
                            .map_err(|_| Error::parse("bad limit header"))?,
                    );
                    values = Vec::with_capacity(limit.unwrap() as usize + 1);
                    values.push(0.0);
                }
            }
            continue;
        }
        let (ns, vs) = line
            .split_once(' ')
            .ok_or_else(|| Error::parse(format!("bad body line '{line}'")))?;
        let n: u64 = ns.parse().map_err(|_| Error::parse("bad index"))?;
        if n as usize != values.len() {
            return Err(Error::parse(format!(
                "coefficient lines must be ascending from 1 (got n={n})"
            )));
        }
        values.push(vs.trim().parse().map_err(|_| Error::parse("bad value"))?);
    }
    let limit = limit.ok_or_else(|| Error::parse("missing limit header"))?;
    if values.len() as u64 != limit + 1 {
        return Err(Error::parse(format!(
            "expected {limit} coefficients, found {}",
            values.len().saturating_sub(1)
        )));
    }
    let kind = kind_from_headers(&headers)?;
    let source = headers
        .get("source")
        .cloned()
        .unwrap_or_else(|| path.display().to_string());
    Ok(CoefficientTable::from_values(limit, kind, source, values))
}

/// Write the binary format (`SCL1` + LE u64 limit + LE doubles).
pub fn write_binary(table: &CoefficientTable, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    let mut w = BufWriter::new(f);
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&table.limit.to_le_bytes())?;
    for n in 1..=table.limit {
        w.write_all(&table.value(n).to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Read the binary format. The payload carries no kind metadata; tables come
/// back tagged as generic multiplicative data.
pub fn read_binary(path: &Path) -> Result<CoefficientTable> {
    let mut f = std::fs::File::open(path)?;
    let mut magic = [0u8; 4];
    f.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(Error::parse("bad magic (want SCL1)"));
    }
    let mut lim = [0u8; 8];
    f.read_exact(&mut lim)?;
    let limit = u64::from_le_bytes(lim);
    let mut values = Vec::with_capacity(limit as usize + 1);
    values.push(0.0);
    let mut buf = vec![0u8; 8 * limit as usize];
    f.read_exact(&mut buf)?;
    for chunk in buf.chunks_exact(8) {
        values.push(f64::from_le_bytes(chunk.try_into().unwrap()));
    }
    Ok(CoefficientTable::from_values(
        limit,
        TableKind::Multiplicative,
        path.display().to_string(),
        values,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{lambda_table, EigenformSpec};
    use crate::primes::build_spf;

    #[test]
    fn text_roundtrip() {
        let spf = build_spf(100).unwrap();
        let t = lambda_table(&EigenformSpec::delta(), 100, &spf).unwrap();
        let dir = std::env::temp_dir().join("corrlab-test-io");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("delta.coef");
        write_text(&t, &path).unwrap();
        let back = read_text(&path).unwrap();
        assert_eq!(back.limit, 100);
        assert_eq!(back.kind, t.kind);
        for n in 1..=100u64 {
            assert_eq!(back.value(n).to_bits(), t.value(n).to_bits(), "n={n}");
        }
        assert!((back.value(2) + 0.530_330_085_889_910_6).abs() < 1e-12);
    }

    #[test]
    fn binary_roundtrip() {
        let spf = build_spf(64).unwrap();
        let t = lambda_table(&EigenformSpec::delta(), 64, &spf).unwrap();
        let dir = std::env::temp_dir().join("corrlab-test-io");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("delta.sclb");
        write_binary(&t, &path).unwrap();
        let back = read_binary(&path).unwrap();
        assert_eq!(back.limit, 64);
        for n in 1..=64u64 {
            assert_eq!(back.value(n).to_bits(), t.value(n).to_bits());
        }
    }

    #[test]
    fn maass_header_roundtrip() {
        let t = CoefficientTable::from_values(
            8,
            crate::forms::TableKind::Maass { spectral: 9.533_695_261_353 },
            "user-supplied".into(),
            vec![0.0, 1.0, -1.06, 0.45, 0.12, -0.38, -0.48, 0.79, 0.23],
        );
        let dir = std::env::temp_dir().join("corrlab-test-io");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("maass.coef");
        write_text(&t, &path).unwrap();
        let back = read_text(&path).unwrap();
        match back.kind {
            crate::forms::TableKind::Maass { spectral } => {
                assert!((spectral - 9.533_695_261_353).abs() < 1e-12)
            }
            _ => panic!("kind lost"),
        }
        assert_eq!(back.value(2), -1.06);
    }
}
