//! Plain-text problem files.
//!
//! ```text
//! spectral-quadratic 1
//! n <n>
//! kappa <kappa>
//! spectrum <set1..set7|even|nonrand|custom>
//! seed <u64>
//! rotation <0|1>
//! eigenvalues
//! <n lines, one value each>
//! w1            (only when rotation = 1; likewise w2, w3)
//! <n lines>
//! b
//! <n lines>
//! end
//! ```
//!
//! Values are written in shortest round-trip exponent form, so a file read
//! back reproduces the problem bit for bit. Blank lines and lines starting
//! with `#` are ignored.

use std::io::{BufRead, Write};

use super::{Householder, QuadraticProblem, SpectrumKind};
use crate::error::{Error, Result};

const MAGIC: &str = "spectral-quadratic 1";

impl QuadraticProblem {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{MAGIC}")?;
        writeln!(w, "n {}", self.n())?;
        writeln!(w, "kappa {:e}", self.kappa)?;
        writeln!(w, "spectrum {}", self.kind.map_or("custom", |k| k.name()))?;
        writeln!(w, "seed {}", self.seed)?;
        writeln!(w, "rotation {}", u8::from(self.householder.is_some()))?;
        let block = |w: &mut W, name: &str, xs: &[f64]| -> Result<()> {
            writeln!(w, "{name}")?;
            for x in xs {
                writeln!(w, "{x:e}")?;
            }
            Ok(())
        };
        block(&mut w, "eigenvalues", &self.v)?;
        if let Some(h) = &self.householder {
            block(&mut w, "w1", &h.w[0])?;
            block(&mut w, "w2", &h.w[1])?;
            block(&mut w, "w3", &h.w[2])?;
        }
        block(&mut w, "b", &self.b)?;
        writeln!(w, "end")?;
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            lines.push((i + 1, t.to_string()));
        }
        let mut it = lines.into_iter();
        let mut next = |what: &str| -> Result<(usize, String)> {
            it.next().ok_or(Error::Parse {
                line: 0,
                msg: format!("unexpected end of file, expected {what}"),
            })
        };
        let (line, magic) = next("header")?;
        if magic != MAGIC {
            return Err(Error::Parse { line, msg: format!("expected '{MAGIC}'") });
        }
        let mut field = |key: &str| -> Result<(usize, String)> {
            let (line, text) = next(key)?;
            match text.split_once(char::is_whitespace) {
                Some((k, v)) if k == key => Ok((line, v.trim().to_string())),
                _ => Err(Error::Parse { line, msg: format!("expected '{key} <value>'") }),
            }
        };
        let parse_err = |line: usize, msg: String| Error::Parse { line, msg };

        let (l, n) = field("n")?;
        let n: usize = n.parse().map_err(|e| parse_err(l, format!("bad n: {e}")))?;
        let (l, kappa) = field("kappa")?;
        let kappa: f64 = kappa.parse().map_err(|e| parse_err(l, format!("bad kappa: {e}")))?;
        let (l, kind) = field("spectrum")?;
        let kind = if kind == "custom" {
            None
        } else {
            Some(kind.parse::<SpectrumKind>().map_err(|e| parse_err(l, e.to_string()))?)
        };
        let (l, seed) = field("seed")?;
        let seed: u64 = seed.parse().map_err(|e| parse_err(l, format!("bad seed: {e}")))?;
        let (l, rot) = field("rotation")?;
        let rotation = match rot.as_str() {
            "0" => false,
            "1" => true,
            _ => return Err(parse_err(l, "rotation must be 0 or 1".into())),
        };

        let mut block = |name: &str| -> Result<Vec<f64>> {
            let (line, head) = next(name)?;
            if head != name {
                return Err(parse_err(line, format!("expected block '{name}'")));
            }
            (0..n)
                .map(|_| {
                    let (line, t) = next(name)?;
                    t.parse::<f64>().map_err(|e| parse_err(line, format!("bad value in {name}: {e}")))
                })
                .collect()
        };
        let v = block("eigenvalues")?;
        let householder = if rotation {
            Some(Householder { w: [block("w1")?, block("w2")?, block("w3")?] })
        } else {
            None
        };
        let b = block("b")?;
        let (line, end) = next("end")?;
        if end != "end" {
            return Err(parse_err(line, "expected 'end'".into()));
        }
        let mut p = QuadraticProblem::from_parts(v, householder, b, kind, seed)?;
        p.kappa = kappa;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_bit_exact() {
        for kind in [SpectrumKind::Set3, SpectrumKind::NonRandom, SpectrumKind::Even] {
            let p = QuadraticProblem::generate(kind, 20, 1e5, 42).unwrap();
            let mut buf = Vec::new();
            p.write_to(&mut buf).unwrap();
            let q = QuadraticProblem::read_from(buf.as_slice()).unwrap();
            assert_eq!(p, q);
        }
    }

    #[test]
    fn custom_diagonal_roundtrip() {
        let p = QuadraticProblem::diagonal(vec![1.0, 0.1 + 0.2], vec![-1e-300, 5.0]).unwrap();
        let mut buf = Vec::new();
        p.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("spectrum custom"));
        assert_eq!(QuadraticProblem::read_from(buf.as_slice()).unwrap(), p);
    }

    #[test]
    fn truncated_file_is_an_error() {
        let p = QuadraticProblem::generate(SpectrumKind::Set1, 5, 10.0, 1).unwrap();
        let mut buf = Vec::new();
        p.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cut: String = text.lines().take(12).map(|l| format!("{l}\n")).collect();
        assert!(matches!(QuadraticProblem::read_from(cut.as_bytes()), Err(Error::Parse { .. })));
        assert!(matches!(
            QuadraticProblem::read_from("not a problem\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
