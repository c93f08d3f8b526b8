//! Text formats. Symbols: one coefficient per line, `scale index color re im`,
//! or `scale index color row col re im` for blocks; color 0 at the root is the
//! coarse mean. Shifts: one binary word of `dim` digits per scale, scale 1 first.

use crate::{CubeId, DyadicError, FiniteDyadicSystem, GridShift, HaarIndex, Symbol, C64};
use std::fmt::Write;

fn parse_err(line: usize, msg: impl Into<String>) -> DyadicError {
    DyadicError::Parse { line, msg: msg.into() }
}

pub fn parse_symbol(sys: &FiniteDyadicSystem, text: &str) -> Result<Symbol, DyadicError> {
    let mut entries = Vec::new();
    let mut m = 0;
    let mut width = None;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if width.is_some_and(|w| w != f.len()) || !(f.len() == 5 || f.len() == 7) {
            return Err(parse_err(n + 1, "expected 5 or 7 fields, consistently"));
        }
        width = Some(f.len());
        let ints: Vec<usize> = f[..f.len() - 2]
            .iter()
            .map(|t| t.parse().map_err(|_| parse_err(n + 1, format!("bad integer {t}"))))
            .collect::<Result<_, _>>()?;
        let re: f64 = f[f.len() - 2].parse().map_err(|_| parse_err(n + 1, "bad real part"))?;
        let im: f64 = f[f.len() - 1].parse().map_err(|_| parse_err(n + 1, "bad imaginary part"))?;
        let (row, col) = if f.len() == 7 { (ints[3], ints[4]) } else { (0, 0) };
        m = m.max(row + 1).max(col + 1);
        let beta = if ints[2] == 0 {
            if ints[0] != 0 || ints[1] != 0 {
                return Err(parse_err(n + 1, "color 0 is only the coarse mean at scale 0, index 0"));
            }
            0
        } else {
            let h = HaarIndex { cube: CubeId { scale: ints[0], index: ints[1] }, color: ints[2] };
            sys.check_haar(h).map_err(|e| parse_err(n + 1, e.to_string()))?;
            sys.basis_index(h)
        };
        entries.push((beta, row, col, C64::new(re, im)));
    }
    let mut b = Symbol::zeros(sys, m.max(1));
    for (beta, row, col, z) in entries {
        b.coeffs[beta][(row, col)] = z;
    }
    Ok(b)
}

/// Writes nonzero entries; scalar symbols use the 5-field form.
pub fn format_symbol(sys: &FiniteDyadicSystem, b: &Symbol) -> String {
    let mut out = String::new();
    for (beta, block) in b.coeffs.iter().enumerate() {
        let (scale, index, color) = match sys.basis_haar(beta) {
            None => (0, 0, 0),
            Some(h) => (h.cube.scale, h.cube.index, h.color),
        };
        for row in 0..b.m {
            for col in 0..b.m {
                let z = block[(row, col)];
                if z == C64::new(0.0, 0.0) {
                    continue;
                }
                if b.m == 1 {
                    writeln!(out, "{scale} {index} {color} {:e} {:e}", z.re, z.im).unwrap();
                } else {
                    writeln!(out, "{scale} {index} {color} {row} {col} {:e} {:e}", z.re, z.im).unwrap();
                }
            }
        }
    }
    out
}

pub fn parse_shift(text: &str, dim: usize) -> Result<GridShift, DyadicError> {
    let mut omega = Vec::new();
    for (i, word) in text.split_whitespace().enumerate() {
        if word.len() != dim || !word.chars().all(|c| c == '0' || c == '1') {
            return Err(parse_err(1, format!("digit {} is not a {dim}-bit word: {word}", i + 1)));
        }
        omega.push(word.chars().enumerate().fold(0u32, |acc, (a, c)| acc | ((c == '1') as u32) << a));
    }
    Ok(GridShift::new(omega))
}

pub fn format_shift(shift: &GridShift, dim: usize) -> String {
    shift
        .omega
        .iter()
        .map(|w| (0..dim).map(|a| if (w >> a) & 1 == 1 { '1' } else { '0' }).collect::<String>())
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DyadicParams;

    #[test]
    fn symbol_roundtrip() {
        let sys = FiniteDyadicSystem::standard(3, 2).unwrap();
        let mut b = Symbol::zeros(&sys, 2);
        b.coeffs[0][(0, 1)] = C64::new(0.5, -1.0);
        b.coeffs[7][(1, 1)] = C64::new(-2.25, 0.125);
        let text = format_symbol(&sys, &b);
        assert_eq!(parse_symbol(&sys, &text).unwrap(), b);
    }

    #[test]
    fn scalar_lines() {
        let sys = FiniteDyadicSystem::standard(2, 2).unwrap();
        let b = parse_symbol(&sys, "# root haar\n0 0 1 1.0 0.0\n1 1 1 0 2\n").unwrap();
        assert_eq!(b.m, 1);
        assert_eq!(b.coeffs[1][(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(b.coeffs[3][(0, 0)], C64::new(0.0, 2.0));
        assert!(parse_symbol(&sys, "2 0 1 1 0").is_err());
        assert!(parse_symbol(&sys, "0 0 1 1").is_err());
    }

    #[test]
    fn shift_roundtrip() {
        let s = parse_shift("01 11 00", 2).unwrap();
        assert_eq!(s.omega, vec![2, 3, 0]);
        assert_eq!(format_shift(&s, 2), "01 11 00");
        assert!(parse_shift("2", 1).is_err());
        let p = DyadicParams::new(2, 3, 2).unwrap();
        assert!(FiniteDyadicSystem::build(p, Some(s)).is_ok());
    }
}
