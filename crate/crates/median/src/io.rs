//! Text formats: point sets as `re im weight` lines, frames as `theta c1 c2`.
//! Blank lines and lines starting with `#` are skipped.

use crate::{MedianError, QuadrantFrame, WeightedPointSet, C64};

fn fields(line: usize, text: &str, n: usize) -> Result<Vec<f64>, MedianError> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    if parts.len() != n {
        return Err(MedianError::Parse { line, msg: format!("expected {n} fields, got {}", parts.len()) });
    }
    parts.iter().map(|p| p.parse::<f64>().map_err(|e| MedianError::Parse { line, msg: format!("{p}: {e}") })).collect()
}

fn content(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_points(text: &str) -> Result<WeightedPointSet, MedianError> {
    let pts = content(text).map(|(k, l)| fields(k, l, 3).map(|f| (C64::new(f[0], f[1]), f[2]))).collect::<Result<Vec<_>, _>>()?;
    WeightedPointSet::new(pts)
}

pub fn format_points(pts: &WeightedPointSet) -> String {
    pts.points().iter().map(|(z, w)| format!("{:e} {:e} {:e}\n", z.re, z.im, w)).collect()
}

pub fn parse_frame(text: &str) -> Result<QuadrantFrame, MedianError> {
    let mut lines = content(text);
    let (k, l) = lines.next().ok_or(MedianError::Parse { line: 1, msg: "no frame".into() })?;
    let f = fields(k, l, 3)?;
    if let Some((k, _)) = lines.next() {
        return Err(MedianError::Parse { line: k, msg: "trailing content".into() });
    }
    Ok(QuadrantFrame { theta: f[0], c1: f[1], c2: f[2] })
}

pub fn format_frame(f: &QuadrantFrame) -> String {
    format!("{:e} {:e} {:e}\n", f.theta, f.c1, f.c2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrips() {
        let pts = WeightedPointSet::new(vec![(C64::new(0.1, -2.5), 1.0), (C64::new(1e-300, 3.0), 0.25)]).unwrap();
        assert_eq!(parse_points(&format_points(&pts)).unwrap(), pts);
        let f = QuadrantFrame { theta: 1.2345678901234567, c1: -0.1, c2: 3.0 };
        assert_eq!(parse_frame(&format_frame(&f)).unwrap(), f);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_points("# only\n").unwrap_err(), MedianError::Empty);
        assert!(matches!(parse_points("1 2\n"), Err(MedianError::Parse { line: 1, .. })));
        assert!(matches!(parse_points("1 2 3\n1 x 1\n"), Err(MedianError::Parse { line: 2, .. })));
        assert!(matches!(parse_frame("0 0 0\n1 1 1\n"), Err(MedianError::Parse { line: 2, .. })));
    }
}
