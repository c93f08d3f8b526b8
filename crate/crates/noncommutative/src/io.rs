//! Text formats for coefficient vectors, one coefficient per line.
//!
//! CAR: `mask re im`, where `mask` is a bitmask of the subset.
//! Tensor: `word re im`, where `word` is `i:j` pairs joined by `.` and the
//! empty word is `-`. Blank lines and `#` comments are skipped; missing
//! coefficients are zero.

use crate::tensor::{index_word, word_index};
use crate::{NcError, C64};

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(n, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then(|| (n + 1, l.split_whitespace().collect()))
    })
}

fn err(line: usize, msg: impl Into<String>) -> NcError {
    NcError::Parse { line, msg: msg.into() }
}

fn value(line: usize, re: &str, im: &str) -> Result<C64, NcError> {
    let p = |s: &str| s.parse::<f64>().map_err(|e| err(line, format!("{s}: {e}")));
    Ok(C64::new(p(re)?, p(im)?))
}

pub fn parse_car(text: &str, n: usize) -> Result<Vec<C64>, NcError> {
    let mut out = vec![C64::new(0.0, 0.0); 1 << n];
    for (line, f) in lines(text) {
        let [mask, re, im] = f[..] else { return Err(err(line, "expected `mask re im`")) };
        let mask: usize = mask.parse().map_err(|e| err(line, format!("{mask}: {e}")))?;
        *out.get_mut(mask).ok_or_else(|| err(line, format!("mask {mask} exceeds level {n}")))? = value(line, re, im)?;
    }
    Ok(out)
}

pub fn format_car(bhat: &[C64]) -> String {
    bhat.iter().enumerate().filter(|(_, b)| b.norm() > 0.0).map(|(a, b)| format!("{a} {} {}\n", b.re, b.im)).collect()
}

pub fn parse_tensor(text: &str, d: usize, n: usize) -> Result<Vec<C64>, NcError> {
    let mut out = vec![C64::new(0.0, 0.0); (d * d).pow(n as u32)];
    for (line, f) in lines(text) {
        let [word, re, im] = f[..] else { return Err(err(line, "expected `word re im`")) };
        let mut pairs = Vec::new();
        if word != "-" {
            for pair in word.split('.') {
                let (i, j) = pair.split_once(':').ok_or_else(|| err(line, format!("bad pair {pair}")))?;
                let parse = |s: &str| match s.parse::<usize>() {
                    Ok(v) if (1..=d).contains(&v) => Ok(v),
                    _ => Err(err(line, format!("entry {s} outside 1..={d}"))),
                };
                pairs.push((parse(i)?, parse(j)?));
            }
        }
        if pairs.len() > n {
            return Err(err(line, format!("word longer than level {n}")));
        }
        out[word_index(&pairs, d)] = value(line, re, im)?;
    }
    Ok(out)
}

pub fn format_tensor(bhat: &[C64], d: usize) -> String {
    let mut s = String::new();
    for (a, b) in bhat.iter().enumerate().filter(|(_, b)| b.norm() > 0.0) {
        let w = index_word(a, d);
        let word = if w.is_empty() { "-".to_string() } else { w.iter().map(|(i, j)| format!("{i}:{j}")).collect::<Vec<_>>().join(".") };
        s.push_str(&format!("{word} {} {}\n", b.re, b.im));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn car_roundtrip() {
        let b = parse_car("# symbol\n1 1 0\n6 0.5 -2\n", 3).unwrap();
        assert_eq!(b[1], C64::new(1.0, 0.0));
        assert_eq!(b[6], C64::new(0.5, -2.0));
        assert_eq!(parse_car(&format_car(&b), 3).unwrap(), b);
        assert!(matches!(parse_car("8 1 0", 3), Err(NcError::Parse { line: 1, .. })));
    }

    #[test]
    fn tensor_roundtrip() {
        let b = parse_tensor("- 3 0\n1:2.2:2.1:1 0 1\n", 2, 3).unwrap();
        assert_eq!(b[0], C64::new(3.0, 0.0));
        assert_eq!(parse_tensor(&format_tensor(&b, 2), 2, 3).unwrap(), b);
        assert!(parse_tensor("1:3 1 0", 2, 3).is_err());
        assert!(parse_tensor("1:1.1:1 1 0", 2, 1).is_err());
    }
}
