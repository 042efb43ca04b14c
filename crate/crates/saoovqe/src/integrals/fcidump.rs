use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::Tensor4;

/// Contents of an FCIDUMP file. Indices are 0-based in memory.
#[derive(Clone, Debug, PartialEq)]
pub struct Fcidump {
    pub n_orb: usize,
    pub n_elec: usize,
    pub ms2: i64,
    pub h: DMatrix<f64>,
    pub g: Tensor4,
    pub e_core: f64,
}

pub(crate) fn parse_value(tok: &str, line: usize) -> Result<f64> {
    tok.replace(['D', 'd'], "e")
        .parse::<f64>()
        .map_err(|_| Error::Parse { line, message: format!("bad number `{tok}`") })
}

pub(crate) fn parse_index(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| Error::Parse { line, message: format!("bad index `{tok}`") })
}

/// Split a Fortran namelist block into upper-case `KEY → [values]`.
pub(crate) fn parse_namelist(text: &str, group: &str, line: usize) -> Result<HashMap<String, Vec<String>>> {
    let mut body = text.trim().to_string();
    let head = format!("&{group}");
    if !body.to_uppercase().starts_with(&head) {
        return Err(Error::Parse { line, message: format!("header must start with {head}") });
    }
    body = body[head.len()..].to_string();
    let upper = body.to_uppercase();
    if let Some(k) = upper.find("&END") {
        body.truncate(k);
    } else if let Some(k) = body.rfind('/') {
        body.truncate(k);
    }
    let mut norm = body.replace(',', " ");
    while norm.contains(" =") || norm.contains("= ") {
        norm = norm.replace(" =", "=").replace("= ", "=");
    }
    let mut out: HashMap<String, Vec<String>> = HashMap::new();
    let mut key: Option<String> = None;
    for tok in norm.split_whitespace() {
        if let Some((k, v)) = tok.split_once('=') {
            let k = k.to_uppercase();
            let entry = out.entry(k.clone()).or_default();
            if !v.is_empty() {
                entry.push(v.to_string());
            }
            key = Some(k);
        } else if let Some(k) = &key {
            out.get_mut(k).expect("key inserted").push(tok.to_string());
        } else {
            return Err(Error::Parse { line, message: format!("stray token `{tok}` in header") });
        }
    }
    Ok(out)
}

fn header_int(map: &HashMap<String, Vec<String>>, key: &str, line: usize) -> Result<Option<i64>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) if v.len() == 1 => v[0]
            .parse::<i64>()
            .map(Some)
            .map_err(|_| Error::Parse { line, message: format!("{key} is not an integer") }),
        Some(_) => Err(Error::Parse { line, message: format!("{key} needs exactly one value") }),
    }
}

/// Collect header lines up to the namelist terminator; returns the header
/// text and the index of the first body line.
pub(crate) fn split_header(lines: &[&str]) -> Result<(String, usize)> {
    let mut header = String::new();
    for (k, l) in lines.iter().enumerate() {
        header.push_str(l);
        header.push(' ');
        let t = l.trim();
        if t.to_uppercase().contains("&END") || t.ends_with('/') {
            return Ok((header, k + 1));
        }
    }
    Err(Error::Parse { line: lines.len(), message: "unterminated namelist header".into() })
}

fn canonical_g(i: usize, j: usize, k: usize, l: usize) -> (usize, usize, usize, usize) {
    let (a, b) = if i >= j { (i, j) } else { (j, i) };
    let (c, d) = if k >= l { (k, l) } else { (l, k) };
    if (a, b) >= (c, d) {
        (a, b, c, d)
    } else {
        (c, d, a, b)
    }
}

/// Parse FCIDUMP text: `&FCI NORB=…, NELEC=…, MS2=… &END` then lines
/// `value i j k l` (1-based; `i j 0 0` one-body, `0 0 0 0` core energy).
pub fn parse_fcidump(text: &str) -> Result<Fcidump> {
    let lines: Vec<&str> = text.lines().collect();
    let first = lines.iter().position(|l| !l.trim().is_empty()).unwrap_or(0);
    let (header, body) = split_header(&lines[first..])?;
    let map = parse_namelist(&header, "FCI", first + 1)?;
    let norb = header_int(&map, "NORB", first + 1)?
        .ok_or(Error::Parse { line: first + 1, message: "missing NORB".into() })?;
    let nelec = header_int(&map, "NELEC", first + 1)?
        .ok_or(Error::Parse { line: first + 1, message: "missing NELEC".into() })?;
    let ms2 = header_int(&map, "MS2", first + 1)?.unwrap_or(0);
    if norb < 0 || nelec < 0 {
        return Err(Error::Parse { line: first + 1, message: "negative NORB or NELEC".into() });
    }
    let n = norb as usize;
    let mut h = DMatrix::zeros(n, n);
    let mut g = Tensor4::zeros(n);
    let mut e_core = None;
    let mut seen_h: HashMap<(usize, usize), f64> = HashMap::new();
    let mut seen_g: HashMap<(usize, usize, usize, usize), f64> = HashMap::new();
    for (k, l) in lines[first + body..].iter().enumerate() {
        let lineno = first + body + k + 1;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 5 {
            return Err(Error::Parse { line: lineno, message: format!("expected 5 fields, found {}", toks.len()) });
        }
        let v = parse_value(toks[0], lineno)?;
        let idx: Vec<usize> = toks[1..].iter().map(|t| parse_index(t, lineno)).collect::<Result<_>>()?;
        if idx.iter().any(|&i| i > n) {
            return Err(Error::Parse { line: lineno, message: format!("index exceeds NORB = {n}") });
        }
        match (idx[0], idx[1], idx[2], idx[3]) {
            (0, 0, 0, 0) => {
                if let Some(prev) = e_core {
                    if prev != v {
                        return Err(Error::Parse { line: lineno, message: "contradictory core energy".into() });
                    }
                }
                e_core = Some(v);
            }
            (i, j, 0, 0) if i > 0 && j > 0 => {
                let key = if i >= j { (i, j) } else { (j, i) };
                if let Some(&prev) = seen_h.get(&key) {
                    if prev != v {
                        return Err(Error::Parse { line: lineno, message: format!("contradictory h({i},{j})") });
                    }
                }
                seen_h.insert(key, v);
                h[(i - 1, j - 1)] = v;
                h[(j - 1, i - 1)] = v;
            }
            (_, 0, 0, 0) => {} // orbital energies
            (i, j, k2, l2) if i > 0 && j > 0 && k2 > 0 && l2 > 0 => {
                let key = canonical_g(i, j, k2, l2);
                if let Some(&prev) = seen_g.get(&key) {
                    if prev != v {
                        return Err(Error::Parse {
                            line: lineno,
                            message: format!("contradictory g({i},{j},{k2},{l2})"),
                        });
                    }
                }
                seen_g.insert(key, v);
                g.set_sym8(i - 1, j - 1, k2 - 1, l2 - 1, v);
            }
            _ => {
                return Err(Error::Parse { line: lineno, message: "index pattern not recognized".into() });
            }
        }
    }
    Ok(Fcidump { n_orb: n, n_elec: nelec as usize, ms2, h, g, e_core: e_core.unwrap_or(0.0) })
}

pub fn read_fcidump(path: impl AsRef<Path>) -> Result<Fcidump> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
    parse_fcidump(&text)
}

/// Unique nonzero elements, shortest round-trip number formatting.
pub fn write_fcidump(f: &Fcidump) -> String {
    let n = f.n_orb;
    let mut s = String::new();
    let _ = writeln!(s, "&FCI NORB={n},NELEC={},MS2={},", f.n_elec, f.ms2);
    let _ = writeln!(s, " ORBSYM={}", vec!["1,"; n].concat());
    let _ = writeln!(s, " ISYM=1,");
    let _ = writeln!(s, "&END");
    for i in 0..n {
        for j in 0..=i {
            for k in 0..n {
                for l in 0..=k {
                    if i * (i + 1) / 2 + j < k * (k + 1) / 2 + l {
                        continue;
                    }
                    let v = f.g[[i, j, k, l]];
                    if v != 0.0 {
                        let _ = writeln!(s, "{v:e} {} {} {} {}", i + 1, j + 1, k + 1, l + 1);
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = f.h[(i, j)];
            if v != 0.0 {
                let _ = writeln!(s, "{v:e} {} {} 0 0", i + 1, j + 1);
            }
        }
    }
    let _ = writeln!(s, "{:e} 0 0 0 0", f.e_core);
    s
}

/// Dense matrix text: a `rows cols` line, then one row per line.
pub fn write_matrix(m: &DMatrix<f64>) -> String {
    let mut s = format!("{} {}\n", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:e}", m[(i, j)])).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
    parse_matrix(&text)
}

pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, head) = lines.next().ok_or(Error::Parse { line: 1, message: "empty matrix file".into() })?;
    let dims: Vec<usize> = head.split_whitespace().map(|t| parse_index(t, 1)).collect::<Result<_>>()?;
    if dims.len() != 2 {
        return Err(Error::Parse { line: 1, message: "expected `rows cols`".into() });
    }
    let (r, c) = (dims[0], dims[1]);
    let mut m = DMatrix::zeros(r, c);
    let mut row = 0;
    for (k, l) in lines {
        if row >= r {
            return Err(Error::Parse { line: k + 1, message: "too many rows".into() });
        }
        let vals: Vec<f64> = l.split_whitespace().map(|t| parse_value(t, k + 1)).collect::<Result<_>>()?;
        if vals.len() != c {
            return Err(Error::Parse { line: k + 1, message: format!("expected {c} columns") });
        }
        for (j, v) in vals.into_iter().enumerate() {
            m[(row, j)] = v;
        }
        row += 1;
    }
    if row != r {
        return Err(Error::Parse { line: 0, message: format!("expected {r} rows, found {row}") });
    }
    Ok(m)
}
