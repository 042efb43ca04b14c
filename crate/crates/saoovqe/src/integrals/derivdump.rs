//! DERIVDUMP: nuclear derivatives of AO integrals.
//!
//! ```text
//! &DERIV NAO=3, NCOORD=2 &END
//! LABELS x1 x2
//! COORD 1
//! THALF
//!  value i j          (∂_x μ|ν), every nonzero element
//! HX
//!  value i j          i ≥ j, symmetric completion
//! GX
//!  value i j k l      unique elements, 8-fold completion
//! DENUC
//!  value
//! END
//! COORD 2
//! …
//! ```
//!
//! Indices are 1-based. See `docs/formats.md` for the grammar.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use super::fcidump::{parse_index, parse_namelist, parse_value, split_header};
use super::{CoordinateDerivative, DerivativeIntegralSet};
use crate::error::{Error, Result};
use crate::linalg::Tensor4;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Block {
    Thalf,
    Hx,
    Gx,
    Denuc,
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub fn parse_derivdump(text: &str) -> Result<DerivativeIntegralSet> {
    let lines: Vec<&str> = text.lines().collect();
    let first = lines.iter().position(|l| !l.trim().is_empty()).unwrap_or(0);
    let (header, body) = split_header(&lines[first..])?;
    let map = parse_namelist(&header, "DERIV", first + 1)?;
    let get = |k: &str| -> Result<usize> {
        let v = map.get(k).ok_or_else(|| perr(first + 1, format!("missing {k}")))?;
        if v.len() != 1 {
            return Err(perr(first + 1, format!("{k} needs one value")));
        }
        parse_index(&v[0], first + 1)
    };
    let n = get("NAO")?;
    let ncoord = get("NCOORD")?;

    let mut it = lines.iter().enumerate().skip(first + body).filter(|(_, l)| !l.trim().is_empty());
    let (ln, lab) = it.next().ok_or_else(|| perr(lines.len(), "missing LABELS line"))?;
    let toks: Vec<&str> = lab.split_whitespace().collect();
    if toks.first().map(|t| t.to_uppercase()) != Some("LABELS".into()) {
        return Err(perr(ln + 1, "expected LABELS"));
    }
    let labels: Vec<String> = toks[1..].iter().map(|s| s.to_string()).collect();
    if labels.len() != ncoord {
        return Err(perr(ln + 1, format!("{} labels for NCOORD = {ncoord}", labels.len())));
    }

    let mut coords = Vec::with_capacity(ncoord);
    let mut current: Option<(CoordinateDerivative, Option<Block>, Vec<Block>)> = None;
    let mut seen2: HashMap<(usize, usize), f64> = HashMap::new();
    let mut seen4: HashMap<(usize, usize, usize, usize), f64> = HashMap::new();
    let mut denuc_set = false;
    for (k, l) in it {
        let lineno = k + 1;
        let toks: Vec<&str> = l.split_whitespace().collect();
        let key = toks[0].to_uppercase();
        match key.as_str() {
            "COORD" => {
                if current.is_some() {
                    return Err(perr(lineno, "COORD before END"));
                }
                let idx = toks.get(1).ok_or_else(|| perr(lineno, "COORD needs an index"))?;
                let idx = parse_index(idx, lineno)?;
                if idx != coords.len() + 1 {
                    return Err(perr(lineno, format!("expected COORD {}", coords.len() + 1)));
                }
                if idx > ncoord {
                    return Err(perr(lineno, format!("COORD {idx} exceeds NCOORD = {ncoord}")));
                }
                current = Some((CoordinateDerivative::zeros(n), None, Vec::new()));
                seen2.clear();
                seen4.clear();
                denuc_set = false;
            }
            "THALF" | "HX" | "GX" | "DENUC" => {
                let (_, blk, done) = current.as_mut().ok_or_else(|| perr(lineno, "block outside COORD"))?;
                let b = match key.as_str() {
                    "THALF" => Block::Thalf,
                    "HX" => Block::Hx,
                    "GX" => Block::Gx,
                    _ => Block::Denuc,
                };
                if done.contains(&b) {
                    return Err(perr(lineno, format!("repeated {key} block")));
                }
                done.push(b);
                *blk = Some(b);
                seen2.clear();
            }
            "END" => {
                let (cd, _, done) = current.take().ok_or_else(|| perr(lineno, "END outside COORD"))?;
                for (b, name) in [(Block::Thalf, "THALF"), (Block::Hx, "HX"), (Block::Gx, "GX"), (Block::Denuc, "DENUC")] {
                    if !done.contains(&b) {
                        return Err(perr(lineno, format!("missing {name} block in COORD {}", coords.len() + 1)));
                    }
                }
                coords.push(cd);
            }
            _ => {
                let (cd, blk, _) = current.as_mut().ok_or_else(|| perr(lineno, "data outside COORD"))?;
                let blk = blk.ok_or_else(|| perr(lineno, "data before a block keyword"))?;
                let v = parse_value(toks[0], lineno)?;
                let idx: Vec<usize> = toks[1..].iter().map(|t| parse_index(t, lineno)).collect::<Result<_>>()?;
                if idx.iter().any(|&i| i == 0 || i > n) {
                    return Err(perr(lineno, format!("index outside 1..={n}")));
                }
                let want = match blk {
                    Block::Thalf | Block::Hx => 2,
                    Block::Gx => 4,
                    Block::Denuc => 0,
                };
                if idx.len() != want {
                    return Err(perr(lineno, format!("expected {want} indices")));
                }
                match blk {
                    Block::Thalf | Block::Hx => {
                        let (i, j) = (idx[0] - 1, idx[1] - 1);
                        let key = if blk == Block::Hx && i < j { (j, i) } else { (i, j) };
                        if let Some(&p) = seen2.get(&key) {
                            if p != v {
                                return Err(perr(lineno, "contradictory duplicate entry"));
                            }
                        }
                        seen2.insert(key, v);
                        if blk == Block::Thalf {
                            cd.t_half[(i, j)] = v;
                        } else {
                            cd.h_x[(i, j)] = v;
                            cd.h_x[(j, i)] = v;
                        }
                    }
                    Block::Gx => {
                        let (i, j, k2, l2) = (idx[0] - 1, idx[1] - 1, idx[2] - 1, idx[3] - 1);
                        let a = if i >= j { (i, j) } else { (j, i) };
                        let b = if k2 >= l2 { (k2, l2) } else { (l2, k2) };
                        let key = if a >= b { (a.0, a.1, b.0, b.1) } else { (b.0, b.1, a.0, a.1) };
                        if let Some(&p) = seen4.get(&key) {
                            if p != v {
                                return Err(perr(lineno, "contradictory duplicate entry"));
                            }
                        }
                        seen4.insert(key, v);
                        cd.g_x.set_sym8(i, j, k2, l2, v);
                    }
                    Block::Denuc => {
                        if denuc_set && cd.de_nuc != v {
                            return Err(perr(lineno, "contradictory DENUC"));
                        }
                        cd.de_nuc = v;
                        denuc_set = true;
                    }
                }
            }
        }
    }
    if current.is_some() {
        return Err(perr(lines.len(), "missing END"));
    }
    if coords.len() != ncoord {
        return Err(perr(lines.len(), format!("found {} coordinate blocks, NCOORD = {ncoord}", coords.len())));
    }
    Ok(DerivativeIntegralSet { n_ao: n, labels, coords })
}

pub fn read_derivdump(path: impl AsRef<Path>) -> Result<DerivativeIntegralSet> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
    parse_derivdump(&text)
}

fn write_sym2(s: &mut String, m: &DMatrix<f64>) {
    for i in 0..m.nrows() {
        for j in 0..=i {
            if m[(i, j)] != 0.0 {
                let _ = writeln!(s, "{:e} {} {}", m[(i, j)], i + 1, j + 1);
            }
        }
    }
}

fn write_g(s: &mut String, g: &Tensor4) {
    let n = g.dim();
    for i in 0..n {
        for j in 0..=i {
            for k in 0..n {
                for l in 0..=k {
                    if i * (i + 1) / 2 + j < k * (k + 1) / 2 + l {
                        continue;
                    }
                    let v = g[[i, j, k, l]];
                    if v != 0.0 {
                        let _ = writeln!(s, "{v:e} {} {} {} {}", i + 1, j + 1, k + 1, l + 1);
                    }
                }
            }
        }
    }
}

/// Serialize; HX and GX are assumed exactly symmetric.
pub fn write_derivdump(d: &DerivativeIntegralSet) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "&DERIV NAO={}, NCOORD={} &END", d.n_ao, d.coords.len());
    let _ = writeln!(s, "LABELS {}", d.labels.join(" "));
    for (k, c) in d.coords.iter().enumerate() {
        let _ = writeln!(s, "COORD {}", k + 1);
        let _ = writeln!(s, "THALF");
        for i in 0..d.n_ao {
            for j in 0..d.n_ao {
                if c.t_half[(i, j)] != 0.0 {
                    let _ = writeln!(s, "{:e} {} {}", c.t_half[(i, j)], i + 1, j + 1);
                }
            }
        }
        let _ = writeln!(s, "HX");
        write_sym2(&mut s, &c.h_x);
        let _ = writeln!(s, "GX");
        write_g(&mut s, &c.g_x);
        let _ = writeln!(s, "DENUC");
        let _ = writeln!(s, "{:e}", c.de_nuc);
        let _ = writeln!(s, "END");
    }
    s
}
