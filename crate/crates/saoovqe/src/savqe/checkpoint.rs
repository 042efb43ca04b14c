//! Plain-text restart file:
//!
//! ```text
//! SAOOVQE-CHECKPOINT 1
//! THETA <n>
//! <n values, one per line>
//! C <rows> <cols>
//! <rows lines of cols values>
//! PHI <value>
//! TRACE <m>
//! <outer> <circuit|orbital> <e_sa> <grad>
//! END
//! ```

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use super::driver::{Phase, TraceEntry};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub theta: Vec<f64>,
    pub c: DMatrix<f64>,
    pub phi: f64,
    pub trace: Vec<TraceEntry>,
}

impl Checkpoint {
    pub fn render(&self) -> String {
        let mut s = String::from("SAOOVQE-CHECKPOINT 1\n");
        let _ = writeln!(s, "THETA {}", self.theta.len());
        for t in &self.theta {
            let _ = writeln!(s, "{t:e}");
        }
        let _ = writeln!(s, "C {} {}", self.c.nrows(), self.c.ncols());
        for r in 0..self.c.nrows() {
            let row: Vec<String> = (0..self.c.ncols()).map(|k| format!("{:e}", self.c[(r, k)])).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        let _ = writeln!(s, "PHI {:e}", self.phi);
        let _ = writeln!(s, "TRACE {}", self.trace.len());
        for e in &self.trace {
            let ph = match e.phase {
                Phase::Circuit => "circuit",
                Phase::Orbital => "orbital",
            };
            let _ = writeln!(s, "{} {ph} {:e} {:e}", e.outer, e.e_sa, e.grad);
        }
        s.push_str("END\n");
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let err = |line: usize, m: &str| Error::Parse { line, message: m.to_string() };
        let mut next = |what: &str| lines.next().ok_or_else(|| err(0, &format!("unexpected end of file, expected {what}")));
        let num = |line: usize, t: &str| t.parse::<f64>().map_err(|_| err(line, &format!("bad number `{t}`")));
        let count = |line: usize, t: Option<&str>| {
            t.and_then(|x| x.parse::<usize>().ok()).ok_or_else(|| err(line, "bad count"))
        };
        let header = |l: &str, key: &str| l.split_whitespace().next() == Some(key);

        let (n, l) = next("header")?;
        if l != "SAOOVQE-CHECKPOINT 1" {
            return Err(err(n, "not a checkpoint file (bad header)"));
        }
        let (n, l) = next("THETA")?;
        if !header(l, "THETA") {
            return Err(err(n, "expected THETA"));
        }
        let nt = count(n, l.split_whitespace().nth(1))?;
        let mut theta = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (n, l) = next("angle")?;
            theta.push(num(n, l)?);
        }
        let (n, l) = next("C")?;
        let mut it = l.split_whitespace();
        if it.next() != Some("C") {
            return Err(err(n, "expected C"));
        }
        let rows = count(n, it.next())?;
        let cols = count(n, it.next())?;
        let mut c = DMatrix::zeros(rows, cols);
        for r in 0..rows {
            let (n, l) = next("C row")?;
            let vals: Vec<&str> = l.split_whitespace().collect();
            if vals.len() != cols {
                return Err(err(n, &format!("expected {cols} values")));
            }
            for (k, v) in vals.iter().enumerate() {
                c[(r, k)] = num(n, v)?;
            }
        }
        let (n, l) = next("PHI")?;
        let mut it = l.split_whitespace();
        if it.next() != Some("PHI") {
            return Err(err(n, "expected PHI"));
        }
        let phi = num(n, it.next().unwrap_or(""))?;
        let (n, l) = next("TRACE")?;
        if !header(l, "TRACE") {
            return Err(err(n, "expected TRACE"));
        }
        let m = count(n, l.split_whitespace().nth(1))?;
        let mut trace = Vec::with_capacity(m);
        for _ in 0..m {
            let (n, l) = next("trace entry")?;
            let f: Vec<&str> = l.split_whitespace().collect();
            if f.len() != 4 {
                return Err(err(n, "trace entry needs 4 fields"));
            }
            let phase = match f[1] {
                "circuit" => Phase::Circuit,
                "orbital" => Phase::Orbital,
                other => return Err(err(n, &format!("unknown phase `{other}`"))),
            };
            trace.push(TraceEntry { outer: count(n, Some(f[0]))?, phase, e_sa: num(n, f[2])?, grad: num(n, f[3])? });
        }
        let (n, l) = next("END")?;
        if l != "END" {
            return Err(err(n, "expected END"));
        }
        Ok(Checkpoint { theta, c, phi, trace })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path.as_ref(), self.render()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}
