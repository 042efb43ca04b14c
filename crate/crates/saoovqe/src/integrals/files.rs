//! Per-geometry integral directories.
//!
//! ```text
//! root/
//!   geometries.tsv          key <TAB> coordinate <TAB> coordinate …
//!   <key>/ao.fcidump        AO h, g and nuclear repulsion as the core energy
//!   <key>/overlap.dat       AO overlap
//!   <key>/coeff.dat         AO × MO coefficients
//!   <key>/deriv.derivdump   AO derivative integrals
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::derivdump::{read_derivdump, write_derivdump};
use super::fcidump::{parse_value, read_fcidump, read_matrix, write_fcidump, write_matrix, Fcidump};
use super::{DerivativeIntegralSet, IntegralSet, Partition};
use crate::error::{Error, Result};

/// Directory name for a geometry: 64-bit FNV-1a of the coordinates printed
/// with 10 decimals.
pub fn geometry_key(coords: &[f64]) -> String {
    let canon: Vec<String> = coords.iter().map(|c| format!("{:.10}", c + 0.0)).collect();
    let mut h: u64 = 0xcbf29ce484222325;
    for b in canon.join(",").bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("g{h:016x}")
}

/// Contents of `geometries.tsv`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GeometryIndex {
    pub entries: BTreeMap<String, Vec<f64>>,
}

impl GeometryIndex {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (k, l) in text.lines().enumerate() {
            let l = l.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let mut toks = l.split('\t');
            let key = toks.next().unwrap_or_default().to_string();
            let coords: Vec<f64> = toks.map(|t| parse_value(t.trim(), k + 1)).collect::<Result<_>>()?;
            if entries.insert(key.clone(), coords).is_some() {
                return Err(Error::Parse { line: k + 1, message: format!("repeated geometry key {key}") });
            }
        }
        Ok(GeometryIndex { entries })
    }

    pub fn render(&self) -> String {
        let mut s = String::from("# key\tcoordinates\n");
        for (k, c) in &self.entries {
            let cs: Vec<String> = c.iter().map(|v| format!("{v:e}")).collect();
            s.push_str(&format!("{k}\t{}\n", cs.join("\t")));
        }
        s
    }
}

/// Integral files for a fixed active space.
#[derive(Clone, Debug)]
pub struct FileSource {
    pub root: PathBuf,
    pub n_frozen: usize,
    pub n_active: usize,
    pub index: GeometryIndex,
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

impl FileSource {
    pub fn open(root: impl AsRef<Path>, n_frozen: usize, n_active: usize) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        let index = GeometryIndex::parse(&read_text(&root.join("geometries.tsv"))?)?;
        Ok(FileSource { root, n_frozen, n_active, index })
    }

    pub fn load(&self, coords: &[f64]) -> Result<(IntegralSet, DerivativeIntegralSet)> {
        let key = geometry_key(coords);
        if !self.index.entries.contains_key(&key) {
            return Err(Error::Format(format!("no integrals for geometry {coords:?} (key {key})")));
        }
        let dir = self.root.join(&key);
        let f = read_fcidump(dir.join("ao.fcidump"))?;
        let s_ao = read_matrix(dir.join("overlap.dat"))?;
        let c = read_matrix(dir.join("coeff.dat"))?;
        let d = read_derivdump(dir.join("deriv.derivdump"))?;
        d.check_coordinates(coords.len())?;
        if s_ao.shape() != (f.n_orb, f.n_orb) || d.n_ao != f.n_orb || c.nrows() != f.n_orb {
            return Err(Error::Format(format!("AO dimensions disagree in {}", dir.display())));
        }
        let partition = Partition::contiguous(c.ncols(), self.n_frozen, self.n_active)?;
        let ints = IntegralSet { s_ao, h_ao: f.h, g_ao: f.g, c, e_nuc: f.e_core, partition, n_elec: f.n_elec };
        ints.validate()?;
        Ok((ints, d))
    }

    /// Write one geometry and update the index on disk.
    pub fn export(
        root: impl AsRef<Path>,
        coords: &[f64],
        ints: &IntegralSet,
        derivs: &DerivativeIntegralSet,
    ) -> Result<PathBuf> {
        let root = root.as_ref();
        let key = geometry_key(coords);
        let dir = root.join(&key);
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let f = Fcidump {
            n_orb: ints.n_ao(),
            n_elec: ints.n_elec,
            ms2: 0,
            h: ints.h_ao.clone(),
            g: ints.g_ao.clone(),
            e_core: ints.e_nuc,
        };
        write_text(&dir.join("ao.fcidump"), &write_fcidump(&f))?;
        write_text(&dir.join("overlap.dat"), &write_matrix(&ints.s_ao))?;
        write_text(&dir.join("coeff.dat"), &write_matrix(&ints.c))?;
        write_text(&dir.join("deriv.derivdump"), &write_derivdump(derivs))?;
        let idx_path = root.join("geometries.tsv");
        let mut index = if idx_path.exists() {
            GeometryIndex::parse(&read_text(&idx_path)?)?
        } else {
            GeometryIndex::default()
        };
        index.entries.insert(key, coords.to_vec());
        write_text(&idx_path, &index.render())?;
        Ok(dir)
    }
}
