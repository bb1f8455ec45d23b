//! Plain-text matrix files.
//!
//! ```text
//! kind = "density"
//! dim = 2
//! entries = [
//!   [9.0000000000000000e-1, 0.0000000000000000e0],
//!   ...
//! ]
//! ```
//!
//! `entries` lists `[re, im]` pairs in row-major order. Values are written
//! with 17 significant digits, so a write followed by a read reproduces every
//! entry bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::qig::{DensityMatrix, Observable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Density,
    Observable,
}

impl MatrixKind {
    fn as_str(self) -> &'static str {
        match self {
            MatrixKind::Density => "density",
            MatrixKind::Observable => "observable",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub kind: MatrixKind,
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(kind: MatrixKind, m: &CMatrix) -> Self {
        let dim = m.nrows();
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..m.ncols() {
                entries.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        Self { kind, dim, entries }
    }

    /// Parses and checks the shape. `origin` prefixes error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let file: MatrixFile =
            toml::from_str(text).map_err(|e| Error::Parse(format!("{origin}: {e}")))?;
        let want = file.dim * file.dim;
        if file.dim == 0 || file.entries.len() != want {
            return Err(Error::Parse(format!(
                "{origin}: entries: expected dim² = {want} [re, im] pairs, found {}",
                file.entries.len()
            )));
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kind = \"{}\"", self.kind.as_str());
        let _ = writeln!(s, "dim = {}", self.dim);
        s.push_str("entries = [\n");
        for [re, im] in &self.entries {
            let _ = writeln!(s, "  [{}, {}],", fmt_float(*re), fmt_float(*im));
        }
        s.push_str("]\n");
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.dim, self.dim, |i, j| {
            let [re, im] = self.entries[i * self.dim + j];
            num_complex::Complex64::new(re, im)
        })
    }

    pub fn into_density(self, origin: &str) -> Result<DensityMatrix> {
        if self.kind != MatrixKind::Density {
            return Err(Error::Parse(format!("{origin}: kind is \"{}\", expected \"density\"", self.kind.as_str())));
        }
        DensityMatrix::new(self.to_matrix()).map_err(|e| Error::Parse(format!("{origin}: {e}")))
    }

    pub fn into_observable(self, origin: &str) -> Result<Observable> {
        Observable::new(self.to_matrix()).map_err(|e| Error::Parse(format!("{origin}: {e}")))
    }
}

fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}
