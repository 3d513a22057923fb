//! JSON file formats.
//!
//! Complex numbers are `[re, im]` pairs and matrices are flattened row-major.
//! A channel file looks like
//!
//! ```json
//! {"dim": 2, "representation": "kraus", "entries": [[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]]}
//! ```
//!
//! where `entries` is a list of operators for `kraus` and a single flat
//! `d^2 x d^2` matrix for `choi` and `superop`.

use faer::{Mat, MatRef};
use serde::{Deserialize, Serialize};

use crate::chanrep::{kraus_to_choi, superop_to_choi, ChoiMatrix, KrausSet, Superoperator};
use crate::detect::DetectionResult;
use crate::error::{Error, Result};
use crate::linalg::{c64, CMat};
use crate::spoofing::{Mode, TypeIIFamily};

pub type Pair = [f64; 2];

pub fn encode(m: MatRef<'_, c64>) -> Vec<Pair> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out.push([z.re, z.im]);
        }
    }
    out
}

pub fn decode(entries: &[Pair], rows: usize, cols: usize) -> Result<CMat> {
    if entries.len() != rows * cols {
        return Err(Error::Format(format!("expected {} entries for a {rows}x{cols} matrix, found {}", rows * cols, entries.len())));
    }
    if let Some(p) = entries.iter().find(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err(Error::Format(format!("non-finite entry {p:?}")));
    }
    Ok(Mat::from_fn(rows, cols, |i, j| {
        let [re, im] = entries[i * cols + j];
        c64::new(re, im)
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Kraus,
    Choi,
    Superop,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entries {
    Operators(Vec<Vec<Pair>>),
    Matrix(Vec<Pair>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub dim: usize,
    pub representation: Representation,
    pub entries: Entries,
}

/// A channel as read from a file, in its stored representation.
#[derive(Clone, Debug, PartialEq)]
pub enum Channel {
    Kraus(KrausSet),
    Choi(ChoiMatrix),
    Superop(Superoperator),
}

impl Channel {
    pub fn dim(&self) -> usize {
        match self {
            Channel::Kraus(k) => k.dim(),
            Channel::Choi(j) => j.dim(),
            Channel::Superop(s) => s.dim(),
        }
    }

    pub fn to_choi(&self) -> ChoiMatrix {
        match self {
            Channel::Kraus(k) => kraus_to_choi(k),
            Channel::Choi(j) => j.clone(),
            Channel::Superop(s) => superop_to_choi(s),
        }
    }
}

impl ChannelFile {
    pub fn from_kraus(k: &KrausSet) -> Self {
        Self {
            dim: k.dim(),
            representation: Representation::Kraus,
            entries: Entries::Operators(k.ops().iter().map(|op| encode(op.as_ref())).collect()),
        }
    }

    pub fn from_choi(j: &ChoiMatrix) -> Self {
        Self { dim: j.dim(), representation: Representation::Choi, entries: Entries::Matrix(encode(j.as_mat())) }
    }

    pub fn from_superop(s: &Superoperator) -> Self {
        Self { dim: s.dim(), representation: Representation::Superop, entries: Entries::Matrix(encode(s.as_mat())) }
    }

    /// Decodes the entries. Only shapes are checked here; channel validity
    /// is left to [`crate::chanrep::validate_cptp`].
    pub fn to_channel(&self) -> Result<Channel> {
        let d = self.dim;
        if d == 0 {
            return Err(Error::Format("dim must be positive".into()));
        }
        match (&self.representation, &self.entries) {
            (Representation::Kraus, Entries::Operators(ops)) => {
                let mats = ops.iter().map(|op| decode(op, d, d)).collect::<Result<Vec<_>>>()?;
                Ok(Channel::Kraus(KrausSet::new_unchecked(mats)?))
            }
            (Representation::Choi, Entries::Matrix(m)) => Ok(Channel::Choi(ChoiMatrix::from_matrix(decode(m, d * d, d * d)?)?)),
            (Representation::Superop, Entries::Matrix(m)) => {
                Ok(Channel::Superop(Superoperator::from_matrix(decode(m, d * d, d * d)?)?))
            }
            (r, _) => Err(Error::Format(format!("entries do not match representation {r:?}"))),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Serialized [`TypeIIFamily`]: each fixed block flattened row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDescriptor {
    pub dim: usize,
    pub mode: Mode,
    pub fixed_blocks: Vec<Vec<Pair>>,
}

impl FamilyDescriptor {
    pub fn from_family(f: &TypeIIFamily) -> Self {
        Self { dim: f.dim(), mode: f.mode(), fixed_blocks: f.fixed_blocks().iter().map(|b| encode(b.as_ref())).collect() }
    }

    pub fn to_family(&self, tol: f64) -> Result<TypeIIFamily> {
        if self.fixed_blocks.len() != self.dim {
            return Err(Error::Format(format!("{} fixed blocks for dim {}", self.fixed_blocks.len(), self.dim)));
        }
        let blocks = self.fixed_blocks.iter().map(|b| decode(b, self.dim, self.dim)).collect::<Result<Vec<_>>>()?;
        TypeIIFamily::new(blocks, self.mode, tol)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Output of a detection run: both experiments plus their inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub dim: usize,
    pub seed: u64,
    pub shots: u64,
    pub bases: usize,
    pub states: usize,
    pub fixed_basis: DetectionResult,
    pub random_basis: DetectionResult,
}

impl DetectionReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}
