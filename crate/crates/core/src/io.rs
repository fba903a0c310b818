//! Matrix files and run reports.
//!
//! A matrix file is a JSON object
//!
//! ```json
//! {"dim": 2, "kind": "hermitian", "entries": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]], "meta": {}}
//! ```
//!
//! with `entries` in row-major order as `[re, im]` pairs. Floats are written
//! as the shortest decimal that parses back to the same double, so a
//! save/load cycle is bit-exact. The `kind` is re-validated on load.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, HermitianOperator, OrthProjection, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Hermitian,
    Projection,
    Unitary,
    General,
}

pub type Meta = BTreeMap<String, Value>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    pub kind: MatrixKind,
    pub entries: Vec<[f64; 2]>,
    #[serde(default)]
    pub meta: Meta,
}

impl MatrixFile {
    pub fn new(kind: MatrixKind, m: &CMatrix, meta: Meta) -> Self {
        Self {
            dim: m.dim(),
            kind,
            entries: m.as_slice().iter().map(|z| [z.re, z.im]).collect(),
            meta,
        }
    }

    pub fn hermitian(a: &HermitianOperator, meta: Meta) -> Self {
        Self::new(MatrixKind::Hermitian, a.matrix(), meta)
    }

    pub fn projection(p: &OrthProjection, meta: Meta) -> Self {
        Self::new(MatrixKind::Projection, p.matrix(), meta)
    }

    pub fn unitary(u: &CMatrix, meta: Meta) -> Self {
        Self::new(MatrixKind::Unitary, u, meta)
    }

    pub fn matrix(&self) -> Result<CMatrix> {
        if self.dim == 0 {
            return Err(Error::Format("dim must be at least 1".into()));
        }
        if self.entries.len() != self.dim * self.dim {
            return Err(Error::Format(format!(
                "expected {} entries for dim {}, found {}",
                self.dim * self.dim,
                self.dim,
                self.entries.len()
            )));
        }
        CMatrix::from_row_major(self.dim, self.entries.iter().map(|&[re, im]| C64::new(re, im)).collect())
    }

    /// Checks the invariant of the declared kind.
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let m = self.matrix()?;
        match self.kind {
            MatrixKind::Hermitian => HermitianOperator::new(m, tol).map(drop),
            MatrixKind::Projection => OrthProjection::new(m, tol).map(drop),
            MatrixKind::Unitary => {
                let defect = m.unitarity_defect();
                if defect > tol.ortho_tol {
                    return Err(Error::NotUnitary { defect });
                }
                Ok(())
            }
            MatrixKind::General => Ok(()),
        }
    }

    /// Any file whose matrix passes the Hermiticity check, whatever its kind.
    pub fn as_hermitian(&self, tol: &Tolerances) -> Result<HermitianOperator> {
        HermitianOperator::new(self.matrix()?, tol)
    }

    pub fn as_projection(&self, tol: &Tolerances) -> Result<OrthProjection> {
        OrthProjection::new(self.matrix()?, tol)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    /// Parses and validates. Syntax errors carry line and column.
    pub fn from_json(text: &str, tol: &Tolerances) -> Result<Self> {
        let file: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        file.validate(tol)?;
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path, tol: &Tolerances) -> Result<Self> {
        let text = read_text(path)?;
        Self::from_json(&text, tol).map_err(|e| match e {
            Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// One command invocation, printed as a single JSON line.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    /// `sha256:<hex>` of each input file, in argument order.
    pub inputs: Vec<String>,
    pub outputs: BTreeMap<String, Value>,
    /// `ok` or the error code.
    pub status: String,
    pub elapsed_ms: u64,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            inputs: Vec::new(),
            outputs: BTreeMap::new(),
            status: "ok".into(),
            elapsed_ms: 0,
        }
    }

    pub fn add_input(&mut self, bytes: &[u8]) {
        self.inputs.push(format!("sha256:{}", sha256_hex(bytes)));
    }

    /// Stores `value` under `key`. Non-finite floats are refused.
    pub fn put(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        let v = serde_json::to_value(value).map_err(|e| Error::Format(e.to_string()))?;
        if !all_finite(&v) {
            return Err(Error::Format(format!("output {key} is not finite")));
        }
        self.outputs.insert(key.to_string(), v);
        Ok(())
    }

    pub fn fail(&mut self, err: &Error) {
        self.status = err.code().to_string();
        self.outputs
            .insert("error".into(), Value::String(err.to_string()));
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).unwrap_or_else(|e| format!("{{\"status\":\"format_error\",\"error\":\"{e}\"}}"))
    }
}

/// `serde_json` maps NaN and infinities to `null`; a `null` anywhere in a
/// numeric output therefore marks a non-finite value.
fn all_finite(v: &Value) -> bool {
    match v {
        Value::Null => false,
        Value::Number(n) => n.as_f64().is_some_and(f64::is_finite),
        Value::Array(xs) => xs.iter().all(all_finite),
        Value::Object(m) => m.values().all(all_finite),
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Sampler;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn identity_roundtrip_is_exact() {
        let id = HermitianOperator::from_real_diag(&[1.0, 1.0]);
        let f = MatrixFile::hermitian(&id, Meta::new());
        let back = MatrixFile::from_json(&f.to_json().unwrap(), &tol()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn random_hermitian_roundtrip_is_bit_exact() {
        let a = Sampler::new(8).hermitian(8);
        let f = MatrixFile::hermitian(&a, Meta::new());
        let back = MatrixFile::from_json(&f.to_json().unwrap(), &tol()).unwrap();
        for (x, y) in back.entries.iter().zip(&f.entries) {
            assert_eq!(x[0].to_bits(), y[0].to_bits());
            assert_eq!(x[1].to_bits(), y[1].to_bits());
        }
    }

    #[test]
    fn perturbed_projection_is_rejected() {
        let mut m = CMatrix::from_real_diag(&[1.0, 0.0]);
        m[(0, 0)] = C64::new(1.0 + 1e-3, 0.0);
        let f = MatrixFile::new(MatrixKind::Projection, &m, Meta::new());
        let err = MatrixFile::from_json(&f.to_json().unwrap(), &tol()).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = MatrixFile::from_json("{\"dim\": 2,\n \"kind\": }", &tol()).unwrap_err();
        match err {
            Error::Format(m) => assert!(m.contains("line 2"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_entry_count() {
        let err = MatrixFile::from_json(r#"{"dim":2,"kind":"general","entries":[[1,0]]}"#, &tol()).unwrap_err();
        assert!(matches!(err, Error::Format(_)));
    }

    #[test]
    fn non_finite_outputs_refused() {
        let mut r = RunReport::new("x");
        assert!(r.put("a", 1.5).is_ok());
        assert!(r.put("b", f64::NAN).is_err());
        assert!(r.put("c", vec![1.0, f64::INFINITY]).is_err());
    }
}
