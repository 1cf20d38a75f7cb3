use anyhow::{Context, Result};
use contraction_kit::cls::{Outcome, Solution, Verdict};
use contraction_kit::rational::Fraction;
use contraction_kit::Rational;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Machine-readable record of one invocation. Holds no timestamps, so the
/// same inputs always give the same bytes.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub constants: BTreeMap<String, String>,
    pub result: Value,
    pub exit_code: u8,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunReport {
    pub fn new(args: impl IntoIterator<Item = String>) -> Self {
        let mut command: Vec<String> = args.into_iter().collect();
        if let Some(first) = command.first_mut() {
            *first = "contraction-kit".into();
        }
        RunReport {
            command,
            result: Value::Null,
            ..RunReport::default()
        }
    }

    /// Reads a file and records its digest.
    pub fn read(&mut self, path: &Path) -> Result<String> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(text.as_bytes()),
        });
        Ok(text)
    }

    pub fn constant(&mut self, name: &str, value: &Rational) {
        self.constants.insert(name.into(), Fraction(value).to_string());
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
    }
}

pub fn frac(v: &Rational) -> String {
    Fraction(v).to_string()
}

pub fn solution_json(sol: &Solution) -> Value {
    json!({
        "kind": sol.kind.name(),
        "witnesses": sol.witnesses.iter().map(|w| w.0.iter().map(frac).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn verdict_json(v: &Verdict, sol: &Solution) -> Value {
    let reason = match &v.outcome {
        Outcome::Accept => Value::Null,
        Outcome::Reject(r) => Value::String(r.to_string()),
    };
    json!({
        "verdict": if v.accepted() { "ACCEPT" } else { "REJECT" },
        "reason": reason,
        "solution": solution_json(sol),
        "comparisons": v.comparisons.iter().map(|c| json!({
            "lhs": c.lhs_label,
            "lhs_value": frac(&c.lhs),
            "relation": c.relation.symbol(),
            "rhs": c.rhs_label,
            "rhs_value": frac(&c.rhs),
            "holds": c.holds(),
        })).collect::<Vec<_>>(),
    })
}

/// `out.txt` → `out.txt.provenance.json`
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".provenance.json");
    PathBuf::from(name)
}
