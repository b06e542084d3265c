//! Molecular Hamiltonian in the `A_{pq,σ}` form
//! `H = E_n + ½ Σ h A + ⅛ Σ g A A`.
//!
//! `h` is indexed `[σ][p][q]` and `g` is indexed `[σ][τ][p][q][r][s]`,
//! both row-major with spin order `[up, down]`.

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Value};
use thiserror::Error;

use crate::universe::{expand_product, HoppingOp, Spin, TermKey};

pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum HamiltonianError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed hamiltonian: {0}")]
    Format(String),
    #[error("symmetry violated: {0}")]
    Symmetry(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    n: usize,
    e_nuc: f64,
    h: Vec<f64>,
    g: Vec<f64>,
}

impl Hamiltonian {
    /// Validates shapes and the symmetries `h_pq = h_qp`,
    /// `g_pqrs = g_qprs = g_pqsr`.
    pub fn new(n: usize, e_nuc: f64, h: Vec<f64>, g: Vec<f64>) -> Result<Self, HamiltonianError> {
        if n < 1 {
            return Err(HamiltonianError::Format(
                "n_orbitals must be positive".into(),
            ));
        }
        if h.len() != 2 * n * n {
            return Err(HamiltonianError::Format(format!(
                "h has {} entries, expected {}",
                h.len(),
                2 * n * n
            )));
        }
        if g.len() != 4 * n.pow(4) {
            return Err(HamiltonianError::Format(format!(
                "g has {} entries, expected {}",
                g.len(),
                4 * n.pow(4)
            )));
        }
        if let Some(bad) = h.iter().chain(&g).find(|v| !v.is_finite()) {
            return Err(HamiltonianError::Format(format!(
                "non-finite coefficient {bad}"
            )));
        }
        let ham = Hamiltonian { n, e_nuc, h, g };
        ham.check_symmetry()?;
        Ok(ham)
    }

    fn check_symmetry(&self) -> Result<(), HamiltonianError> {
        let n = self.n;
        for s in Spin::BOTH {
            for p in 0..n {
                for q in 0..n {
                    let (a, b) = (self.h(s, p, q), self.h(s, q, p));
                    if (a - b).abs() > SYMMETRY_TOL {
                        return Err(HamiltonianError::Symmetry(format!(
                            "h[{s}][{p}][{q}] = {a} but h[{s}][{q}][{p}] = {b}"
                        )));
                    }
                }
            }
            for t in Spin::BOTH {
                for p in 0..n {
                    for q in 0..n {
                        for r in 0..n {
                            for u in 0..n {
                                let v = self.g(s, t, p, q, r, u);
                                for (name, w) in [
                                    ("qprs", self.g(s, t, q, p, r, u)),
                                    ("pqsr", self.g(s, t, p, q, u, r)),
                                ] {
                                    if (v - w).abs() > SYMMETRY_TOL {
                                        return Err(HamiltonianError::Symmetry(format!(
                                            "g[{s}{t}][{p}{q}{r}{u}] = {v} differs from its {name} permutation {w}"
                                        )));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_orbitals(&self) -> usize {
        self.n
    }

    pub fn e_nuc(&self) -> f64 {
        self.e_nuc
    }

    pub fn h(&self, s: Spin, p: usize, q: usize) -> f64 {
        self.h[(s.index() * self.n + p) * self.n + q]
    }

    pub fn g(&self, s: Spin, t: Spin, p: usize, q: usize, r: usize, u: usize) -> f64 {
        let n = self.n;
        self.g[((((s.index() * 2 + t.index()) * n + p) * n + q) * n + r) * n + u]
    }

    /// Random real Hamiltonian with the full eightfold integral symmetry
    /// (including `g_{pqrs,στ} = g_{rspq,τσ}`), so the operator is Hermitian.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Hamiltonian {
        let mut draw = || -> f64 { rng.sample(StandardNormal) };
        let e_nuc = draw();
        let mut h = vec![0.0; 2 * n * n];
        for s in 0..2 {
            for p in 0..n {
                for q in p..n {
                    let v = draw();
                    h[(s * n + p) * n + q] = v;
                    h[(s * n + q) * n + p] = v;
                }
            }
        }
        let idx = |s: usize, t: usize, p: usize, q: usize, r: usize, u: usize| {
            ((((s * 2 + t) * n + p) * n + q) * n + r) * n + u
        };
        let mut g = vec![f64::NAN; 4 * n.pow(4)];
        for s in 0..2 {
            for t in 0..2 {
                for p in 0..n {
                    for q in 0..n {
                        for r in 0..n {
                            for u in 0..n {
                                if !g[idx(s, t, p, q, r, u)].is_nan() {
                                    continue;
                                }
                                let v = 0.5 * draw();
                                for (a, b) in [(p, q), (q, p)] {
                                    for (c, d) in [(r, u), (u, r)] {
                                        g[idx(s, t, a, b, c, d)] = v;
                                        g[idx(t, s, c, d, a, b)] = v;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Hamiltonian::new(n, e_nuc, h, g).expect("constructed symmetric")
    }

    /// Expansion of the energy as `constant + Σ c_t ⟨t⟩` over independent
    /// terms. Products are symmetrized, so the result is `⟨(H + H†)/2⟩`,
    /// which is `⟨H⟩` when `g` also has pair-exchange symmetry.
    pub fn term_coefficients(&self) -> (f64, BTreeMap<TermKey, f64>) {
        let n = self.n;
        let mut coef: BTreeMap<TermKey, f64> = BTreeMap::new();
        for s in Spin::BOTH {
            for p in 0..n {
                *coef
                    .entry(TermKey::One(HoppingOp::number(p, s)))
                    .or_default() += self.h(s, p, p);
                for q in p + 1..n {
                    let v = 0.5 * (self.h(s, p, q) + self.h(s, q, p));
                    *coef
                        .entry(TermKey::One(HoppingOp::new(p, q, s)))
                        .or_default() += v;
                }
            }
        }
        for s in Spin::BOTH {
            for t in Spin::BOTH {
                for p in 0..n {
                    for q in 0..n {
                        for r in 0..n {
                            for u in 0..n {
                                let w = self.g(s, t, p, q, r, u) / 8.0;
                                if w == 0.0 {
                                    continue;
                                }
                                for (key, c) in expand_product((p, q, s), (r, u, t)) {
                                    *coef.entry(key).or_default() += w * c;
                                }
                            }
                        }
                    }
                }
            }
        }
        (self.e_nuc, coef)
    }

    pub fn from_json_str(text: &str) -> Result<Self, HamiltonianError> {
        let v: Value =
            serde_json::from_str(text).map_err(|e| HamiltonianError::Format(e.to_string()))?;
        let n = v
            .get("n_orbitals")
            .and_then(Value::as_u64)
            .ok_or_else(|| HamiltonianError::Format("missing n_orbitals".into()))?
            as usize;
        let e_nuc = v
            .get("e_nuc")
            .and_then(Value::as_f64)
            .ok_or_else(|| HamiltonianError::Format("missing e_nuc".into()))?;
        let mut h = Vec::new();
        flatten(
            v.get("h")
                .ok_or_else(|| HamiltonianError::Format("missing h".into()))?,
            &mut h,
        )?;
        let mut g = Vec::new();
        flatten(
            v.get("g")
                .ok_or_else(|| HamiltonianError::Format("missing g".into()))?,
            &mut g,
        )?;
        Hamiltonian::new(n, e_nuc, h, g)
    }

    pub fn load(path: &Path) -> Result<Self, HamiltonianError> {
        let text = std::fs::read_to_string(path).map_err(|source| HamiltonianError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    /// Flat row-major arrays.
    pub fn to_json(&self) -> Value {
        json!({
            "n_orbitals": self.n,
            "e_nuc": self.e_nuc,
            "h": self.h,
            "g": self.g,
        })
    }
}

// Accepts both flat and nested arrays.
fn flatten(v: &Value, out: &mut Vec<f64>) -> Result<(), HamiltonianError> {
    match v {
        Value::Array(items) => items.iter().try_for_each(|x| flatten(x, out)),
        Value::Number(x) => {
            out.push(x.as_f64().expect("json numbers are f64-representable"));
            Ok(())
        }
        other => Err(HamiltonianError::Format(format!(
            "unexpected value {other}"
        ))),
    }
}
