//! JSON persistence for operator families (SIC candidates, MUB sets, or any
//! list of states/operators).
//!
//! Complex numbers are `[re, im]` pairs, spins are `{"two_j": n}`, and frame
//! indices are one-based. Output is pretty-printed with a fixed key order and
//! shortest round-trip floats, so write -> read -> write is byte-stable.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::frame::{expand_labeled, frame_index, frame_kq, Target, TensorCoefficients};
use crate::linalg::{projector, CMatrix, CVector, C64};
use crate::mub::MubSet;
use crate::sic::{overlap_residual, Provenance, SearchOutcome, SicCandidate};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    Version(u32),
    #[error("expected a {expected} family, found {found}")]
    Kind { expected: Kind, found: Kind },
    #[error("member {index} ({label}): {reason}")]
    Member { index: usize, label: String, reason: String },
    #[error("{0}")]
    Shape(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Sic,
    Mub,
    Generic,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kind::Sic => "sic",
            Kind::Mub => "mub",
            Kind::Generic => "generic",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spin {
    pub two_j: u32,
}

/// One coefficient `c_kq` with its one-based frame index `i = k^2 + k + q + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub i: usize,
    pub k: u32,
    pub q: i32,
    pub value: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<Coefficient>>,
}

impl Member {
    fn new(label: String) -> Self {
        Self {
            label,
            basis: None,
            index: None,
            state: None,
            operator: None,
            coefficients: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub schema_version: u32,
    pub kind: Kind,
    pub j: Spin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiducial: Option<Vec<[f64; 2]>>,
    pub members: Vec<Member>,
    #[serde(default)]
    pub metadata: BTreeMap<String, Value>,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn from_pair(p: &[f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

pub fn encode_vector(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().copied().map(pair).collect()
}

pub fn encode_matrix(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    m.row_iter().map(|r| r.iter().copied().map(pair).collect()).collect()
}

pub fn encode_coefficients(c: &TensorCoefficients) -> Vec<Coefficient> {
    c.iter()
        .map(|(k, q, z)| Coefficient {
            i: frame_index(k, q) + 1,
            k,
            q,
            value: pair(z),
        })
        .collect()
}

impl FamilyFile {
    pub fn new(kind: Kind, two_j: u32) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind,
            j: Spin { two_j },
            fiducial: None,
            members: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.j.two_j as usize + 1
    }

    pub fn from_sic(c: &SicCandidate) -> Self {
        let mut f = Self::new(Kind::Sic, c.two_j());
        f.fiducial = c.fiducial.as_ref().map(encode_vector);
        f.members = c
            .states
            .iter()
            .enumerate()
            .map(|(x, s)| {
                let mut m = Member::new(format!("x={x}"));
                m.index = Some(x);
                m.state = Some(encode_vector(s));
                m
            })
            .collect();
        let provenance = match c.provenance {
            Provenance::Orbit => "weyl_heisenberg_orbit",
            Provenance::Explicit => "explicit",
        };
        f.metadata.insert("provenance".into(), provenance.into());
        f.metadata.insert("residual".into(), c.residual.into());
        f.metadata.insert("converged".into(), c.converged.into());
        if let Some(s) = &c.search {
            f.metadata.insert("search".into(), serde_json::to_value(s).expect("plain data"));
        }
        f
    }

    pub fn from_mub(set: &MubSet) -> Self {
        let mut f = Self::new(Kind::Mub, set.two_j());
        f.members = set
            .members()
            .map(|(a, alpha, v)| {
                let mut m = Member::new(format!("a={a},alpha={alpha}"));
                m.basis = Some(a);
                m.index = Some(alpha);
                m.state = Some(encode_vector(v));
                m
            })
            .collect();
        f.metadata.insert("d".into(), set.d.into());
        f.metadata.insert("bases".into(), set.bases.len().into());
        f
    }

    /// Attach `coefficients` to members in order.
    pub fn attach_coefficients(&mut self, coeffs: &[TensorCoefficients]) -> Result<(), FamilyError> {
        if coeffs.len() != self.members.len() {
            return Err(FamilyError::Shape(format!(
                "{} coefficient sets for {} members",
                coeffs.len(),
                self.members.len()
            )));
        }
        for (m, c) in self.members.iter_mut().zip(coeffs) {
            m.coefficients = Some(encode_coefficients(c));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, FamilyError> {
        let f: FamilyFile = serde_json::from_str(text)?;
        if f.schema_version != SCHEMA_VERSION {
            return Err(FamilyError::Version(f.schema_version));
        }
        f.validate()?;
        Ok(f)
    }

    fn member_error(&self, index: usize, reason: impl Into<String>) -> FamilyError {
        FamilyError::Member {
            index,
            label: self.members[index].label.clone(),
            reason: reason.into(),
        }
    }

    /// Dimensions of every state, operator and coefficient list match `two_j`.
    pub fn validate(&self) -> Result<(), FamilyError> {
        let d = self.dim();
        if let Some(f) = &self.fiducial {
            if f.len() != d {
                return Err(FamilyError::Shape(format!("fiducial has {} components, expected {d}", f.len())));
            }
        }
        for (i, m) in self.members.iter().enumerate() {
            if let Some(s) = &m.state {
                if s.len() != d {
                    return Err(self.member_error(i, format!("state has {} components, expected {d}", s.len())));
                }
            }
            if let Some(op) = &m.operator {
                if op.len() != d || op.iter().any(|r| r.len() != d) {
                    return Err(self.member_error(i, format!("operator is not {d}x{d}")));
                }
            }
            if let Some(cs) = &m.coefficients {
                if cs.len() != d * d {
                    return Err(self.member_error(i, format!("{} coefficients, expected {}", cs.len(), d * d)));
                }
                for c in cs {
                    let ok = c.i >= 1 && c.k <= self.j.two_j && c.q.unsigned_abs() <= c.k && frame_index(c.k, c.q) + 1 == c.i;
                    if !ok {
                        return Err(self.member_error(i, format!("inconsistent coefficient index i={} k={} q={}", c.i, c.k, c.q)));
                    }
                }
            }
            if m.state.is_none() && m.operator.is_none() && m.coefficients.is_none() {
                return Err(self.member_error(i, "needs a state, operator, or coefficients"));
            }
        }
        Ok(())
    }

    pub fn states(&self) -> Result<Vec<CVector>, FamilyError> {
        self.members
            .iter()
            .enumerate()
            .map(|(i, m)| {
                m.state
                    .as_ref()
                    .map(|s| CVector::from_iterator(s.len(), s.iter().map(from_pair)))
                    .ok_or_else(|| self.member_error(i, "missing state"))
            })
            .collect()
    }

    /// Each member's coefficient set: stored coefficients win, then the
    /// operator, then the state's projector.
    pub fn coefficients(&self) -> Result<Vec<TensorCoefficients>, FamilyError> {
        let two_j = self.j.two_j;
        let d = self.dim();
        self.members
            .iter()
            .enumerate()
            .map(|(i, m)| {
                if let Some(cs) = &m.coefficients {
                    let mut t = TensorCoefficients::zeros(two_j, m.label.clone());
                    let mut seen = vec![false; d * d];
                    for c in cs {
                        let (k, q) = frame_kq(c.i - 1);
                        t.set(k, q, from_pair(&c.value));
                        seen[c.i - 1] = true;
                    }
                    if seen.iter().any(|s| !s) {
                        return Err(self.member_error(i, "coefficient indices repeat"));
                    }
                    return Ok(t);
                }
                let op = if let Some(op) = &m.operator {
                    CMatrix::from_fn(d, d, |r, c| from_pair(&op[r][c]))
                } else {
                    let s = m.state.as_ref().expect("validated");
                    projector(&CVector::from_iterator(d, s.iter().map(from_pair)))
                };
                Ok(expand_labeled(&op, two_j, m.label.clone()).expect("validated shape"))
            })
            .collect()
    }

    /// The pairwise target implied by `kind`.
    pub fn target(&self) -> Result<Target, FamilyError> {
        let d = self.dim();
        Ok(match self.kind {
            Kind::Sic => Target::Sic { d },
            Kind::Mub => Target::Mub {
                d,
                basis_of: self
                    .members
                    .iter()
                    .enumerate()
                    .map(|(i, m)| m.basis.ok_or_else(|| self.member_error(i, "MUB member without basis index")))
                    .collect::<Result<_, _>>()?,
            },
            Kind::Generic => Target::Generic,
        })
    }

    pub fn to_sic(&self) -> Result<SicCandidate, FamilyError> {
        if self.kind != Kind::Sic {
            return Err(FamilyError::Kind {
                expected: Kind::Sic,
                found: self.kind,
            });
        }
        let d = self.dim();
        let states = self.states()?;
        if states.len() != d * d {
            return Err(FamilyError::Shape(format!("{} states, expected {}", states.len(), d * d)));
        }
        let fiducial = self
            .fiducial
            .as_ref()
            .map(|f| CVector::from_iterator(d, f.iter().map(from_pair)));
        let search = self
            .metadata
            .get("search")
            .map(|v| serde_json::from_value::<SearchOutcome>(v.clone()))
            .transpose()?;
        let converged = self.metadata.get("converged").and_then(Value::as_bool).unwrap_or(false);
        Ok(SicCandidate {
            d,
            residual: overlap_residual(d, &states),
            states,
            provenance: if fiducial.is_some() { Provenance::Orbit } else { Provenance::Explicit },
            fiducial,
            converged,
            search,
        })
    }

    pub fn to_mub(&self) -> Result<MubSet, FamilyError> {
        if self.kind != Kind::Mub {
            return Err(FamilyError::Kind {
                expected: Kind::Mub,
                found: self.kind,
            });
        }
        let d = self.dim();
        let states = self.states()?;
        let mut bases: Vec<Vec<Option<CVector>>> = Vec::new();
        for (i, (m, s)) in self.members.iter().zip(states).enumerate() {
            let (a, alpha) = match (m.basis, m.index) {
                (Some(a), Some(alpha)) if alpha < d => (a, alpha),
                _ => return Err(self.member_error(i, "MUB member needs basis and index < d")),
            };
            if bases.len() <= a {
                bases.resize_with(a + 1, || vec![None; d]);
            }
            if bases[a][alpha].replace(s).is_some() {
                return Err(self.member_error(i, "duplicate (basis, index)"));
            }
        }
        let bases = bases
            .into_iter()
            .enumerate()
            .map(|(a, b)| {
                b.into_iter()
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| FamilyError::Shape(format!("basis {a} is incomplete")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MubSet { d, bases })
    }
}
