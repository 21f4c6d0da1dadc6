// SPDX-License-Identifier: MIT OR Apache-2.0
//! Run configuration: TOML in, exact rationals throughout, canonical TOML echo out.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use thetastrat::linalg::{fmt_q, Mat, QVec, Q};
use thetastrat::quadforms::{default_norm, QuadForm, WeightedRep};
use thetastrat::rootdata::RootDatum;
use thetastrat::series::Trunc;
use thetastrat::twindex::{DeltaSign, Orientation};

/// A rational written as an integer or a string such as `"3/2"`; echoed as a string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rat(pub Q);

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(k) => Ok(Rat(Q::from_integer(k.into()))),
            Raw::Str(s) => Q::from_str(s.trim())
                .map(Rat)
                .map_err(|_| serde::de::Error::custom(format!("{s:?} is not a rational number"))),
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(&self.0))
    }
}

fn qv(v: &[Rat]) -> QVec {
    v.iter().map(|r| r.0.clone()).collect()
}

/// A weight with multiplicity, or a bare weight of multiplicity one.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum WeightEntry {
    Bare(Vec<Rat>),
    Full { weight: Vec<Rat>, mult: i64 },
}

impl WeightEntry {
    fn parts(&self) -> (&[Rat], i64) {
        match self {
            WeightEntry::Bare(w) => (w, 1),
            WeightEntry::Full { weight, mult } => (weight, *mult),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum NormSpec {
    /// `"default"` (`ch₂(𝔤)` plus the identity on the center), `"trace"` (`ch₂(V)`) or `"identity"`.
    Named(String),
    Matrix(Vec<Vec<Rat>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CustomGroup {
    pub rank: usize,
    pub simple_roots: Vec<Vec<i64>>,
    pub simple_coroots: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Preset(String),
    Custom(CustomGroup),
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    #[serde(default = "default_kt")]
    pub t: u32,
    #[serde(default)]
    pub s: u32,
    #[serde(default)]
    pub q: u32,
}

fn default_kt() -> u32 {
    8
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { t: default_kt(), s: 0, q: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OrientationSpec {
    pub level_sign: i64,
    /// `"plain"` or `"compact"`.
    pub delta: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub gamma2: Rat,
    /// Restricts the scan to one central degree.
    pub central: Option<Vec<Rat>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HnOptSpec {
    /// Linear part; defaults to `(φ_V(d) + χ†, −)_b`.
    pub linear: Option<Vec<Rat>>,
    #[serde(default)]
    pub delta_gen: Option<Rat>,
    #[serde(default)]
    pub delta_mrk: Option<Rat>,
    #[serde(default)]
    pub sigma_gen: Vec<Vec<Rat>>,
    #[serde(default)]
    pub sigma_mrk: Vec<Vec<Rat>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GgwSpec {
    /// `(rank, degree)` of the Atiyah–Bott class `a`; absent means `F = 𝒪_p(U′)`.
    pub a: Option<[i64; 2]>,
    /// Evaluate at `(V^{⊕m}, mχ, F ⊗ 𝒪_p(−mχ))`.
    pub quantize: Option<i64>,
    #[serde(default = "default_depth")]
    pub depth_limit: usize,
}

fn default_depth() -> usize {
    8
}

/// Everything a run needs, as read from TOML.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub group: GroupSpec,
    #[serde(default)]
    pub genus: u32,
    #[serde(rename = "V", default)]
    pub v: Vec<WeightEntry>,
    #[serde(rename = "X", default)]
    pub x: Vec<WeightEntry>,
    #[serde(rename = "U", default)]
    pub u: Vec<WeightEntry>,
    #[serde(rename = "U_prime", default)]
    pub u_prime: Vec<WeightEntry>,
    pub b: Option<NormSpec>,
    pub chi: Option<Vec<Rat>>,
    pub degree: Option<Vec<Rat>>,
    pub d_ker: Option<Vec<Rat>>,
    /// Level form; defaults to `ch₂(V)`.
    pub level: Option<Vec<Vec<Rat>>>,
    pub orientation: Option<OrientationSpec>,
    #[serde(default)]
    pub truncation: Truncation,
    pub scan: Option<ScanSpec>,
    pub precision: Option<usize>,
    pub hnopt: Option<HnOptSpec>,
    pub ggw: Option<GgwSpec>,
}

/// A schema violation with the path of the offending field.
#[derive(Debug)]
pub struct SchemaError(pub String);

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn schema(msg: impl Into<String>) -> SchemaError {
    SchemaError(msg.into())
}

/// Resolved, validated inputs.
pub struct Resolved {
    pub datum: RootDatum,
    pub v: WeightedRep,
    pub x: WeightedRep,
    pub u: WeightedRep,
    pub u_prime: Option<WeightedRep>,
    pub b: QuadForm,
    pub chi: QVec,
    pub degree: QVec,
    pub d_ker: QVec,
    pub level: Mat,
    pub orientation: Orientation,
    pub trunc: Trunc,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, SchemaError> {
        toml::from_str(text).map_err(|e| schema(format!("config: {}", e.to_string().trim_end())))
    }

    /// Canonical TOML; parsing it back yields an identical config.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("configs serialize")
    }

    pub fn hash(&self) -> String {
        Sha256::digest(self.echo().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn datum(&self) -> Result<RootDatum, SchemaError> {
        match &self.group {
            GroupSpec::Preset(tag) => RootDatum::preset(tag).map_err(|e| schema(format!("group: {e}"))),
            GroupSpec::Custom(c) => {
                let conv = |rows: &[Vec<i64>]| rows.iter().map(|r| r.iter().map(|&k| Q::from_integer(k.into())).collect()).collect();
                RootDatum::from_simple("custom", c.rank, conv(&c.simple_coroots), conv(&c.simple_roots), 10_000)
                    .map_err(|e| schema(format!("group: {e}")))
            }
        }
    }

    pub fn resolve(&self) -> Result<Resolved, SchemaError> {
        let datum = self.datum()?;
        let n = datum.rank;
        let vector = |name: &str, v: &Option<Vec<Rat>>| -> Result<QVec, SchemaError> {
            match v {
                None => Ok(vec![Q::from_integer(0.into()); n]),
                Some(v) if v.len() == n => Ok(qv(v)),
                Some(v) => Err(schema(format!("{name}: expected {n} entries, found {}", v.len()))),
            }
        };
        let rep = |name: &str, entries: &[WeightEntry]| -> Result<WeightedRep, SchemaError> {
            let mut out = Vec::new();
            for (i, e) in entries.iter().enumerate() {
                let (w, mult) = e.parts();
                if w.len() != n {
                    return Err(schema(format!("{name}[{i}]: expected a weight with {n} entries, found {}", w.len())));
                }
                if mult < 1 {
                    return Err(schema(format!("{name}[{i}].mult: must be positive")));
                }
                if w.iter().any(|r| !r.0.is_integer()) {
                    return Err(schema(format!("{name}[{i}]: weights must be integral")));
                }
                out.push((qv(w), mult));
            }
            let r = WeightedRep::new(out);
            if !r.is_weyl_stable(&datum) {
                return Err(schema(format!("{name}: weights are not Weyl-stable")));
            }
            Ok(r)
        };
        let matrix = |name: &str, rows: &[Vec<Rat>]| -> Result<Mat, SchemaError> {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(schema(format!("{name}: expected a {n}×{n} matrix")));
            }
            let m = Mat::from_rows(&rows.iter().map(|r| qv(r)).collect::<Vec<_>>());
            if !m.is_symmetric() {
                return Err(schema(format!("{name}: matrix must be symmetric")));
            }
            Ok(m)
        };
        let v = rep("V", &self.v)?;
        let x = rep("X", &self.x)?;
        let u = rep("U", &self.u)?;
        let u_prime = if self.u_prime.is_empty() { None } else { Some(rep("U_prime", &self.u_prime)?) };
        let trace = v.ch2_form(n);
        let b = match &self.b {
            None => default_norm(&datum),
            Some(NormSpec::Named(s)) if s == "default" => default_norm(&datum),
            Some(NormSpec::Named(s)) if s == "trace" => trace.clone(),
            Some(NormSpec::Named(s)) if s == "identity" => QuadForm::identity(n),
            Some(NormSpec::Named(s)) => return Err(schema(format!("b: unknown norm {s:?}; use \"default\", \"trace\", \"identity\" or a matrix"))),
            Some(NormSpec::Matrix(rows)) => QuadForm::new(matrix("b", rows)?).map_err(|e| schema(format!("b: {e}")))?,
        };
        let chi = vector("chi", &self.chi)?;
        if !datum.is_invariant_character(&chi) {
            return Err(schema("chi: must be Weyl-invariant (pair to zero with every simple coroot)"));
        }
        let degree = vector("degree", &self.degree)?;
        let d_ker = vector("d_ker", &self.d_ker)?;
        let level = match &self.level {
            None => trace.matrix.clone(),
            Some(rows) => matrix("level", rows)?,
        };
        let orientation = match &self.orientation {
            None => Orientation::CALIBRATED,
            Some(o) => {
                let delta = match o.delta.as_str() {
                    "plain" => DeltaSign::Plain,
                    "compact" => DeltaSign::Compact,
                    other => return Err(schema(format!("orientation.delta: unknown value {other:?}"))),
                };
                if o.level_sign.abs() != 1 {
                    return Err(schema("orientation.level_sign: must be 1 or -1"));
                }
                Orientation { level_sign: o.level_sign, delta }
            }
        };
        let t = &self.truncation;
        Ok(Resolved {
            datum,
            v,
            x,
            u,
            u_prime,
            b,
            chi,
            degree,
            d_ker,
            level,
            orientation,
            trunc: Trunc::new(t.t, t.s, t.q),
        })
    }
}

pub fn rat_vec(v: &[Rat]) -> QVec {
    qv(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    const VORTEX: &str = r#"
group = "GL1"
V = [[1]]
X = [{ weight = [1], mult = 1 }]
b = "identity"
chi = ["-3"]
degree = [1]

[truncation]
t = 6
"#;

    #[test]
    fn echo_round_trips() {
        let c = RunConfig::parse(VORTEX).unwrap();
        let again = RunConfig::parse(&c.echo()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.hash(), again.hash());
    }

    #[test]
    fn rationals_are_exact() {
        let c = RunConfig::parse("group = \"GL1\"\nchi = [\"3/2\"]\n").unwrap();
        assert_eq!(c.resolve().unwrap().chi, vec![Q::new(3.into(), 2.into())]);
    }

    #[test]
    fn malformed_weight_is_pointed_out() {
        let c = RunConfig::parse("group = \"GL1\"\nV = [[1, 2]]\n").unwrap();
        let e = c.resolve().err().unwrap();
        assert!(e.0.starts_with("V[0]"), "{e}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(RunConfig::parse("group = \"GL1\"\nfoo = 1\n").is_err());
    }

    #[test]
    fn non_invariant_character_is_rejected() {
        let c = RunConfig::parse("group = \"A1\"\nchi = [1]\n").unwrap();
        assert!(c.resolve().is_err());
    }
}
