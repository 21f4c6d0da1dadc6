// SPDX-License-Identifier: MIT OR Apache-2.0
//! Oracle suites. Each compares engine output with an independent computation.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use thetastrat::fans::build_sigma_x;
use thetastrat::hnopt::{max_quadratic_on_cone, verify_certificate, MinBlock, PiecewiseLinearConcave};
use thetastrat::linalg::{fmt_q, q, q_to_f64, qvec, Mat, Q};
use thetastrat::quadforms::{QuadForm, WeightedRep};
use thetastrat::rootdata::RootDatum;
use thetastrat::series::Trunc;
use thetastrat::strata::{enumerate_chi_active, is_chi_active, StrataContext};
use thetastrat::twindex::{tw_index, LevelData, Orientation};

use crate::Failure;

pub struct Options {
    pub group: String,
    pub genus: Option<u32>,
    pub level: Option<i64>,
    pub count: usize,
    pub seed: u64,
}

pub struct Outcome {
    pub results: Value,
    pub oracle: Value,
}

/// One engine/oracle comparison.
struct Case {
    label: String,
    engine: String,
    oracle: String,
    pass: bool,
}

impl Case {
    fn json(&self) -> Value {
        json!({ "case": self.label, "engine": self.engine, "oracle": self.oracle, "pass": self.pass })
    }
}

pub fn run(suite: &str, opts: &Options) -> Result<Outcome, Failure> {
    let suites: Vec<&str> = match suite {
        "all" => vec!["verlinde", "abelian", "grid", "lattice"],
        s @ ("verlinde" | "abelian" | "grid" | "lattice") => vec![s],
        other => {
            return Err(Failure::Schema(format!("check: unknown suite {other:?}; use verlinde, abelian, grid, lattice or all")))
        }
    };
    let mut results = serde_json::Map::new();
    let mut passed = true;
    let mut total = 0;
    for s in suites {
        let cases = match s {
            "verlinde" => verlinde(opts)?,
            "abelian" => abelian(opts)?,
            "grid" => grid(opts)?,
            _ => lattice()?,
        };
        passed &= cases.iter().all(|c| c.pass);
        total += cases.len();
        results.insert(s.to_string(), Value::Array(cases.iter().map(Case::json).collect()));
    }
    Ok(Outcome { results: Value::Object(results), oracle: json!({ "cases": total, "passed": passed }) })
}

fn genera(opts: &Options) -> Vec<u32> {
    opts.genus.map_or_else(|| (0..=2).collect(), |g| vec![g])
}

fn levels(opts: &Options) -> Result<Vec<i64>, Failure> {
    match opts.level {
        Some(k) if k < 1 => Err(Failure::Schema("--k: level must be positive".into())),
        Some(k) => Ok(vec![k]),
        None => Ok((1..=4).collect()),
    }
}

fn constant_index(datum: &RootDatum, h: Mat, g: u32) -> Result<i64, Failure> {
    let level = LevelData::new(datum, h, Orientation::CALIBRATED)?;
    Ok(tw_index(&level, g, None, &[], Trunc::new(0, 0, 0))?.constant_term()?.0)
}

/// `((k+2)/2)^{g−1} Σ_j sin(jπ/(k+2))^{2−2g}`, rounded.
fn verlinde_a1(k: i64, g: u32) -> i64 {
    let n = (k + 2) as f64;
    let g = g as i32;
    let v = (n / 2.0).powi(g - 1) * (1..=k + 1).map(|j| (j as f64 * PI / n).sin().powi(2 - 2 * g)).sum::<f64>();
    v.round() as i64
}

fn verlinde(opts: &Options) -> Result<Vec<Case>, Failure> {
    let tag = opts.group.as_str();
    if !matches!(tag, "A1" | "GL1") {
        return Err(Failure::Schema(format!("--type: the verlinde suite covers A1 and GL1, not {tag:?}")));
    }
    let datum = RootDatum::preset(tag)?;
    let mut out = Vec::new();
    for k in levels(opts)? {
        for g in genera(opts) {
            let (h, want) =
                if tag == "A1" { (2 * k, verlinde_a1(k, g)) } else { (k, k.pow(g)) };
            let got = constant_index(&datum, Mat::from_i64(&[vec![h]]), g)?;
            out.push(Case {
                label: format!("{tag} k={k} g={g}"),
                engine: got.to_string(),
                oracle: want.to_string(),
                pass: got == want,
            });
        }
    }
    Ok(out)
}

/// Rank-two tori: the index is `det(h)^g`.
fn abelian(opts: &Options) -> Result<Vec<Case>, Failure> {
    let torus = RootDatum::torus(2);
    let forms = [[[1, 0], [0, 1]], [[2, 1], [1, 2]], [[3, 1], [1, 2]], [[4, -1], [-1, 2]]];
    let mut out = Vec::new();
    for f in forms {
        let h = Mat::from_i64(&[f[0].to_vec(), f[1].to_vec()]);
        let det = f[0][0] * f[1][1] - f[0][1] * f[1][0];
        for g in genera(opts) {
            let got = constant_index(&torus, h.clone(), g)?;
            let want = det.pow(g);
            out.push(Case {
                label: format!("T2 h={f:?} g={g}"),
                engine: got.to_string(),
                oracle: want.to_string(),
                pass: got == want,
            });
        }
    }
    Ok(out)
}

/// Random concave quadratic problems on cones of rank-two fans against a dense grid.
fn grid(opts: &Options) -> Result<Vec<Case>, Failure> {
    const RADIUS: f64 = 6.0;
    const STEPS: i32 = 1200;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let torus = RootDatum::torus(2);
    let mut out = Vec::new();
    while out.len() < opts.count {
        let weights: Vec<(Vec<i64>, i64)> =
            (0..rng.gen_range(1..=3)).map(|_| (vec![rng.gen_range(-2..=2), rng.gen_range(-2..=2)], 1)).collect();
        let fan = build_sigma_x(&torus, &WeightedRep::from_i64(&weights));
        let full: Vec<_> = fan.cones.iter().filter(|c| c.dim == 2).collect();
        let cone = full[rng.gen_range(0..full.len())];
        // Entries in [−2, 2] bound ‖∇ℓ‖ by 4√2; with λ_min(b) ≥ 1 the maximizer lies in the grid box.
        let linear = qvec(&[rng.gen_range(-2..=2), rng.gen_range(-2..=2)]);
        let pieces = (0..rng.gen_range(1..=2)).map(|_| qvec(&[rng.gen_range(-2..=2), rng.gen_range(-2..=2)])).collect();
        let ell = PiecewiseLinearConcave::new(linear, vec![MinBlock { weight: q(1), pieces }])?;
        let (a, c, off) = loop {
            let (a, c, off) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(-1..=1i64));
            if a.min(c) - off.abs() >= 1 {
                break (a, c, off);
            }
        };
        let b = QuadForm::new(Mat::from_i64(&[vec![a, off], vec![off, c]]))?;
        let opt = max_quadratic_on_cone(&ell, &b, cone)?;
        let certified = verify_certificate(&ell, &b, cone, &opt);
        // The grid runs in f64, independently of the exact solver.
        let to_f = |v: &[Q]| v.iter().map(q_to_f64).collect::<Vec<f64>>();
        let dotf = |u: &[f64], w: &[f64; 2]| u[0] * w[0] + u[1] * w[1];
        let lin = to_f(&ell.linear);
        let blocks: Vec<(f64, Vec<Vec<f64>>)> =
            ell.blocks.iter().map(|bl| (q_to_f64(&bl.weight), bl.pieces.iter().map(|p| to_f(p)).collect())).collect();
        let halfspaces: Vec<Vec<f64>> = cone.halfspaces.iter().map(|h| to_f(h)).collect();
        let (af, cf, of) = (a as f64, c as f64, off as f64);
        let f = |w: &[f64; 2]| {
            let mins: f64 = blocks
                .iter()
                .map(|(wt, ps)| wt * ps.iter().map(|p| dotf(p, w)).fold(f64::INFINITY, f64::min))
                .sum();
            dotf(&lin, w) + mins - (af * w[0] * w[0] + 2.0 * of * w[0] * w[1] + cf * w[1] * w[1]) / 2.0
        };
        let mut best = f64::NEG_INFINITY;
        let h = 2.0 * RADIUS / f64::from(STEPS);
        for i in 0..=STEPS {
            for j in 0..=STEPS {
                let w = [f64::from(i) * h - RADIUS, f64::from(j) * h - RADIUS];
                if halfspaces.iter().all(|hs| dotf(hs, &w) >= -1e-12) {
                    best = best.max(f(&w));
                }
            }
        }
        let value = q_to_f64(&opt.value);
        // Lipschitz bound on the box times the half-diagonal of a grid cell.
        let lip = 4.0 * 2f64.sqrt() + RADIUS * (a.max(c) + off.abs()) as f64;
        let tol = lip * (2.0 * RADIUS / f64::from(STEPS)) * 2f64.sqrt() / 2.0;
        let pass = certified && cone.contains(&opt.maximizer) && best <= value + 1e-9 && value - best <= tol;
        out.push(Case {
            label: format!("cone {} of X={weights:?}", cone.id),
            engine: fmt_q(&opt.value),
            oracle: format!("{best:.6} (tolerance {tol:.4})"),
            pass,
        });
    }
    Ok(out)
}

/// GL1 vortex strata against a per-degree scan of every candidate destabilizer.
fn lattice() -> Result<Vec<Case>, Failure> {
    let x = WeightedRep::from_i64(&[(vec![1], 1)]);
    let mut out = Vec::new();
    for chi in [-5i64, -3, -1, 2] {
        let ctx = StrataContext::new(RootDatum::torus(1), x.clone(), x.clone(), QuadForm::identity(1), qvec(&[chi]))?;
        let g2 = q(36);
        let engine: BTreeSet<(Q, Q)> = enumerate_chi_active(&ctx, &qvec(&[0]), &g2, None)?
            .into_iter()
            .map(|nu| (nu.d[0].clone(), nu.lambda[0].clone()))
            .collect();
        // With b = V-form = 1 the only candidate with λ ≠ 0 is the target d + χ; μ² = λ².
        let mut oracle = BTreeSet::new();
        for d in -60i64..=60 {
            let lam = d + chi;
            if lam != 0 && lam * lam <= 36 && is_chi_active(&ctx, &qvec(&[d]), &qvec(&[lam])).0 {
                oracle.insert((q(d), q(lam)));
            }
        }
        let nonzero: BTreeSet<_> = engine.iter().filter(|(_, l)| *l != q(0)).cloned().collect();
        out.push(Case {
            label: format!("GL1 vortex chi={chi} gamma2=36"),
            engine: format!("{} strata with λ ≠ 0", nonzero.len()),
            oracle: format!("{} strata with λ ≠ 0", oracle.len()),
            pass: nonzero == oracle,
        });
    }
    Ok(out)
}
