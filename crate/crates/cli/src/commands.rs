// SPDX-License-Identifier: MIT OR Apache-2.0
use serde_json::{json, Value};

use thetastrat::ggw::{quantization_threshold, quantized_class, quantized_context, recursive_ggw, trivial, FClass, GgwConfig};
use thetastrat::hnopt::{hn_over_fan, verify_certificate, ConeProblem, MinBlock, PiecewiseLinearConcave};
use thetastrat::linalg::{fmt_q, QVec};
use thetastrat::quadforms::flat;
use thetastrat::strata::{enumerate_chi_active, stratum_report, StrataContext};
use thetastrat::twindex::{full_index_formula, LevelData};

use crate::config::{rat_vec, Rat, Resolved, RunConfig};
use crate::Failure;

fn render(v: &[thetastrat::linalg::Q]) -> Vec<String> {
    v.iter().map(fmt_q).collect()
}

fn context(r: &Resolved) -> Result<StrataContext, Failure> {
    Ok(StrataContext::new(r.datum.clone(), r.x.clone(), r.v.clone(), r.b.clone(), r.chi.clone())?)
}

fn gamma2(cfg: &RunConfig) -> Option<thetastrat::linalg::Q> {
    cfg.scan.as_ref().map(|s| s.gamma2.0.clone())
}

fn central(cfg: &RunConfig, n: usize) -> Result<Option<QVec>, Failure> {
    match cfg.scan.as_ref().and_then(|s| s.central.as_ref()) {
        None => Ok(None),
        Some(c) if c.len() == n => Ok(Some(rat_vec(c))),
        Some(c) => Err(Failure::Schema(format!("scan.central: expected {n} entries, found {}", c.len()))),
    }
}

pub fn strata(cfg: &RunConfig) -> Result<Value, Failure> {
    let r = cfg.resolve()?;
    let g2 = gamma2(cfg).ok_or_else(|| Failure::Schema("scan.gamma2: required by strata".into()))?;
    let ctx = context(&r)?;
    let central = central(cfg, r.datum.rank)?;
    let list = enumerate_chi_active(&ctx, &r.d_ker, &g2, central.as_deref())?;
    let reports = list.iter().map(|nu| stratum_report(&ctx, nu)).collect::<Result<Vec<_>, _>>()?;
    Ok(json!({ "gamma2": fmt_q(&g2), "count": reports.len(), "strata": reports }))
}

fn block(name: &str, delta: &Option<Rat>, pieces: &[Vec<Rat>], n: usize) -> Result<Option<MinBlock>, Failure> {
    if pieces.is_empty() {
        return Ok(None);
    }
    if let Some((i, p)) = pieces.iter().enumerate().find(|(_, p)| p.len() != n) {
        return Err(Failure::Schema(format!("hnopt.sigma_{name}[{i}]: expected {n} entries, found {}", p.len())));
    }
    let weight = delta.as_ref().map(|d| d.0.clone()).unwrap_or_else(|| thetastrat::linalg::q(1));
    Ok(Some(MinBlock { weight, pieces: pieces.iter().map(|p| rat_vec(p)).collect() }))
}

pub fn hn_opt(cfg: &RunConfig) -> Result<Value, Failure> {
    let r = cfg.resolve()?;
    let ctx = context(&r)?;
    let n = r.datum.rank;
    let section = cfg.hnopt.clone().unwrap_or(crate::config::HnOptSpec {
        linear: None,
        delta_gen: None,
        delta_mrk: None,
        sigma_gen: Vec::new(),
        sigma_mrk: Vec::new(),
    });
    let linear = match &section.linear {
        Some(l) if l.len() == n => rat_vec(l),
        Some(l) => return Err(Failure::Schema(format!("hnopt.linear: expected {n} entries, found {}", l.len()))),
        None => flat(&ctx.target(&r.degree), &r.b),
    };
    let blocks: Vec<MinBlock> = [
        block("gen", &section.delta_gen, &section.sigma_gen, n)?,
        block("mrk", &section.delta_mrk, &section.sigma_mrk, n)?,
    ]
    .into_iter()
    .flatten()
    .collect();
    let ell = PiecewiseLinearConcave::new(linear.clone(), blocks)?;
    let problems: Vec<ConeProblem> =
        ctx.fan.cones.iter().map(|c| ConeProblem { id: c.id, cone: c.clone(), ell: ell.clone() }).collect();
    let best = hn_over_fan(&problems, &r.b)?;
    let cone = &ctx.fan.cones.iter().find(|c| c.id == best.cone_id).expect("optimum cone is in the fan");
    let opt = &best.result.quadratic;
    let cert = &opt.certificate;
    Ok(json!({
        "linear": render(&linear),
        "cones": ctx.fan.len(),
        "cone_id": best.cone_id,
        "positive": best.result.positive,
        "mu2": fmt_q(&best.result.mu2),
        "maximizer": render(&best.result.maximizer),
        "quadratic_value": fmt_q(&opt.value),
        "ell_value": fmt_q(&opt.ell_value),
        "boundary": opt.boundary,
        "active_halfspaces": opt.active_halfspaces,
        "certificate": {
            "piece_multipliers": cert.piece_multipliers.iter().map(|m| render(m)).collect::<Vec<_>>(),
            "halfspace_multipliers": render(&cert.halfspace_multipliers),
            "verified": verify_certificate(&ell, &r.b, cone, opt),
        },
        "cone": cone.dump(),
    }))
}

pub fn index(cfg: &RunConfig) -> Result<Value, Failure> {
    let r = cfg.resolve()?;
    let level = LevelData::new(&r.datum, r.level.clone(), r.orientation)?;
    let report = full_index_formula(&level, cfg.genus, &r.u, r.u_prime.as_ref(), &r.x, r.trunc)?;
    Ok(json!({
        "genus": cfg.genus,
        "level": report.level,
        "solutions": report.solutions,
        "integers": report.integers,
        "series": report.series_terms(),
    }))
}

pub fn ggw(cfg: &RunConfig) -> Result<Value, Failure> {
    let r = cfg.resolve()?;
    let base = context(&r)?;
    let section = cfg.ggw.clone().unwrap_or(crate::config::GgwSpec { a: None, quantize: None, depth_limit: 8 });
    let n = r.datum.rank;
    let u_prime = r.u_prime.clone().unwrap_or_else(|| trivial(n));
    let f0 = match section.a {
        Some([rank, degree]) => FClass::atiyah_bott((rank, degree), &r.u, &u_prime, cfg.genus),
        None => FClass::character(u_prime),
    };
    let gcfg = GgwConfig {
        genus: cfg.genus,
        trunc: r.trunc,
        depth_limit: section.depth_limit,
        gamma2: gamma2(cfg),
        orientation: r.orientation,
    };
    let (ctx, f, threshold) = match section.quantize {
        None => (base, f0, None),
        Some(m) if m < 1 => return Err(Failure::Schema("ggw.quantize: must be positive".into())),
        Some(m) => {
            let thr = quantization_threshold(&base, &r.degree, &r.d_ker, &f0, &gcfg)?;
            (quantized_context(&base, m)?, quantized_class(&base, &f0, m), Some(thr))
        }
    };
    let report = recursive_ggw(&ctx, &r.degree, &r.d_ker, &f, &gcfg)?;
    Ok(json!({ "quantize": section.quantize, "threshold": threshold, "report": report }))
}
