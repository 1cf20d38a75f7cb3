use crate::{Ctx, Format, PowerAction};
use anyhow::{anyhow, Context, Result};
use contraction_kit::power::{
    certify_contraction_rate, iteration_bound, lp_counterexample, parse_matrix, parse_vector, LpNorm, SpectralSystem,
    MIN_OVERLAP,
};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::path::Path;

fn load_system(ctx: &mut Ctx, path: &Path) -> Result<SpectralSystem> {
    let text = ctx.report.read(path)?;
    let m = parse_matrix(&text).with_context(|| path.display().to_string())?;
    Ok(SpectralSystem::new(m)?)
}

fn vec_json(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

/// Uniform direction in the cube, normalized, redrawn while nearly
/// perpendicular to `v₁`.
pub fn random_unit(rng: &mut ChaCha8Rng, v1: &DVector<f64>) -> DVector<f64> {
    loop {
        let x = DVector::from_fn(v1.len(), |_, _| rng.random_range(-1.0..1.0)).normalize();
        if x.dot(v1).abs() >= 1e3 * MIN_OVERLAP && x.iter().all(|c| c.is_finite()) {
            return x;
        }
    }
}

pub fn power(ctx: &mut Ctx, action: PowerAction) -> Result<u8> {
    match action {
        PowerAction::Analyze { matrix, pairs } => {
            let sys = load_system(ctx, &matrix)?;
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            let suite: Vec<_> = (0..pairs)
                .map(|_| (random_unit(&mut rng, sys.v1()), random_unit(&mut rng, sys.v1())))
                .collect();
            let cert = certify_contraction_rate(&sys, &suite)?;
            ctx.report.constants.insert("seed".into(), ctx.seed.to_string());
            match ctx.format {
                Format::Csv => print!("{}", cert.to_csv()),
                Format::Text => {
                    println!("eigenvalues: {:?}", sys.eigenvalues());
                    println!("v1: {:?}", vec_json(sys.v1()));
                    println!("rate lambda2/lambda1 = {}", cert.rate);
                    match cert.max_ratio {
                        Some(r) => println!("max observed ratio over {} pairs = {r}", cert.pairs_checked),
                        None => println!("all {} pairs at distance 0", cert.pairs_checked),
                    }
                    println!("{}", if cert.passed() { "PASS" } else { "FAIL" });
                }
            }
            ctx.report.result = json!({
                "eigenvalues": sys.eigenvalues(),
                "v1": vec_json(sys.v1()),
                "rate": cert.rate,
                "pairs": cert.pairs_checked,
                "max_ratio": cert.max_ratio,
                "violations": cert.violations,
            });
            Ok(if cert.passed() { 0 } else { 1 })
        }
        PowerAction::Counterexample { norm } => {
            let norm = LpNorm::parse(&norm).ok_or_else(|| anyhow!("--norm must be 1, 2 or inf"))?;
            let Some(c) = lp_counterexample(norm) else {
                println!("no expanding pair found under {norm}");
                ctx.report.result = json!({ "norm": norm.to_string(), "found": false });
                return Ok(1);
            };
            println!("f(x) = A x / |A x|_2 with A = diag(2, 1), norm {norm}");
            println!("x = {:?}  f(x) = {:?}", vec_json(&c.x), vec_json(&c.fx));
            println!("y = {:?}  f(y) = {:?}", vec_json(&c.y), vec_json(&c.fy));
            println!("|x - y| = {:.6}  |f(x) - f(y)| = {:.6}  ratio = {:.6}", c.before, c.after, c.ratio());
            ctx.report.result = json!({
                "norm": norm.to_string(),
                "found": true,
                "x": vec_json(&c.x), "y": vec_json(&c.y),
                "fx": vec_json(&c.fx), "fy": vec_json(&c.fy),
                "before": c.before, "after": c.after, "ratio": c.ratio(),
            });
            Ok(if c.expands() { 0 } else { 1 })
        }
        PowerAction::Bound { matrix, x0, eps } => {
            let sys = load_system(ctx, &matrix)?;
            let x0 = parse_vector(&x0).map_err(|e| anyhow!("--x0: {e}"))?;
            if x0.norm() == 0.0 {
                return Err(anyhow!("--x0 must be nonzero"));
            }
            let b = iteration_bound(&sys, &x0.normalize(), eps)?;
            match ctx.format {
                Format::Csv => print!("{}", b.to_csv()),
                Format::Text => {
                    println!("d0 = {}", b.d0);
                    match b.predicted {
                        Some(t) => println!("predicted t = {} (formula {t:.6})", b.steps),
                        None => println!("predicted t = 0 (x0 is v1)"),
                    }
                    for s in &b.trace {
                        println!("t = {}: d(x_t, v1) = {:.3e}  |x_t - v1|_2 = {:.3e}", s.t, s.d, s.l2);
                    }
                    println!("{}", if b.satisfied() { "PASS" } else { "FAIL" });
                }
            }
            ctx.report.result = json!({
                "d0": b.d0,
                "predicted": b.predicted,
                "steps": b.steps,
                "final_d": b.last().d,
                "final_l2": b.last().l2,
                "metric_reached": b.metric_reached(),
                "l2_reached": b.l2_reached(),
                "conversion_holds": b.conversion_holds(),
            });
            Ok(if b.satisfied() { 0 } else { 1 })
        }
    }
}
