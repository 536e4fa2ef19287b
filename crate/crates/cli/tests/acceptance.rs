//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::{Command, ExitCode};

use ewitness::choi_demo::{closed_forms, nontrivial_extension_exhibit, theorem4_values, AbParams, KAPPA};
use ewitness::extension::{extend_state, extend_witness, extended_zero_set, ExtensionSpec};
use ewitness::mdiew::{decompose_witness, mdiew_value, run_audit, tomographic_basis, AuditOptions, MdiewScenario};
use ewitness::witness::{
    certify_indecomposable, collect_zero_set, expectation, min_product_expectation, ZeroSetOptions,
};
use ewitness::{
    catalogue, sampling, seed, HermitianOperator, ProductVector, SeeSawOptions, SystemLayout, Witness, C64,
};
use nalgebra::DVector;
use rand::Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

#[rustfmt::skip]
const CHOI_LITERAL: [[f64; 9]; 9] = [
    [ 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0],
    [ 0.0, 0.0, 0.0, 0.0,  0.0, 0.0, 0.0, 0.0,  0.0],
    [ 0.0, 0.0, 1.0, 0.0,  0.0, 0.0, 0.0, 0.0,  0.0],
    [ 0.0, 0.0, 0.0, 1.0,  0.0, 0.0, 0.0, 0.0,  0.0],
    [-1.0, 0.0, 0.0, 0.0,  1.0, 0.0, 0.0, 0.0, -1.0],
    [ 0.0, 0.0, 0.0, 0.0,  0.0, 0.0, 0.0, 0.0,  0.0],
    [ 0.0, 0.0, 0.0, 0.0,  0.0, 0.0, 0.0, 0.0,  0.0],
    [ 0.0, 0.0, 0.0, 0.0,  0.0, 0.0, 0.0, 1.0,  0.0],
    [-1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0,  1.0],
];

fn choi_exactness() -> Check {
    let w = catalogue::choi();
    for (i, row) in CHOI_LITERAL.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            ensure(w.op.matrix()[(i, j)] == C64::new(x, 0.0), format!("entry ({i},{j}) differs"))?;
        }
    }
    let eig = w.op.eigh().map_err(e)?;
    let min = eig.min_value();
    ensure((min + 1.0).abs() <= 1e-10, format!("min eigenvalue {min}"))?;
    let v: DVector<C64> = eig.vectors.column(eig.values.len() - 1).into_owned();
    let overlap = (v.adjoint() * catalogue::psi_plus_vector(3))[(0, 0)].norm();
    ensure(overlap >= 1.0 - 1e-9, format!("overlap with Psi+ {overlap}"))?;
    let p01 = ProductVector::basis(&[3, 3], &[0, 1]).map_err(e)?.density(w.op.layout().clone()).map_err(e)?;
    let value = expectation(&w, &p01).map_err(e)?;
    ensure(value == 0.0, format!("<01|W|01> = {value}"))?;
    Ok(format!("min eigenvalue {min:.3e}, |<Psi+|v>| = {overlap:.12}"))
}

fn min_eig2(p: f64, q: C64, r: f64) -> f64 {
    0.5 * (p + r) - ((0.5 * (p - r)).powi(2) + q.norm_sqr()).sqrt()
}

fn inner_min(w: &HermitianOperator, theta: f64, phi: f64) -> f64 {
    let a = [C64::new((theta / 2.0).cos(), 0.0), C64::from_polar((theta / 2.0).sin(), phi)];
    let m = w.matrix();
    let mut b = [[C64::new(0.0, 0.0); 2]; 2];
    for (j, row) in b.iter_mut().enumerate() {
        for (k, entry) in row.iter_mut().enumerate() {
            for i in 0..2 {
                for l in 0..2 {
                    *entry += a[i].conj() * a[l] * m[(i * 2 + j, l * 2 + k)];
                }
            }
        }
    }
    min_eig2(b[0][0].re, b[0][1], b[1][1].re)
}

/// Bloch-sphere grid for the first qubit with the second minimized exactly,
/// refined by pattern search around the best grid points.
fn bloch_oracle(w: &HermitianOperator) -> f64 {
    let (nt, np) = (60, 120);
    let mut grid = Vec::new();
    for i in 0..=nt {
        for j in 0..np {
            let (t, p) = (std::f64::consts::PI * i as f64 / nt as f64, std::f64::consts::TAU * j as f64 / np as f64);
            grid.push((inner_min(w, t, p), t, p));
        }
    }
    grid.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best = f64::INFINITY;
    for &(mut v, mut t, mut p) in grid.iter().take(8) {
        let mut h = 0.05;
        while h > 1e-10 {
            let mut moved = false;
            for (dt, dp) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h), (h, h), (-h, -h), (h, -h), (-h, h)] {
                let c = inner_min(w, t + dt, p + dp);
                if c < v {
                    (v, t, p, moved) = (c, t + dt, p + dp, true);
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        best = best.min(v);
    }
    best
}

fn witness_certification() -> Check {
    let opts = SeeSawOptions::new(64, 42);
    let mut values = Vec::new();
    for w in [catalogue::choi(), catalogue::swap(2).map_err(e)?] {
        let v = min_product_expectation(&w, &opts).map_err(e)?.best_value;
        ensure((-1e-8..=1e-6).contains(&v), format!("{} min product {v:e}", w.provenance))?;
        values.push(v);
    }
    let mut rng = seed::rng(2024);
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let op = sampling::random_hermitian(SystemLayout::bipartite(2, 2).map_err(e)?, &mut rng).map_err(e)?;
        let oracle = bloch_oracle(&op);
        let got = min_product_expectation(&Witness::new(op, "random").map_err(e)?, &opts).map_err(e)?.best_value;
        worst = worst.max((got - oracle).abs());
        ensure((got - oracle).abs() <= 1e-6, format!("operator {k}: see-saw {got} oracle {oracle}"))?;
    }
    Ok(format!("choi {:.2e}, swap {:.2e}, max oracle gap {worst:.2e}", values[0], values[1]))
}

fn random_spec<R: Rng>(rng: &mut R) -> Result<ExtensionSpec, String> {
    let (dl, dr) = (rng.random_range(1..=3), rng.random_range(1..=3));
    ExtensionSpec::new(sampling::random_psd(dl, rng).map_err(e)?, sampling::random_psd(dr, rng).map_err(e)?).map_err(e)
}

fn extension_preserves_witnesses() -> Check {
    let ws = [catalogue::choi(), catalogue::swap(2).map_err(e)?, catalogue::swap(3).map_err(e)?];
    let mut rng = seed::rng(101);
    let mut min = f64::INFINITY;
    for k in 0..20 {
        let ext = extend_witness(&ws[k % ws.len()], &random_spec(&mut rng)?).map_err(e)?;
        let v = min_product_expectation(&ext, &SeeSawOptions::new(64, k as u64)).map_err(e)?.best_value;
        ensure(v >= -1e-8, format!("pair {k}: {v:e}"))?;
        min = min.min(v);
    }
    Ok(format!("20 pairs, smallest min product {min:.2e}"))
}

fn indecomposability_transfer() -> Check {
    let w = catalogue::choi();
    let rho = catalogue::choi_detected_ppt_state();
    let mut rng = seed::rng(202);
    for k in 0..10 {
        let (dl, dr) = (1 + k % 3, 1 + (k / 3) % 3);
        let caps = |rng: &mut _| -> Result<ExtensionSpec, String> {
            ExtensionSpec::new(sampling::random_psd(dl, rng).map_err(e)?, sampling::random_psd(dr, rng).map_err(e)?)
                .map_err(e)
        };
        let (wc, sc) = (caps(&mut rng)?, caps(&mut rng)?);
        let ew = extend_witness(&w, &wc).map_err(e)?;
        let er = extend_state(&rho, &sc, true).map_err(e)?;
        ensure(certify_indecomposable(&ew, &er, 1e-9).map_err(e)?, format!("cap choice {k} not certified"))?;
    }
    let mut worst = f64::INFINITY;
    for k in 0..200 {
        let base = if k % 2 == 0 {
            sampling::random_separable_with(&SystemLayout::bipartite(3, 3).map_err(e)?, 3, &mut rng)
                .map_err(e)?
                .density()
        } else {
            catalogue::horodecki_qutrit_state(rng.random_range(1.0..=4.0)).map_err(e)?
        };
        let ext = extend_state(&base, &random_spec(&mut rng)?, true).map_err(e)?;
        let min = ext.partial_transpose_right().map_err(e)?.min_eigenvalue().map_err(e)?;
        ensure(min >= -1e-9, format!("trial {k}: extended state has PT eigenvalue {min:e}"))?;
        worst = worst.min(min);
    }
    Ok(format!("10/10 certified; smallest extended PT eigenvalue {worst:.2e} over 200 trials"))
}

fn spanning_transfer() -> Check {
    let w = catalogue::swap(2).map_err(e)?;
    let zs = collect_zero_set(&w, &ZeroSetOptions::for_dim(4, 42)).map_err(e)?;
    ensure(zs.span_rank == 4, format!("swap zero-set rank {}", zs.span_rank))?;
    let gzs = collect_zero_set(&w.gamma().map_err(e)?, &ZeroSetOptions::for_dim(4, 43)).map_err(e)?;
    let mut rng = seed::rng(505);
    let mut ranks = Vec::new();
    for (dl, dr) in [(1, 2), (2, 2), (3, 2)] {
        let spec = ExtensionSpec::new(
            sampling::random_psd(dl, &mut rng).map_err(e)?,
            sampling::random_psd(dr, &mut rng).map_err(e)?,
        )
        .map_err(e)?;
        let ew = extend_witness(&w, &spec).map_err(e)?;
        let ext = extended_zero_set(&zs, dl, dr).map_err(e)?;
        ensure(ext.span_rank == 4 * dl * dr, format!("({dl},{dr}): rank {}", ext.span_rank))?;
        let gw = ew.gamma().map_err(e)?;
        let gext = extended_zero_set(&gzs, dl, dr).map_err(e)?;
        ensure(gext.span_rank == gzs.span_rank * dl * dr, format!("({dl},{dr}) gamma side: rank {}", gext.span_rank))?;
        for (op, set) in [(&ew.op, &ext), (&gw.op, &gext)] {
            for v in &set.vectors {
                let value = op.quadratic_form(&v.full_vector()).map_err(e)?;
                ensure(value.abs() <= 1e-10, format!("({dl},{dr}): zero evaluates to {value:e}"))?;
            }
        }
        ranks.push(format!("({dl},{dr})->{}", ext.span_rank));
    }
    Ok(format!("rank 4; extended {}; gamma side rank {} scales the same way", ranks.join(" "), gzs.span_rank))
}

fn extension_exhibit() -> Check {
    let ex = nontrivial_extension_exhibit().map_err(e)?;
    let v = ex.values;
    ensure(v.ext_value < -1e-6, format!("ext_value {}", v.ext_value))?;
    ensure(v.ext_closed_form < 0.0, "closed form is not negative")?;
    ensure(v.reduced_value.abs() <= 1e-10, format!("reduced_value {}", v.reduced_value))?;
    ensure(ex.rho_min_eigenvalue >= -1e-9, format!("state eigenvalue {}", ex.rho_min_eigenvalue))?;
    let mut rng = seed::rng(3);
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let (a, b) = (sampling::random_psd(2, &mut rng).map_err(e)?, sampling::random_psd(2, &mut rng).map_err(e)?);
        let params = AbParams::new(a.into_matrix(), b.into_matrix()).map_err(e)?;
        let cap = sampling::random_psd(2, &mut rng).map_err(e)?;
        let vals = theorem4_values(&params, &cap).map_err(e)?;
        let (ext_cf, red_cf) = closed_forms(&params, &cap).map_err(e)?;
        for (m, cf) in [(vals.ext_value, ext_cf), (vals.reduced_value, red_cf)] {
            if cf.abs() < 1e-6 {
                continue;
            }
            let rel = (m / cf - KAPPA).abs() / KAPPA;
            worst = worst.max(rel);
            ensure(rel <= 1e-9, format!("draw {k}: ratio {} vs {KAPPA}", m / cf))?;
        }
    }
    Ok(format!(
        "ext {:.6}, reduced {:.1e}, min eigenvalue {:.1e}; kappa {KAPPA:.6} to relative {worst:.1e}",
        v.ext_value, v.reduced_value, ex.rho_min_eigenvalue
    ))
}

fn mdiew_decomposition() -> Check {
    let mut parts = Vec::new();
    for w in [catalogue::choi(), catalogue::swap(2).map_err(e)?] {
        let (da, db) = w.party_dims();
        let dec =
            decompose_witness(&w, &tomographic_basis(da).map_err(e)?, &tomographic_basis(db).map_err(e)?).map_err(e)?;
        ensure(dec.residual <= 1e-9, format!("{} residual {:e}", w.provenance, dec.residual))?;
        ensure(dec.max_imag <= 1e-10, format!("{} imaginary part {:e}", w.provenance, dec.max_imag))?;
        parts.push(format!("{} residual {:.1e}", w.provenance, dec.residual));
    }
    Ok(parts.join(", "))
}

fn mdiew_ideal_identity() -> Check {
    let mut worst: f64 = 0.0;
    for w in [catalogue::choi(), catalogue::swap(2).map_err(e)?] {
        let (da, db) = w.party_dims();
        let scenario = MdiewScenario::ideal(w.clone()).map_err(e)?;
        let mut rng = seed::rng(9);
        for _ in 0..100 {
            let rho = sampling::random_density_on(SystemLayout::bipartite(da, db).map_err(e)?, &mut rng).map_err(e)?;
            let gap =
                (mdiew_value(&scenario, &rho).map_err(e)? - expectation(&w, &rho).map_err(e)? / (da * db) as f64).abs();
            worst = worst.max(gap);
            ensure(gap <= 1e-9, format!("{} gap {gap:e}", w.provenance))?;
        }
    }
    let scenario = MdiewScenario::ideal(catalogue::choi()).map_err(e)?;
    let v = mdiew_value(&scenario, &catalogue::psi_plus(3).map_err(e)?).map_err(e)?;
    ensure((v + 1.0 / 9.0).abs() <= 1e-9, format!("choi on Psi+ gives {v}"))?;
    Ok(format!("max gap {worst:.1e} over 200 states; choi on Psi+ {v:.12}"))
}

fn mdiew_separable_safety() -> Check {
    let mut parts = Vec::new();
    for w in [catalogue::choi(), catalogue::swap(2).map_err(e)?] {
        let name = w.provenance.clone();
        let scenario = MdiewScenario::ideal(w).map_err(e)?;
        let (report, outcomes) = run_audit(&scenario, &AuditOptions::default()).map_err(e)?;
        ensure(outcomes.len() == 1000, "trial count")?;
        ensure(report.min_direct >= -1e-9, format!("{name}: min value {:e}", report.min_direct))?;
        ensure(report.max_route_gap <= 1e-9, format!("{name}: route gap {:e}", report.max_route_gap))?;
        parts.push(format!("{name} min {:.3e} gap {:.1e}", report.min_direct, report.max_route_gap));
    }
    Ok(format!("1000 trials each: {}", parts.join("; ")))
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_ewitness")).args(args).arg("--quiet").output().map_err(e)?;
    ensure(out.status.success(), format!("{args:?} exited with {:?}", out.status.code()))?;
    Ok(out.stdout)
}

fn determinism() -> Check {
    let commands: [&[&str]; 6] = [
        &["certify", "@choi"],
        &["certify", "@swap"],
        &["extend", "@choi", "@choi-extension-spec"],
        &["choi-demo"],
        &["mdiew", "decompose", "@choi"],
        &["mdiew", "audit", "@swap", "--trials", "200"],
    ];
    for args in commands {
        let first = run_cli(args)?;
        ensure(first == run_cli(args)?, format!("{args:?} differs between runs"))?;
        let mut seq = args.to_vec();
        seq.push("--sequential");
        ensure(first == run_cli(&seq)?, format!("{args:?} differs when sequential"))?;
    }
    Ok(format!("{} commands byte-identical across repeats and threading", commands.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Choi exactness", choi_exactness),
        ("witness certification", witness_certification),
        ("extension preserves witnesses", extension_preserves_witnesses),
        ("indecomposability transfer", indecomposability_transfer),
        ("spanning transfer", spanning_transfer),
        ("nontrivial extension exhibit", extension_exhibit),
        ("MDIEW decomposition", mdiew_decomposition),
        ("MDIEW ideal identity", mdiew_ideal_identity),
        ("MDIEW separable safety", mdiew_separable_safety),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
