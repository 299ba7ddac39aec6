//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits nonzero if any criterion fails.

mod common;

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use cocircular::oracle::{brute_minimize, finite_difference_gradient, GridSpec};
use cocircular::scanner::monotonicity;
use cocircular::{
    alpha_star, build_matrices, chord_matrix, circulant_spectrum, exclusion_by_group, f_k_value, g_value,
    grad_mass_f_k, grad_theta_f_k, hessian_theta_f_k, minimize_f_k, regular_ngon, scan_region, taylor_identity_check,
    verify_cc, AngleConfiguration, AuxiliaryFunctional, MassVector, Witness,
};
use common::{max_abs, max_abs_diff, random_config, random_masses, rng, same_total};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_secs: f64) -> Result<(), String> {
    check(
        elapsed.as_secs_f64() < limit_secs,
        format!("took {:.2} s, limit {limit_secs} s", elapsed.as_secs_f64()),
    )
}

fn newtonian_region() -> Outcome {
    let start = Instant::now();
    let cells = scan_region(3, 20, &[1.0]).map_err(|e| e.to_string())?;
    let holding: Vec<usize> = cells.iter().filter(|c| c.holds).map(|c| c.n).collect();
    check(holding == vec![3, 4, 5, 6], format!("holds for {holding:?}"))?;
    let g6 = g_value(6, 1.0).map_err(|e| e.to_string())?;
    let exact = 5.0 / 6.0 + 2.0 * 3f64.sqrt() / 9.0;
    check((g6 - exact).abs() <= 1e-12, format!("g(6,1) = {g6}, expected {exact}"))?;
    within(start.elapsed(), 1.0)?;
    Ok(format!(
        "holds for n = 3..6 only; |g(6,1) - exact| = {:.1e}",
        (g6 - exact).abs()
    ))
}

fn equal_mass_uniqueness() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(2);
    let mut worst_angle: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    let mut runs = 0;
    for &alpha in &[0.5, 1.0, 2.0] {
        let aux = AuxiliaryFunctional::with_default_k(alpha).unwrap();
        for n in 3..=12 {
            let masses = MassVector::equal(n).unwrap();
            let ngon = regular_ngon(n).unwrap();
            let mut inits: Vec<Option<AngleConfiguration>> = vec![None];
            for _ in 0..3 {
                inits.push(Some(random_config(&mut rng, n, 0.05)));
            }
            for init in &inits {
                let res = minimize_f_k(&aux, &masses, init.as_ref()).map_err(|e| format!("n={n} α={alpha}: {e}"))?;
                check(res.converged, format!("n={n} α={alpha}: not converged"))?;
                let d = max_abs_diff(res.theta_m.as_slice(), ngon.as_slice());
                worst_angle = worst_angle.max(d);
                check(d <= 1e-9, format!("n={n} α={alpha}: angle error {d:e}"))?;
                let rep = verify_cc(alpha, &masses, &res.theta_m, 1e-9).unwrap();
                let r = rep.tangential_residual.max(rep.radial_spread).max(rep.center_norm);
                worst_residual = worst_residual.max(r);
                check(rep.is_cc && r < 1e-9, format!("n={n} α={alpha}: verify_cc {rep:?}"))?;
                runs += 1;
            }
        }
    }
    within(start.elapsed(), 5.0)?;
    Ok(format!(
        "{runs} runs; max angle error {worst_angle:.1e}, max residual {worst_residual:.1e}"
    ))
}

fn one_heavy_exclusion() -> Outcome {
    let start = Instant::now();
    let aux = AuxiliaryFunctional::with_default_k(1.0).unwrap();
    let mut witnesses = Vec::new();
    for n in 4..=8 {
        let mut m = vec![1.0; n];
        m[n - 1] = 2.0;
        let masses = MassVector::new(m).unwrap();
        let out = exclusion_by_group(&aux, &masses).map_err(|e| e.to_string())?;
        check(out.verdict.excluded, format!("n={n}: not excluded"))?;
        let element = match out.verdict.witness {
            Some(Witness::Group { element }) => element,
            other => return Err(format!("n={n}: witness {other:?}")),
        };
        check(element.is_rotation(), format!("n={n}: witness {element} is not cyclic"))?;
        let rep = verify_cc(1.0, &masses, &out.minimum.theta_m, 1e-9).unwrap();
        check(!rep.is_cc, format!("n={n}: verify_cc accepted θ_m"))?;
        witnesses.push(element.to_string());
    }
    within(start.elapsed(), 10.0)?;
    Ok(format!("witnesses {}", witnesses.join(", ")))
}

fn two_heavy_exclusion() -> Outcome {
    let start = Instant::now();
    let aux = AuxiliaryFunctional::with_default_k(1.0).unwrap();
    let mut witnesses = Vec::new();
    for n in [5usize, 7] {
        let mut m = vec![1.0; n];
        m[2] = 2.0;
        m[n - 1] = 2.0;
        let masses = MassVector::new(m).unwrap();
        let out = exclusion_by_group(&aux, &masses).map_err(|e| e.to_string())?;
        check(out.verdict.excluded, format!("n={n}: not excluded"))?;
        let element = match out.verdict.witness {
            Some(Witness::Group { element }) => element,
            other => return Err(format!("n={n}: witness {other:?}")),
        };
        check(
            !element.is_rotation(),
            format!("n={n}: witness {element} is not a reflection"),
        )?;
        witnesses.push(element.to_string());
    }
    within(start.elapsed(), 10.0)?;
    Ok(format!("witnesses {}", witnesses.join(", ")))
}

fn rel_err(analytic: &[f64], numeric: &[f64]) -> f64 {
    max_abs_diff(analytic, numeric) / max_abs(analytic).max(1.0)
}

fn derivatives() -> Outcome {
    let mut rng = rng(5);
    let alphas = [0.5, 1.0, 1.5, 2.0, 3.0];
    let (mut worst_g, mut worst_m, mut worst_h): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let instances = 120;
    for i in 0..instances {
        let n = 3 + i % 6;
        let alpha = alphas[i % alphas.len()];
        let aux = AuxiliaryFunctional::with_default_k(alpha).unwrap();
        let masses = random_masses(&mut rng, n);
        let config = random_config(&mut rng, n, 0.2);
        let theta = config.to_vec();
        let m = masses.to_vec();

        let f_theta = |x: &[f64]| f_k_value(&aux, &masses, &shifted(x)).unwrap();
        let g = grad_theta_f_k(&aux, &masses, &config).unwrap();
        let fd = finite_difference_gradient(f_theta, &theta, 1e-6);
        worst_g = worst_g.max(rel_err(g.as_slice(), &fd));

        let f_mass = |x: &[f64]| f_k_value(&aux, &MassVector::new(x.to_vec()).unwrap(), &config).unwrap();
        let gm = grad_mass_f_k(&aux, &masses, &config).unwrap();
        let fdm = finite_difference_gradient(f_mass, &m, 1e-6);
        worst_m = worst_m.max(rel_err(gm.as_slice(), &fdm));

        let h = hessian_theta_f_k(&aux, &masses, &config).unwrap();
        let scale = h.amax().max(1.0);
        for k in 0..n {
            let col = finite_difference_gradient(
                |x: &[f64]| grad_theta_f_k(&aux, &masses, &shifted(x)).unwrap()[k],
                &theta,
                1e-5,
            );
            let row: Vec<f64> = h.row(k).iter().copied().collect();
            worst_h = worst_h.max(max_abs_diff(&row, &col) / scale);
        }
        let second = second_difference_diagonal(&f_theta, &theta, 1e-4);
        let diag: Vec<f64> = h.diagonal().iter().copied().collect();
        worst_h = worst_h.max(max_abs_diff(&diag, &second) / scale);
    }
    check(worst_g <= 1e-6, format!("grad_theta rel err {worst_g:e}"))?;
    check(worst_m <= 1e-6, format!("grad_mass rel err {worst_m:e}"))?;
    check(worst_h <= 1e-5, format!("hessian rel err {worst_h:e}"))?;
    Ok(format!(
        "{instances} instances; rel err θ {worst_g:.1e}, m {worst_m:.1e}, H {worst_h:.1e}"
    ))
}

/// Probe points may leave `(0, 2π]`; the functional only sees differences,
/// so slide them back so the last angle is `2π`.
fn shifted(x: &[f64]) -> AngleConfiguration {
    let c = TAU - x[x.len() - 1];
    AngleConfiguration::new(x.iter().map(|t| t + c).collect()).unwrap()
}

/// `(f(x + h e_k) − 2 f(x) + f(x − h e_k)) / h²` for each `k`.
fn second_difference_diagonal(f: &impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let f0 = f(x);
    let mut y = x.to_vec();
    (0..x.len())
        .map(|k| {
            y[k] = x[k] + h;
            let plus = f(&y);
            y[k] = x[k] - h;
            let minus = f(&y);
            y[k] = x[k];
            (plus - 2.0 * f0 + minus) / (h * h)
        })
        .collect()
}

fn hessian_spectrum() -> Outcome {
    let mut rng = rng(6);
    let mut worst_min: f64 = f64::INFINITY;
    let mut worst_cos: f64 = 1.0;
    for i in 0..50 {
        let n = rng.gen_range(3..=9);
        let alpha = [0.5, 1.0, 2.0, 3.0][i % 4];
        let aux = AuxiliaryFunctional::with_default_k(alpha).unwrap();
        let masses = random_masses(&mut rng, n);
        let config = random_config(&mut rng, n, 0.1);
        let h = hessian_theta_f_k(&aux, &masses, &config).unwrap();
        let norm = h.norm();
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let lo = eig.eigenvalues[order[0]];
        let next = eig.eigenvalues[order[1]];
        worst_min = worst_min.min(lo / norm);
        check(
            lo >= -1e-10 * norm,
            format!("case {i}: min eigenvalue {lo:e}, norm {norm:e}"),
        )?;
        check(
            next > 1e-8 * norm,
            format!("case {i}: kernel not one-dimensional, λ₂ = {next:e}"),
        )?;
        let v = eig.eigenvectors.column(order[0]);
        let cos = v.iter().sum::<f64>().abs() / (n as f64).sqrt() / v.norm();
        worst_cos = worst_cos.min(cos);
        check(cos >= 1.0 - 1e-8, format!("case {i}: kernel cosine {cos}"))?;
    }
    Ok(format!(
        "50 configurations; min λ/‖H‖ {worst_min:.1e}, min kernel cosine 1 - {:.1e}",
        1.0 - worst_cos
    ))
}

fn taylor_identity() -> Outcome {
    let mut rng = rng(7);
    let aux = AuxiliaryFunctional::with_default_k(1.0).unwrap();
    let mut worst: f64 = 0.0;
    for n in 3..=8 {
        let masses = MassVector::equal(n).unwrap();
        let ngon = regular_ngon(n).unwrap();
        let f = f_k_value(&aux, &masses, &ngon).unwrap().abs();
        for _ in 0..20 {
            let y = same_total(&mut rng, &masses);
            let r = taylor_identity_check(&aux, &masses, &ngon, &y).map_err(|e| e.to_string())?;
            worst = worst.max(r / f);
            check(r <= 1e-10 * f, format!("n={n}: residual {r:e} vs |f_K| {f}"))?;
        }
    }
    Ok(format!("120 samples; max residual/|f_K| {worst:.1e}"))
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn circulant() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut psd_cells = 0;
    for &alpha in &[0.5, 1.0, 2.0] {
        let aux = AuxiliaryFunctional::with_default_k(alpha).unwrap();
        for n in 3..=16 {
            let spectrum = circulant_spectrum(&aux, n).map_err(|e| e.to_string())?;
            // dense H_{α,1} built straight from the chord lengths
            let chords = chord_matrix(&regular_ngon(n).unwrap());
            let dense = DMatrix::from_fn(n, n, |j, k| {
                if j == k {
                    0.0
                } else {
                    let r = chords.get(j, k);
                    r.powf(-alpha) + r * r / aux.k()
                }
            });
            let dense_eigs = sorted(SymmetricEigen::new(dense.clone()).eigenvalues.iter().copied().collect());
            let d = max_abs_diff(&sorted(spectrum.eigenvalues.clone()), &dense_eigs);
            worst = worst.max(d);
            check(d <= 1e-10, format!("n={n} α={alpha}: eigenvalue mismatch {d:e}"))?;

            if spectrum.u_ratio <= spectrum.threshold {
                psd_cells += 1;
                check(
                    spectrum.criterion_psd_single_kernel(1e-10),
                    format!("n={n} α={alpha}: criterion matrix not PSD with one zero"),
                )?;
                let (_, crit) =
                    build_matrices(&aux, &MassVector::equal(n).unwrap(), &regular_ngon(n).unwrap()).unwrap();
                let e = sorted(
                    SymmetricEigen::new(crit.as_matrix().clone())
                        .eigenvalues
                        .iter()
                        .copied()
                        .collect(),
                );
                let scale = max_abs(&e);
                check(
                    e[0].abs() <= 1e-10 * scale && e[1] > 1e-10 * scale,
                    format!("n={n} α={alpha}: dense criterion spectrum {e:?}"),
                )?;
            }
        }
    }
    Ok(format!(
        "42 cells, max eigenvalue gap {worst:.1e}; {psd_cells} cells under the threshold are PSD with one zero"
    ))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(9);
    let aux = AuxiliaryFunctional::with_default_k(1.0).unwrap();
    let mut worst: f64 = 0.0;
    for n in 3..=5 {
        for _ in 0..10 {
            let masses = random_masses(&mut rng, n);
            let newton = minimize_f_k(&aux, &masses, None).map_err(|e| e.to_string())?;
            let brute = brute_minimize(&aux, &masses, GridSpec::default()).map_err(|e| e.to_string())?;
            let d = max_abs_diff(newton.theta_m.as_slice(), brute.as_slice());
            worst = worst.max(d);
            check(
                d <= 1e-4,
                format!("n={n} masses {:?}: angle gap {d:e}", masses.as_slice()),
            )?;
        }
    }
    within(start.elapsed(), 60.0)?;
    Ok(format!("30 mass vectors; max angle gap {worst:.1e}"))
}

fn critical_exponents() -> Outcome {
    let six = alpha_star(6, 1e-12).map_err(|e| e.to_string())?;
    let seven = alpha_star(7, 1e-12).map_err(|e| e.to_string())?;
    check(six.alpha > 1.0 && six.residual <= 1e-12, format!("{six:?}"))?;
    check(seven.alpha < 1.0 && seven.residual <= 1e-12, format!("{seven:?}"))?;
    let alphas: Vec<f64> = (1..=32).map(|i| i as f64 * 0.125).collect();
    let cells = scan_region(3, 40, &alphas).map_err(|e| e.to_string())?;
    let mono = monotonicity(&cells);
    check(
        mono.increasing_in_n && mono.increasing_in_alpha && mono.holds_downward_closed,
        format!("{:?}", mono.violations),
    )?;
    Ok(format!(
        "α*(6) = {:.12}, α*(7) = {:.12}; g monotone over {} cells",
        six.alpha,
        seven.alpha,
        cells.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("newtonian region n = 3..20", newtonian_region),
        ("equal-mass minimizer is the regular polygon", equal_mass_uniqueness),
        ("one heavy mass excluded by rotation", one_heavy_exclusion),
        ("two heavy masses, odd n, excluded by reflection", two_heavy_exclusion),
        ("analytic derivatives vs finite differences", derivatives),
        ("angle Hessian PSD with kernel along ones", hessian_spectrum),
        ("second-order mass expansion at the polygon", taylor_identity),
        ("circulant spectrum vs dense eigensolver", circulant),
        ("grid oracle agrees with Newton", oracle_equivalence),
        ("critical exponents and monotonicity", critical_exponents),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.2} s): {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.2} s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
