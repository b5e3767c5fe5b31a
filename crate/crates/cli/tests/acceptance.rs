use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use edm_pareto::approximation::approx_error;
use edm_pareto::families::{
    bessel_rw_family, gamma_family, harmonic_poisson_family, sample_ln_streams, EdmModel, THETA_MAX,
};
use edm_pareto::levy::{estimate_ell, scale, TailFunction};
use edm_pareto::limits::{
    density_u_cdf, density_u_cdf_tabulated, density_u_table, eas_value, ks_against_pareto, lt_limit_curve,
    transform_ln_sample, ParetoLaw,
};
use edm_pareto::quadrature::{log_from_zero, QuadConfig};
use edm_pareto::real::ln_add_exp;
use edm_pareto::special_fn::{bessel_i, confluent_half, confluent_half_integral, confluent_half_series};

/// Writes the verdict straight to the stderr handle so it shows without
/// `--nocapture`, then fails the test if the criterion failed.
fn verdict(n: u32, title: &str, failures: Vec<String>, detail: String) {
    let line = if failures.is_empty() {
        format!("acceptance {n:>2} PASS  {title}: {detail}\n")
    } else {
        format!("acceptance {n:>2} FAIL  {title}: {}\n", failures.join("; "))
    };
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(failures.is_empty(), "{}", line.trim_end());
}

fn within(limit: Duration, started: Instant, failures: &mut Vec<String>) -> Duration {
    let took = started.elapsed();
    if took > limit {
        failures.push(format!("took {took:.2?}, limit {limit:?}"));
    }
    took
}

#[test]
fn criterion_01_gamma_laplace_limit() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let u = [1.5, 2.0, 4.0];
    let curve = lt_limit_curve(&gamma_family::<f64>(), 0.0, &u, &[1e-3]).unwrap();
    let mut worst = 0f64;
    for (i, &ui) in u.iter().enumerate() {
        let ln_theta = ui.ln() / 1e-3;
        let oracle = (-1e-3 * (ln_theta + (-ln_theta).exp().ln_1p())).exp();
        let err = (curve.value(0, i) - 1.0 / ui).abs();
        worst = worst.max(err);
        if err >= 1e-4 {
            failures.push(format!("u={ui}: error {err:e}"));
        }
        if (curve.value(0, i) - oracle).abs() > 1e-14 {
            failures.push(format!("u={ui}: {} differs from closed form {oracle}", curve.value(0, i)));
        }
    }
    let took = within(Duration::from_secs(1), start, &mut failures);
    verdict(1, "Laplace limit, gamma, t=1e-3", failures, format!("max |value-1/u| = {worst:.2e} in {took:.2?}"));
}

#[test]
fn criterion_02_quadrature_family_laplace_limit() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let u = [1.5, 2.0, 4.0];
    let mut worst = 0f64;
    let mut spread = 0f64;
    for fam in [harmonic_poisson_family::<f64>(), bessel_rw_family()] {
        let curves: Vec<_> = [0.0, 1.0]
            .iter()
            .map(|&th| lt_limit_curve(&fam, th, &u, &[1e-3]).unwrap())
            .collect();
        for c in &curves {
            for (i, &ui) in u.iter().enumerate() {
                let cell = &c.cells[0][i];
                let err = (cell.value - 1.0 / ui).abs();
                worst = worst.max(err);
                if !(err < 0.02) {
                    failures.push(format!("{} θ₀={} u={ui}: error {err}", c.family, c.theta0));
                }
                let shift = ui.ln() / 1e-3;
                let ln_theta = if c.theta0 > 0.0 { ln_add_exp(c.theta0.ln(), shift) } else { shift };
                let needs_flag = !fam.cumulant().has_log_form() && ln_theta > THETA_MAX.ln();
                if cell.extrapolated != needs_flag {
                    failures.push(format!("{} θ₀={} u={ui}: extrapolation flag {}", c.family, c.theta0, cell.extrapolated));
                }
            }
        }
        for i in 0..u.len() {
            let d = (curves[0].value(0, i) - curves[1].value(0, i)).abs();
            spread = spread.max(d);
            if !(d < 0.02) {
                failures.push(format!("{} u={}: θ₀ dependence {d}", fam.name(), u[i]));
            }
        }
    }
    let took = within(Duration::from_secs(60), start, &mut failures);
    verdict(
        2,
        "Laplace limit, harmonic and bessel, t=1e-3",
        failures,
        format!("max |value-1/u| = {worst:.2e}, max θ₀ spread = {spread:.2e} in {took:.2?}"),
    );
}

#[test]
fn criterion_03_ks_convergence() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let law = ParetoLaw::new(1.0).unwrap();
    let seed = 2024;
    let ks: Vec<f64> = [0.5, 0.2, 0.1, 0.05, 0.02]
        .iter()
        .map(|&t| {
            let model = EdmModel::new(gamma_family::<f64>(), 0.0, t).unwrap();
            let u = transform_ln_sample(&sample_ln_streams(&model, 100_000, seed).unwrap(), t).unwrap();
            ks_against_pareto(&u, &law, t, seed).unwrap().ks
        })
        .collect();
    if !ks.windows(2).all(|w| w[0] > w[1]) {
        failures.push(format!("not strictly decreasing: {ks:?}"));
    }
    if !(ks[4] < 0.03) {
        failures.push(format!("ks(0.02) = {}", ks[4]));
    }
    let took = within(Duration::from_secs(30), start, &mut failures);
    let listed: Vec<String> = ks.iter().map(|k| format!("{k:.4}")).collect();
    verdict(3, "KS convergence, gamma, n=1e5", failures, format!("ks = [{}] in {took:.2?}", listed.join(", ")));
}

#[test]
fn criterion_04_ell_estimation() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut fits = Vec::new();
    for fam in [gamma_family::<f64>(), harmonic_poisson_family(), bessel_rw_family()] {
        for &c in &[1.0, 0.5, 2.0] {
            let tail = if c == 1.0 {
                TailFunction::from_measure(fam.levy())
            } else {
                TailFunction::from_measure(&scale(fam.levy(), c).unwrap())
            };
            match estimate_ell(&tail) {
                Ok(fit) => {
                    fits.push(format!("{}×{c}: {:.4}", fam.name(), fit.ell));
                    if !((fit.ell - c).abs() <= 0.1 * c) {
                        failures.push(format!("{} c={c}: ℓ = {}", fam.name(), fit.ell));
                    }
                }
                Err(e) => failures.push(format!("{} c={c}: {e}", fam.name())),
            }
        }
    }
    let took = within(Duration::from_secs(10), start, &mut failures);
    verdict(4, "slow-log index estimation", failures, format!("{} in {took:.2?}", fits.join(", ")));
}

fn km_convolution(x: f64) -> f64 {
    let cfg = QuadConfig::default();
    let pi = std::f64::consts::PI;
    let near_zero = |y: f64| (-2.0 * y).exp() / (pi * (y * (x - y)).sqrt());
    let near_x = |z: f64| (-2.0 * (x - z)).exp() / (pi * (z * (x - z)).sqrt());
    log_from_zero(&near_zero, x / 2.0, &cfg).unwrap().value + log_from_zero(&near_x, x / 2.0, &cfg).unwrap().value
}

#[test]
fn criterion_05_bessel_levy_density_identities() {
    let mut failures = Vec::new();
    let mut worst_conv = 0f64;
    for &x in &[0.1, 1.0, 5.0] {
        let conv = km_convolution(x);
        let direct = confluent_half_integral(x).unwrap();
        let rel = ((conv - direct) / direct).abs();
        worst_conv = worst_conv.max(rel);
        if !(rel < 1e-6) {
            failures.push(format!("convolution at x={x}: relative error {rel:e}"));
        }
    }
    let k = bessel_rw_family::<f64>().cumulant().clone();
    let mut worst_fd = 0f64;
    for &theta in &[0.5, 1.0, 2.0, 5.0] {
        let h = 1e-5 * theta;
        let fd = (k.eval(theta + h).unwrap() - k.eval(theta - h).unwrap()) / (2.0 * h);
        let exact = -1.0 / (theta * (theta + 2.0)).sqrt();
        let rel = ((fd - exact) / exact).abs();
        worst_fd = worst_fd.max(rel);
        if !(rel < 1e-6) {
            failures.push(format!("k' at θ={theta}: relative error {rel:e}"));
        }
    }
    verdict(
        5,
        "confluent Lévy density and k' factorisation",
        failures,
        format!("convolution rel err {worst_conv:.1e}, k' rel err {worst_fd:.1e}"),
    );
}

#[test]
fn criterion_06_special_functions() {
    let mut failures = Vec::new();
    let mut rec = 0f64;
    for &nu in &[1.0f64, 2.0, 3.0] {
        for &x in &[0.5, 1.0, 5.0, 20.0] {
            let lhs = bessel_i(nu - 1.0, x).unwrap() - bessel_i(nu + 1.0, x).unwrap();
            let rhs = 2.0 * nu / x * bessel_i(nu, x).unwrap();
            rec = rec.max(((lhs - rhs) / rhs).abs());
        }
    }
    if !(rec < 1e-8) {
        failures.push(format!("recurrence residual {rec:e}"));
    }
    let mut overlap = 0f64;
    for i in 0..=50 {
        let x = 10.0 + 0.2 * i as f64;
        overlap = overlap.max((confluent_half_series(x).unwrap() - confluent_half_integral(x).unwrap()).abs());
    }
    if !(overlap < 1e-9) {
        failures.push(format!("series/integral overlap {overlap:e}"));
    }
    let mut half = 0f64;
    for &x in &[0.1f64, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0] {
        let closed = (2.0 / (std::f64::consts::PI * x)).sqrt() * x.sinh();
        half = half.max(((bessel_i(0.5, x).unwrap() - closed) / closed).abs());
    }
    if !(half < 1e-10) {
        failures.push(format!("half-integer closed form {half:e}"));
    }
    if confluent_half(0.0).unwrap() != 1.0 {
        failures.push("confluent(0) != 1".into());
    }
    verdict(
        6,
        "special functions",
        failures,
        format!("recurrence {rec:.1e}, overlap {overlap:.1e}, half-integer {half:.1e}"),
    );
}

#[test]
fn criterion_07_log_integral_asymptote() {
    let mut failures = Vec::new();
    let values: Vec<f64> = [0.5, 1.0, 2.0].iter().map(|&eta| eas_value(eta, 1e8).unwrap()).collect();
    let at_one = values[1];
    if !((at_one + 1.0).abs() <= 0.02) {
        failures.push(format!("η=1, θ=1e8 gives {at_one:.6}, {:.2}% from -1", 100.0 * (at_one + 1.0).abs()));
    }
    let spread = values.iter().map(|v| ((v - at_one) / at_one).abs()).fold(0.0, f64::max);
    if !(spread <= 0.02) {
        failures.push(format!("η spread {spread:e}"));
    }
    verdict(7, "log-integral asymptote at θ=1e8", failures, format!("value {at_one:.6}, η spread {spread:.1e}"));
}

#[test]
fn criterion_08_density_of_u() {
    let mut failures = Vec::new();
    let mut worst_norm = 0f64;
    for &t in &[1.0, 0.5, 0.1] {
        let mass: f64 = density_u_cdf(t, 1.0, f64::MAX.sqrt()).unwrap();
        worst_norm = worst_norm.max((mass - 1.0).abs());
        if !((mass - 1.0).abs() <= 1e-5) {
            failures.push(format!("t={t}: mass {mass}"));
        }
    }
    let table = density_u_table(1.0, 1.0).unwrap();
    let mut worst_path = 0f64;
    for &u0 in &[0.5, 2.0] {
        let d = (density_u_cdf(1.0f64, 1.0, u0).unwrap() - density_u_cdf_tabulated(&table, 1.0, u0).unwrap()).abs();
        worst_path = worst_path.max(d);
        if !(d <= 1e-6) {
            failures.push(format!("u₀={u0}: two paths differ by {d:e}"));
        }
    }
    let sup = |t: f64| {
        let table = density_u_table(t, 1.0).unwrap();
        (0..=190)
            .map(|i| 1.0 + i as f64 / 10.0)
            .map(|u| (density_u_cdf_tabulated(&table, t, u).unwrap() - (1.0 - 1.0 / u)).abs())
            .fold(0.0, f64::max)
    };
    let sups = [sup(1.0), sup(0.5), sup(0.1)];
    if !(sups[0] > sups[1] && sups[1] > sups[2]) {
        failures.push(format!("sup distances not decreasing: {sups:?}"));
    }
    let cfg = edm_pareto_cli::RunConfig::from_command(
        <edm_pareto_cli::Cli as clap::Parser>::parse_from(["edm-pareto", "density", "--family", "bessel", "--t-grid", "0.5", "--u-grid", "2"]).command,
    )
    .unwrap();
    let doc = edm_pareto_cli::commands::run(&cfg).unwrap();
    if !doc.notes.iter().any(|(k, _)| k == "printed_formula") || !doc.columns.iter().any(|c| c == "printed_formula") {
        failures.push("density output does not carry the printed-formula comparison".into());
    }
    verdict(
        8,
        "density of U",
        failures,
        format!(
            "mass error {worst_norm:.1e}, two-path {worst_path:.1e}, sup distance t=1,0.5,0.1: {:.4}, {:.4}, {:.4}",
            sups[0], sups[1], sups[2]
        ),
    );
}

#[test]
fn criterion_09_approximation_error() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let errors: Vec<f64> = [0.5, 0.1, 0.05, 0.01]
        .iter()
        .map(|&t| approx_error(&gamma_family::<f64>(), 0.0, t, 0, 0).unwrap().sup_cdf_error)
        .collect();
    if !errors.windows(2).all(|w| w[0] > w[1]) {
        failures.push(format!("not decreasing: {errors:?}"));
    }
    if !(errors[3] < 0.01) {
        failures.push(format!("error at t=0.01 is {}", errors[3]));
    }
    let took = within(Duration::from_secs(5), start, &mut failures);
    let listed: Vec<String> = errors.iter().map(|e| format!("{e:.4}")).collect();
    verdict(9, "Pareto approximation of the gamma CDF", failures, format!("sup error [{}] in {took:.2?}", listed.join(", ")));
}

fn run_cli(args: &[&str], out: &Path) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_edm-pareto"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!("{:?} exited with {}: {}", args, status.status, String::from_utf8_lossy(&status.stderr)));
    }
    std::fs::read(out).map_err(|e| e.to_string())
}

#[test]
fn criterion_10_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("measure.spec");
    std::fs::write(&spec, "name = tilted-gamma\ndensity_expr = exp(-2*x)/x\ncumulant_expr = -log(1 + theta/2)\n").unwrap();
    let atoms = dir.path().join("atoms.spec");
    std::fs::write(&atoms, "atoms_rule = 1/n ; 1/n ; 200000\n").unwrap();
    let user = format!("user:{}", spec.display());
    let user_atoms = format!("user:{}", atoms.display());
    let runs: Vec<Vec<&str>> = vec![
        vec!["limit-table", "--family", "harmonic", "--theta0", "1"],
        vec!["limit-table", "--family", &user, "--t-grid", "0.001,0.1", "--format", "json"],
        vec!["ks", "--family", "bessel", "--samples", "20000", "--seed", "5"],
        vec!["ks", "--family", &user_atoms, "--samples", "5000", "--t-grid", "2,4"],
        vec!["estimate-ell", "--family", "gamma", "--ell-scale", "2"],
        vec!["estimate-ell", "--family", &user, "--theta0", "0.5", "--format", "json"],
        vec!["sample", "--family", "harmonic", "--samples", "3000", "--seed", "11"],
        vec!["sample", "--family", "bessel", "--samples", "500", "--t-grid", "0.05,1", "--format", "json"],
        vec!["density", "--family", "bessel", "--t-grid", "0.1,1"],
        vec!["density", "--family", "gamma", "--theta0", "1", "--format", "json"],
        vec!["approx-error", "--family", "gamma", "--theta0", "1"],
        vec!["approx-error", "--family", "harmonic", "--samples", "20000", "--t-grid", "0.01,0.1", "--seed", "3"],
    ];
    let mut failures = Vec::new();
    let mut bytes = 0;
    for (i, args) in runs.iter().enumerate() {
        let a = run_cli(args, &dir.path().join(format!("{i}a.out")));
        let b = run_cli(args, &dir.path().join(format!("{i}b.out")));
        match (a, b) {
            (Ok(a), Ok(b)) => {
                bytes += a.len();
                let text = String::from_utf8_lossy(&a);
                if a != b {
                    failures.push(format!("{args:?}: outputs differ"));
                }
                let seed_shown = text.contains("# seed: ") || text.contains("\"seed\": ");
                let version_shown = text.contains(env!("CARGO_PKG_VERSION"));
                if !seed_shown || !version_shown || !text.contains("family") {
                    failures.push(format!("{args:?}: missing version, seed or config echo"));
                }
            }
            (Err(e), _) | (_, Err(e)) => failures.push(e),
        }
    }
    verdict(
        10,
        "CLI determinism",
        failures,
        format!("{} commands run twice, {bytes} bytes compared", runs.len()),
    );
}

/// Not a criterion: the process contract for bad input.
#[test]
fn cli_errors_are_single_machine_readable_lines() {
    let dir = tempfile::tempdir().unwrap();
    let atoms = dir.path().join("atoms.spec");
    std::fs::write(&atoms, "atoms_rule = 1/n ; 1/n ; 200000\n").unwrap();
    let user_atoms = format!("user:{}", atoms.display());
    let cases: [(&[&str], i32); 5] = [
        (&["ks", "--family", &user_atoms, "--t-grid", "0.1", "--samples", "1000"], 3),
        (&["ks", "--t-grid", "0.5,0.1"], 2),
        (&["frobnicate"], 2),
        (&["ks", "--family", "user:/nonexistent/spec"], 2),
        (&["density", "--family", "harmonic"], 3),
    ];
    for (args, code) in cases {
        let out = Command::new(env!("CARGO_BIN_EXE_edm-pareto")).args(args).output().unwrap();
        assert_eq!(out.status.code(), Some(code), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{err}");
        let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["exit_code"], code);
        assert!(out.stdout.is_empty());
    }
}
