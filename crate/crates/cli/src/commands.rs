//! One function per subcommand, each building a [`Document`].

use edm_pareto::approximation::approx_error;
use edm_pareto::families::{
    bessel_rw_family, edm_ln_density, gamma_family, harmonic_poisson_family, sample_ln_streams, EdmModel, Family,
    FamilyKind,
};
use edm_pareto::levy::{estimate_ell, log_asymptote, tilt, TailFunction};
use edm_pareto::limits::{
    density_u, ks_against_pareto, lt_limit_curve, printed_density_u, transform_ln_sample, ParetoLaw,
};

use crate::config::{CommandKind, FamilyChoice, RunConfig};
use crate::error::CliError;
use crate::levy_spec::LevySpec;
use crate::output::{Cell, Document};

pub fn build_family(cfg: &RunConfig) -> Result<Family<f64>, CliError> {
    let base = match &cfg.family {
        FamilyChoice::Gamma => gamma_family(),
        FamilyChoice::Harmonic => harmonic_poisson_family(),
        FamilyChoice::Bessel => bessel_rw_family(),
        FamilyChoice::User(path) => LevySpec::read(path).map_err(CliError::Config)?.family()?,
    };
    if cfg.ell_scale == 1.0 {
        Ok(base)
    } else {
        Ok(base.scaled(cfg.ell_scale)?)
    }
}

pub fn run(cfg: &RunConfig) -> Result<Document, CliError> {
    let family = build_family(cfg)?;
    let mut doc = match cfg.command {
        CommandKind::LimitTable => limit_table(cfg, &family)?,
        CommandKind::Ks => ks(cfg, &family)?,
        CommandKind::EstimateEll => estimate(cfg, &family)?,
        CommandKind::Sample => sample(cfg, &family)?,
        CommandKind::Density => density(cfg, &family)?,
        CommandKind::ApproxError => approx(cfg, &family)?,
    };
    if let FamilyChoice::User(path) = &cfg.family {
        let spec = LevySpec::read(path).map_err(CliError::Config)?;
        doc.notes.insert(0, ("levy_spec".into(), spec.describe().into()));
    }
    Ok(doc)
}

fn document(cfg: &RunConfig, columns: &[&str]) -> Document {
    Document::new(cfg.command.name(), cfg.seed, cfg.echo(), columns)
}

fn limit_table(cfg: &RunConfig, family: &Family<f64>) -> Result<Document, CliError> {
    let curve = lt_limit_curve(family, cfg.theta0, &cfg.u_grid, &cfg.t_grid)?;
    let mut doc = document(
        cfg,
        &["family", "theta0", "t", "u", "value", "target", "abs_error", "extrapolated_flag"],
    );
    doc.note("ell", curve.ell);
    let mut failures = Vec::new();
    for row in &curve.cells {
        for c in row {
            if let Some(msg) = &c.failure {
                failures.push(format!("t={} u={}: {msg}", c.t, c.u));
            }
            doc.push(vec![
                curve.family.as_str().into(),
                cfg.theta0.into(),
                c.t.into(),
                c.u.into(),
                c.value.into(),
                c.target.into(),
                c.abs_error.into(),
                c.extrapolated.into(),
            ]);
        }
    }
    if !failures.is_empty() {
        doc.note("failed_cells", failures.len());
        doc.note("first_failure", failures.swap_remove(0));
    }
    Ok(doc)
}

fn ks(cfg: &RunConfig, family: &Family<f64>) -> Result<Document, CliError> {
    let law = ParetoLaw::new(family.ell().ell)?;
    let mut doc = document(cfg, &["family", "theta0", "t", "n", "seed", "ks"]);
    doc.note("ell", law.ell());
    for &t in &cfg.t_grid {
        let model = EdmModel::new(family.clone(), cfg.theta0, t)?;
        let ln_y = sample_ln_streams(&model, cfg.samples, cfg.seed)?;
        let zeros = ln_y.iter().filter(|l| **l == f64::NEG_INFINITY).count();
        if zeros > 0 {
            return Err(CliError::Numerical(format!(
                "{zeros} of {} draws at t={t} are Y = 0 (the Lévy measure is finite), so Y^-t is undefined",
                cfg.samples
            )));
        }
        let u = transform_ln_sample(&ln_y, t)?;
        let report = ks_against_pareto(&u, &law, t, cfg.seed)?;
        doc.push(vec![
            family.name().into(),
            cfg.theta0.into(),
            t.into(),
            report.n.into(),
            report.seed.into(),
            report.ks.into(),
        ]);
    }
    Ok(doc)
}

fn estimate(cfg: &RunConfig, family: &Family<f64>) -> Result<Document, CliError> {
    let fit = if cfg.theta0 > 0.0 {
        estimate_ell(&TailFunction::from_measure(&tilt(family.levy(), cfg.theta0)?))?
    } else {
        estimate_ell(family.tail())?
    };
    let mut doc = document(
        cfg,
        &["family", "theta0", "ell", "residual", "x_min", "x_max", "known_index", "log_asymptote_1e8"],
    );
    doc.push(vec![
        family.name().into(),
        cfg.theta0.into(),
        fit.ell.into(),
        fit.residual.into(),
        fit.fit_window.0.into(),
        fit.fit_window.1.into(),
        family.tail().known_index().into(),
        log_asymptote(family.cumulant(), 1e8)?.into(),
    ]);
    Ok(doc)
}

fn sample(cfg: &RunConfig, family: &Family<f64>) -> Result<Document, CliError> {
    let mut doc = document(cfg, &["t", "index", "y", "ln_y"]);
    for &t in &cfg.t_grid {
        let model = EdmModel::new(family.clone(), cfg.theta0, t)?;
        for (i, ln_y) in sample_ln_streams(&model, cfg.samples, cfg.seed)?.into_iter().enumerate() {
            doc.push(vec![t.into(), i.into(), ln_y.exp().into(), ln_y.into()]);
        }
    }
    Ok(doc)
}

fn density(cfg: &RunConfig, family: &Family<f64>) -> Result<Document, CliError> {
    let mut doc = document(
        cfg,
        &["variable", "t", "point", "density", "ln_density", "underflow", "printed_formula"],
    );
    let with_u = family.kind() == FamilyKind::BesselRandomWalk && cfg.theta0 == 0.0;
    if with_u {
        doc.note(
            "printed_formula",
            "l*t^2*u^(2t+1)*exp(-u^-t)*I_tl(u^-t), shown for comparison; it is not the density of U",
        );
    } else if family.kind() == FamilyKind::BesselRandomWalk {
        doc.note("u_rows", "omitted: the density of U is implemented for theta0 = 0");
    }
    let ell = family.ell().ell;
    for &t in &cfg.t_grid {
        let model = EdmModel::new(family.clone(), cfg.theta0, t)?;
        for &x in &cfg.u_grid {
            let ln = edm_ln_density(&model, x)?;
            doc.push(vec![
                "y".into(),
                t.into(),
                x.into(),
                ln.exp().into(),
                ln.into(),
                (ln.exp() == 0.0 && ln > f64::NEG_INFINITY).into(),
                Cell::Missing,
            ]);
        }
        if with_u {
            for &u in &cfg.u_grid {
                let d = density_u(t, ell, u)?;
                doc.push(vec![
                    "u".into(),
                    t.into(),
                    u.into(),
                    d.value.into(),
                    d.ln_value.into(),
                    d.underflow.into(),
                    printed_density_u(t, ell, u)?.into(),
                ]);
            }
        }
    }
    Ok(doc)
}

fn approx(cfg: &RunConfig, family: &Family<f64>) -> Result<Document, CliError> {
    let mut doc = document(
        cfg,
        &[
            "family", "theta0", "t", "ell", "method", "n", "seed", "ln_y", "y", "reference", "approx", "abs_error",
            "sup_cdf_error",
        ],
    );
    for &t in &cfg.t_grid {
        let r = approx_error(family, cfg.theta0, t, cfg.samples, cfg.seed)?;
        for ((&ln_y, &reference), &a) in r.ln_grid.iter().zip(&r.reference).zip(&r.approx) {
            doc.push(vec![
                r.family.as_str().into(),
                r.theta0.into(),
                r.t.into(),
                r.ell.into(),
                r.method.as_str().into(),
                r.n.into(),
                r.seed.into(),
                ln_y.into(),
                ln_y.exp().into(),
                reference.into(),
                a.into(),
                (reference - a).abs().into(),
                r.sup_cdf_error.into(),
            ]);
        }
    }
    Ok(doc)
}
