//! `key = value` files describing a user Lévy measure.
//!
//! ```text
//! # gamma-like density
//! name = tilted-gamma
//! density_expr = exp(-2*x)/x
//! support = 0, inf
//! cumulant_expr = -log(1 + theta/2)
//! ell = 1
//! ```
//!
//! An atom rule replaces `density_expr`/`support` with
//! `atoms_rule = <location in n> ; <mass in n> ; <n_max>`.

use std::collections::BTreeMap;
use std::path::Path;

use edm_pareto::families::{user_atoms_family, user_density_family, Family};
use edm_pareto::levy::{CumulantFunction, FiniteAtoms};

use crate::expr::Expr;

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    Density { density: Expr, support: (f64, f64) },
    Atoms { location: Expr, mass: Expr, n_max: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevySpec {
    pub name: String,
    pub measure: MeasureSpec,
    pub cumulant: Option<Expr>,
    pub ell: Option<f64>,
}

const KEYS: [&str; 6] = ["name", "density_expr", "support", "atoms_rule", "cumulant_expr", "ell"];

impl LevySpec {
    pub fn read(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read levy spec {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(format!("line {}: unknown key '{key}'", i + 1));
            }
            if entries.insert(key, (i + 1, value.trim())).is_some() {
                return Err(format!("line {}: duplicate key '{key}'", i + 1));
            }
        }
        let expr = |key: &str, var: &str| -> Result<Option<Expr>, String> {
            entries
                .get(key)
                .map(|&(line, v)| Expr::parse(v, var).map_err(|e| format!("line {line}: {key}: {e}")))
                .transpose()
        };
        let measure = match (entries.get("density_expr"), entries.get("atoms_rule")) {
            (Some(_), Some(_)) => return Err("give either density_expr or atoms_rule, not both".into()),
            (None, None) => return Err("missing density_expr or atoms_rule".into()),
            (Some(_), None) => {
                let support = match entries.get("support") {
                    Some(&(line, v)) => parse_support(v).map_err(|e| format!("line {line}: support: {e}"))?,
                    None => (0.0, f64::INFINITY),
                };
                MeasureSpec::Density {
                    density: expr("density_expr", "x")?.expect("present"),
                    support,
                }
            }
            (None, Some(&(line, v))) => {
                if entries.contains_key("support") {
                    return Err(format!("line {line}: support applies to density_expr only"));
                }
                parse_atoms(v).map_err(|e| format!("line {line}: atoms_rule: {e}"))?
            }
        };
        let ell = match entries.get("ell") {
            Some(&(line, v)) => Some(
                v.parse::<f64>()
                    .ok()
                    .filter(|l| *l > 0.0 && l.is_finite())
                    .ok_or_else(|| format!("line {line}: ell must be a positive number"))?,
            ),
            None => None,
        };
        Ok(LevySpec {
            name: entries.get("name").map_or("user", |&(_, v)| v).to_string(),
            measure,
            cumulant: expr("cumulant_expr", "theta")?,
            ell,
        })
    }

    pub fn family(&self) -> edm_pareto::Result<Family<f64>> {
        let cumulant = self.cumulant.clone().map(|k| CumulantFunction::closed_form(move |th: f64| k.eval(th)));
        match &self.measure {
            MeasureSpec::Density { density, support } => {
                let f = density.clone();
                user_density_family(&self.name, move |x: f64| f.eval(x), *support, cumulant, self.ell)
            }
            MeasureSpec::Atoms { location, mass, n_max } => {
                let atoms = FiniteAtoms::from_rule(*n_max, |n| location.eval(n as f64), |n| mass.eval(n as f64))?;
                user_atoms_family(&self.name, atoms, cumulant, self.ell)
            }
        }
    }

    /// One-line description for output metadata.
    pub fn describe(&self) -> String {
        let measure = match &self.measure {
            MeasureSpec::Density { density, support } => {
                format!("density_expr={} support={},{}", density.source(), support.0, support.1)
            }
            MeasureSpec::Atoms { location, mass, n_max } => {
                format!("atoms_rule={};{};{}", location.source(), mass.source(), n_max)
            }
        };
        let mut out = format!("name={} {measure}", self.name);
        if let Some(k) = &self.cumulant {
            out += &format!(" cumulant_expr={}", k.source());
        }
        if let Some(ell) = self.ell {
            out += &format!(" ell={ell}");
        }
        out
    }
}

fn parse_support(v: &str) -> Result<(f64, f64), String> {
    let (a, b) = v.split_once(',').ok_or("expected 'lo, hi'")?;
    let bound = |s: &str| -> Result<f64, String> {
        match s.trim() {
            "inf" | "+inf" => Ok(f64::INFINITY),
            t => t.parse::<f64>().map_err(|_| format!("'{t}' is not a number")),
        }
    };
    let (lo, hi) = (bound(a)?, bound(b)?);
    if !(lo >= 0.0 && hi > lo) {
        return Err(format!("need 0 <= lo < hi, got {lo}, {hi}"));
    }
    Ok((lo, hi))
}

fn parse_atoms(v: &str) -> Result<MeasureSpec, String> {
    let parts: Vec<&str> = v.split(';').map(str::trim).collect();
    let [loc, mass, n_max] = parts[..] else {
        return Err("expected '<location> ; <mass> ; <n_max>'".into());
    };
    let n_max = n_max
        .parse::<usize>()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("n_max '{n_max}' must be a positive integer"))?;
    Ok(MeasureSpec::Atoms {
        location: Expr::parse(loc, "n").map_err(|e| format!("location: {e}"))?,
        mass: Expr::parse(mass, "n").map_err(|e| format!("mass: {e}"))?,
        n_max,
    })
}
