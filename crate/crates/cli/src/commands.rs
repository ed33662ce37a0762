use floquet_core::checks::{self, Status};
use floquet_core::dynamics::{self, GaussianState};
use floquet_core::floquet::{self, Multipliers};
use floquet_core::hill::{self, FundamentalPair};
use floquet_core::mourre;
use floquet_core::ode::Tolerances;
use floquet_core::{FieldProfile, FloquetError, Method, Result, Segment};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::table::{Cell, Table};

/// Uniform grid with `samples` intervals per period over `periods` periods.
fn time_grid(profile: &FieldProfile, samples: usize, periods: usize) -> Vec<f64> {
    let h = profile.period() / samples as f64;
    (0..=samples * periods).map(|k| k as f64 * h).collect()
}

pub fn analyze(profile: &FieldProfile) -> Result<Value> {
    let mono = floquet::monodromy(profile)?;
    let multipliers = match floquet::multipliers(mono.discriminant) {
        Multipliers::Real(a, b) => json!([[a, 0.0], [b, 0.0]]),
        Multipliers::Conjugate { re, im } => json!([[re, im], [re, -im]]),
    };
    let normal_form = match floquet::normal_form_from(profile, &mono) {
        Ok(nf) => json!({
            "A_D": nf.a_d,
            "B_D": nf.b_d,
            "C_D": nf.c_d,
            "D_D": nf.d_d,
            "sigma_D": nf.sigma_d,
            "calD": nf.cal_d,
            "Sigma": nf.sigma,
            "mourre_prefactor": nf.mourre_prefactor,
        }),
        Err(FloquetError::AssumptionViolation(_)) => Value::Null,
        Err(e) => return Err(e),
    };
    Ok(json!({
        "discriminant": mono.discriminant,
        "stability": mono.stability.as_str(),
        "multipliers": multipliers,
        "zeta_T": mono.pair_t.as_array(),
        "omega_T": mono.omega_t,
        "normal_form": normal_form,
        "assumption1": mono.assumption_holds(),
    }))
}

pub fn trace(
    profile: &FieldProfile,
    samples: usize,
    periods: usize,
    method: Method,
    tol: Tolerances,
) -> Result<Table> {
    let pairs = time_grid(profile, samples, periods)
        .into_iter()
        .map(|t| match method {
            Method::ClosedForm => Ok(hill::fundamental_closed_form(profile, t)),
            Method::Numeric => hill::fundamental_numeric(profile, t, tol),
        })
        .collect::<Result<Vec<FundamentalPair>>>()?;
    let polar = hill::polar_decompose(profile, &pairs)?;
    let mut table = Table::new(["t", "zeta1", "zeta2", "dzeta1", "dzeta2", "wronskian", "rho", "eta"]);
    for (p, pol) in pairs.iter().zip(&polar.points) {
        table.push(
            [p.t, p.zeta1, p.zeta2, p.dzeta1, p.dzeta2, p.wronskian(), pol.rho, pol.eta]
                .map(Cell::from)
                .to_vec(),
        );
    }
    Ok(table)
}

pub fn evolve(profile: &FieldProfile, samples: usize, periods: usize) -> Result<Table> {
    let state = GaussianState::displaced_vacuum();
    let mut table = Table::new([
        "t", "mean_x1", "mean_x2", "mean_p1", "mean_p2", "var_x", "var_p", "log_norm_x",
    ]);
    for t in time_grid(profile, samples, periods) {
        let map = dynamics::heisenberg_map_scaled(profile, t)?;
        let moved = dynamics::evolve_gaussian(&state, &map.map);
        let scale = map.log_scale.exp();
        let m = moved.mean * scale;
        table.push(
            [
                t,
                m[0],
                m[1],
                m[2],
                m[3],
                moved.position_variance() * scale * scale,
                moved.momentum_variance() * scale * scale,
                dynamics::log_position_norm(&state, &map),
            ]
            .map(Cell::from)
            .to_vec(),
        );
    }
    Ok(table)
}

pub fn theta_table(profile: &FieldProfile, samples: usize, periods: usize) -> Result<Table> {
    let nf = floquet::normal_form(profile)?;
    let mut table = Table::new(["t", "theta1", "theta2", "theta3", "theta4", "rot1", "det"]);
    for t in time_grid(profile, samples, periods) {
        let th = mourre::theta(profile, &nf, t)?;
        let [a, b, c, d] = th.entries();
        table.push([t, a, b, c, d, th.rot, th.determinant()].map(Cell::from).to_vec());
    }
    Ok(table)
}

pub fn theta_report(profile: &FieldProfile, samples: usize, periods: usize) -> Result<Value> {
    let nf = floquet::normal_form(profile)?;
    let rep = mourre::theta_periodicity_report(profile, &nf, samples, periods)?;
    serde_json::to_value(rep).map_err(|e| FloquetError::NumericalFailure(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanTarget {
    Field(usize),
    Duration(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanAxis {
    pub name: String,
    pub target: ScanTarget,
    pub values: Vec<f64>,
}

impl ScanAxis {
    /// `field.K` or `duration.K` (zero-based segment index) with `A:B:STEPS`.
    pub fn parse(name: &str, range: &str) -> Result<Self> {
        let bad = |msg: &str| FloquetError::Config(msg.to_string());
        let (kind, index) = name
            .split_once('.')
            .ok_or_else(|| bad(&format!("scan parameter '{name}' must look like field.K or duration.K")))?;
        let index: usize =
            index.parse().map_err(|_| bad(&format!("bad segment index in scan parameter '{name}'")))?;
        let target = match kind {
            "field" => ScanTarget::Field(index),
            "duration" => ScanTarget::Duration(index),
            _ => return Err(bad(&format!("unknown scan parameter kind '{kind}'"))),
        };
        let parts: Vec<&str> = range.split(':').collect();
        let [a, b, steps] = parts[..] else {
            return Err(bad(&format!("scan range '{range}' must be A:B:STEPS")));
        };
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(&format!("bad number '{s}' in scan range")))
        };
        let (a, b) = (parse(a)?, parse(b)?);
        let steps: usize = steps
            .trim()
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| bad(&format!("scan steps must be a positive integer, got '{steps}'")))?;
        let values = if steps == 1 {
            vec![a]
        } else {
            (0..steps).map(|k| a + (b - a) * k as f64 / (steps - 1) as f64).collect()
        };
        Ok(Self { name: name.to_string(), target, values })
    }

    fn apply(&self, profile: &FieldProfile, value: f64) -> Result<FieldProfile> {
        let (ScanTarget::Field(index) | ScanTarget::Duration(index)) = self.target;
        let seg = profile.segments().get(index).ok_or_else(|| {
            FloquetError::Config(format!("scan parameter '{}' names a missing segment", self.name))
        })?;
        let replaced = match self.target {
            ScanTarget::Field(_) => Segment::new(value, seg.duration),
            ScanTarget::Duration(_) => Segment::new(seg.field, value),
        };
        profile.with_segment(index, replaced)
    }
}

pub fn scan(profile: &FieldProfile, axes: &[ScanAxis], threads: Option<usize>) -> Result<Table> {
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    let evaluate = |point: &Vec<f64>| -> Result<Vec<Cell>> {
        let mut prof = profile.clone();
        for (axis, &v) in axes.iter().zip(point) {
            prof = axis.apply(&prof, v)?;
        }
        let mono = floquet::monodromy(&prof)?;
        let mut row: Vec<Cell> = point.iter().map(|&v| Cell::from(v)).collect();
        row.push(Cell::from(mono.discriminant));
        row.push(Cell::from(mono.stability.as_str()));
        row.push(Cell::from(mono.pair_t.zeta2));
        Ok(row)
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| FloquetError::Config(e.to_string()))?;
    let rows = pool.install(|| points.par_iter().map(evaluate).collect::<Result<Vec<_>>>())?;

    let mut header: Vec<String> = axes.iter().map(|a| a.name.clone()).collect();
    header.extend(["D", "stability", "zeta2_T"].map(String::from));
    Ok(Table { header, rows })
}

pub fn validate(profile: &FieldProfile, tol: Tolerances) -> Result<(String, bool)> {
    let results = checks::run_suite(profile, tol)?;
    let mut text = String::new();
    let mut failed = false;
    for r in &results {
        let tag = match r.status {
            Status::Pass => "PASS",
            Status::Fail => {
                failed = true;
                "FAIL"
            }
            Status::Skipped => "SKIP",
        };
        text.push_str(&format!("{tag} {} {}\n", r.name, r.detail));
    }
    let counts = |s: Status| results.iter().filter(|r| r.status == s).count();
    text.push_str(&format!(
        "{} passed, {} failed, {} skipped\n",
        counts(Status::Pass),
        counts(Status::Fail),
        counts(Status::Skipped)
    ));
    Ok((text, !failed))
}
