//! Multi-solve experiments: combined problems and radius sweeps.

use std::thread;

use serde::Serialize;

use crate::config::{ConfigError, OmegaSpec, ProblemConfig};
use crate::envelope::{check_combination_inclusion, InclusionReport};
use crate::freeboundary::{solve_interior_bernoulli, SolveReport, SolveStatus, SolverError};
use crate::geometry::{BoundaryConstraint, ConvexBody, GeometryError};
use crate::io::SweepRow;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("{0}")]
    Incompatible(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Problem data for one solve.
#[derive(Clone, Debug)]
pub struct Problem {
    pub omega: ConvexBody,
    pub g: BoundaryConstraint,
}

impl Problem {
    pub fn from_config(config: &ProblemConfig) -> Result<Self, ExperimentError> {
        Ok(Self { omega: config.omega_body()?, g: config.constraint()? })
    }
}

/// The two legs of a combination, the combined solve and the inclusion
/// check between them.
#[derive(Debug)]
pub struct Combination {
    pub lambda: f64,
    pub legs: [SolveReport; 2],
    pub combined: Option<SolveReport>,
    pub inclusion: Option<InclusionReport>,
    /// Largest radial cell size among the three meshes.
    pub mesh_tolerance: f64,
}

impl Combination {
    /// Name of the first solve that did not converge.
    pub fn failed_leg(&self) -> Option<&'static str> {
        let names = ["leg0", "leg1"];
        for (name, leg) in names.iter().zip(&self.legs) {
            if leg.status != SolveStatus::Converged {
                return Some(name);
            }
        }
        match &self.combined {
            Some(r) if r.status == SolveStatus::Converged => None,
            _ => Some("combined"),
        }
    }
}

/// Combined problem of ratio `λ`: `Ω_λ = (1-λ)Ω0 + λΩ1` and `g_λ` the
/// weighted harmonic mean of `g0` and `g1`. The two legs run concurrently.
pub fn combine_problems(c0: &ProblemConfig, c1: &ProblemConfig, lambda: f64) -> Result<Combination, ExperimentError> {
    if c0.p != c1.p {
        return Err(ExperimentError::Incompatible(format!("p differs: {} vs {}", c0.p, c1.p)));
    }
    let m = c0.solver.angular_nodes;
    if m != c1.solver.angular_nodes || c0.solver.radial_layers != c1.solver.radial_layers {
        return Err(ExperimentError::Incompatible("the two configurations use different grids".into()));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(ExperimentError::Incompatible(format!("λ = {lambda} outside [0, 1]")));
    }
    let p0 = Problem::from_config(c0)?;
    let p1 = Problem::from_config(c1)?;
    let omega = p0.omega.minkowski_combine(&p1.omega, lambda)?;
    let g = BoundaryConstraint::harmonic_mean(&p0.g, &p1.g, lambda, m)?;

    let (r0, r1) = thread::scope(|s| {
        let h0 = s.spawn(|| solve_interior_bernoulli(&p0.omega, &p0.g, c0.p, &c0.solver));
        let h1 = s.spawn(|| solve_interior_bernoulli(&p1.omega, &p1.g, c1.p, &c1.solver));
        (h0.join().expect("solver thread"), h1.join().expect("solver thread"))
    });
    let legs = [r0?, r1?];
    let legs_ok = legs.iter().all(|r| r.status == SolveStatus::Converged);
    let combined = if legs_ok { Some(solve_interior_bernoulli(&omega, &g, c0.p, &c0.solver)?) } else { None };
    let inclusion = match &combined {
        Some(c) if c.status == SolveStatus::Converged => Some(check_combination_inclusion(&legs[0].body, &legs[1].body, &c.body, lambda)?),
        _ => None,
    };
    let mesh_tolerance = legs.iter().chain(combined.as_ref()).map(|r| r.mesh.mesh_tolerance()).fold(0.0, f64::max);
    Ok(Combination { lambda, legs, combined, inclusion, mesh_tolerance })
}

/// `combined.json`: per-solve summaries and the inclusion margin.
#[derive(Clone, Debug, Serialize)]
pub struct CombinationSummary {
    pub lambda: f64,
    pub legs: Vec<crate::io::ReportSummary>,
    pub combined: Option<crate::io::ReportSummary>,
    pub inclusion_margin: Option<f64>,
    pub inclusion_worst_theta: Option<f64>,
    pub mesh_tolerance: f64,
    pub failed_leg: Option<String>,
}

impl CombinationSummary {
    pub fn new(c: &Combination) -> Self {
        Self {
            lambda: c.lambda,
            legs: c.legs.iter().map(crate::io::ReportSummary::new).collect(),
            combined: c.combined.as_ref().map(crate::io::ReportSummary::new),
            inclusion_margin: c.inclusion.as_ref().map(|i| i.margin),
            inclusion_worst_theta: c.inclusion.as_ref().map(|i| i.worst_theta),
            mesh_tolerance: c.mesh_tolerance,
            failed_leg: c.failed_leg().map(str::to_string),
        }
    }
}

/// One solve per radius on the disk of that radius (keeping the base
/// configuration's centre, `g`, `p` and solver settings). Solves run on
/// separate threads; rows come back in input order. A failed solve becomes
/// a row with its status (or the error message) and `NaN` inradius.
pub fn sweep_radii(base: &ProblemConfig, radii: &[f64]) -> Result<Vec<(SweepRow, Option<SolveReport>)>, ExperimentError> {
    let center = match base.omega {
        OmegaSpec::Disk { center, .. } => center,
        _ => return Err(ExperimentError::Incompatible("the radius sweep needs a disk domain".into())),
    };
    let configs: Vec<ProblemConfig> =
        radii.iter().map(|&radius| ProblemConfig { omega: OmegaSpec::Disk { radius, center }, ..base.clone() }).collect();
    let results: Vec<Result<SolveReport, String>> = thread::scope(|s| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| {
                s.spawn(move || {
                    let problem = Problem::from_config(c).map_err(|e| e.to_string())?;
                    solve_interior_bernoulli(&problem.omega, &problem.g, c.p, &c.solver).map_err(|e| e.to_string())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("solver thread")).collect()
    });
    Ok(radii
        .iter()
        .zip(results)
        .map(|(&radius, result)| match result {
            Ok(report) => {
                let status = format!("{:?}", report.status);
                let inradius = if report.status == SolveStatus::Converged { report.inradius() } else { f64::NAN };
                (SweepRow { radius, inradius, ratio: inradius / radius, status }, Some(report))
            }
            Err(message) => (SweepRow { radius, inradius: f64::NAN, ratio: f64::NAN, status: format!("Error: {message}") }, None),
        })
        .collect())
}
