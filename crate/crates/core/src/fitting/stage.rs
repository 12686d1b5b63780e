use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::constraints::{constraint_names, evaluate, Evaluation};
use super::design::{DesignVector, Stage};
use super::optimizer::{best_result, multistart, starting_points, OptimizerSettings, Problem};
use super::residual::{mean_square, FAILED_SAMPLE_PENALTY};
use super::FitError;
use crate::linkage::MechanismGraph;
use crate::target::TargetGait;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageOrder {
    HumerusFirst,
    /// Fits the radius before the humerus it hangs from; kept for comparison.
    RadiusFirst,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub multistarts: usize,
    pub seed: u64,
    pub optimizer: OptimizerSettings,
    pub order: StageOrder,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { multistarts: 10, seed: 0, optimizer: OptimizerSettings::default(), order: StageOrder::HumerusFirst }
    }
}

/// Costs below this are treated as an exact fit and skip optimisation.
pub const EXACT_FIT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartSummary {
    pub index: usize,
    pub cost: Option<f64>,
    pub max_constraint: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub stage: Stage,
    /// Mean square error (deg^2) before and after fitting.
    pub initial_cost: f64,
    pub final_cost: f64,
    pub iterations: usize,
    /// Multistart index of the winning run.
    pub winner: Option<usize>,
    /// Largest constraint value at the solution, clipped at zero.
    pub constraint_violation: f64,
    pub budget_exhausted: bool,
    pub starts: Vec<StartSummary>,
    pub stages: Vec<FitReport>,
    pub design: DesignVector,
    pub warnings: Vec<String>,
}

impl FitReport {
    /// The fitted mechanism.
    pub fn apply(&self, mech: &MechanismGraph) -> Result<MechanismGraph, FitError> {
        Ok(self.design.apply(mech)?)
    }
}

/// The fitting problem of one stage: free entries of the design vector
/// against the stage's target series.
pub struct StageProblem<'a> {
    base: MechanismGraph,
    design: DesignVector,
    free: Vec<usize>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    targets: &'a TargetGait,
    outputs: Vec<(usize, &'a [f64])>,
    constraint_count: usize,
    record: Option<Mutex<Vec<Vec<f64>>>>,
}

impl<'a> StageProblem<'a> {
    pub fn new(mech: &MechanismGraph, targets: &'a TargetGait, stage: Stage) -> Result<Self, FitError> {
        let design = DesignVector::from_mechanism(mech);
        let free = design.free_indices(stage);
        let mut outputs = Vec::new();
        for name in stage.outputs() {
            let idx = mech.angle_output_index(name)?;
            let series = targets.series(name).ok_or_else(|| FitError::UnknownTarget(name.to_string()))?;
            if series.len() != targets.phases.len() {
                return Err(FitError::GridMismatch { simulated: targets.phases.len(), targets: series.len() });
            }
            outputs.push((idx, series));
        }
        Ok(StageProblem {
            lower: free.iter().map(|&i| design.lower[i]).collect(),
            upper: free.iter().map(|&i| design.upper[i]).collect(),
            constraint_count: constraint_names(mech).len(),
            base: mech.clone(),
            design,
            free,
            targets,
            outputs,
            record: None,
        })
    }

    /// Keeps a copy of every evaluated point (free entries only).
    pub fn recording(mut self) -> Self {
        self.record = Some(Mutex::new(Vec::new()));
        self
    }

    pub fn recorded(&self) -> Vec<Vec<f64>> {
        self.record.as_ref().map(|m| m.lock().expect("not poisoned").clone()).unwrap_or_default()
    }

    pub fn free_names(&self) -> Vec<&str> {
        self.free.iter().map(|&i| self.design.names[i].as_str()).collect()
    }

    pub fn nominal(&self) -> Vec<f64> {
        self.free.iter().map(|&i| self.design.values[i]).collect()
    }

    /// Full design vector with the free entries replaced by `q`.
    pub fn design_with(&self, q: &[f64]) -> DesignVector {
        let mut d = self.design.clone();
        for (k, &i) in self.free.iter().enumerate() {
            d.values[i] = q[k];
        }
        d
    }

    fn mechanism_at(&self, q: &[f64]) -> Option<MechanismGraph> {
        let names = self.free.iter().map(|&i| self.design.names[i].as_str());
        self.base.with_parameters(names.zip(q.iter().copied())).ok()
    }

    fn eval(&self, q: &[f64]) -> Evaluation {
        if let Some(rec) = &self.record {
            rec.lock().expect("not poisoned").push(q.to_vec());
        }
        match self.mechanism_at(q) {
            Some(m) => evaluate(&m, &self.targets.phases, &self.outputs),
            None => Evaluation {
                residuals: vec![FAILED_SAMPLE_PENALTY; self.targets.phases.len() * self.outputs.len()],
                constraints: vec![super::constraints::UNCOMPUTABLE; self.constraint_count],
            },
        }
    }
}

impl Problem for StageProblem<'_> {
    fn lower(&self) -> &[f64] {
        &self.lower
    }

    fn upper(&self) -> &[f64] {
        &self.upper
    }

    fn evaluate(&self, q: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let e = self.eval(q);
        (e.residuals, e.constraints)
    }
}

fn stage_cost(mech: &MechanismGraph, targets: &TargetGait, stage: Stage) -> Result<(f64, f64), FitError> {
    let problem = StageProblem::new(mech, targets, stage)?;
    let e = problem.eval(&problem.nominal());
    let violation = e.constraints.iter().copied().fold(0.0, f64::max);
    Ok((mean_square(&e.residuals)?, violation))
}

/// Fits the parameters tagged for `stage` against its target series.
pub fn optimize_stage(
    mech: &MechanismGraph,
    targets: &TargetGait,
    stage: Stage,
    options: &FitOptions,
) -> Result<FitReport, FitError> {
    let problem = StageProblem::new(mech, targets, stage)?;
    let nominal = problem.nominal();
    let e = problem.eval(&nominal);
    let initial_cost = mean_square(&e.residuals)?;
    let initial_violation = e.constraints.iter().copied().fold(0.0, f64::max);
    let mut report = FitReport {
        stage,
        initial_cost,
        final_cost: initial_cost,
        iterations: 0,
        winner: None,
        constraint_violation: initial_violation,
        budget_exhausted: false,
        starts: Vec::new(),
        stages: Vec::new(),
        design: problem.design.clone(),
        warnings: Vec::new(),
    };
    if nominal.is_empty() || (initial_cost <= EXACT_FIT && initial_violation <= options.optimizer.feasibility_tolerance)
    {
        return Ok(report);
    }
    let starts = starting_points(&nominal, &problem.lower, &problem.upper, options.multistarts, options.seed);
    let results = multistart(&problem, starts, &options.optimizer);
    report.starts = results
        .iter()
        .map(|r| StartSummary { index: r.index, cost: r.cost, max_constraint: r.max_constraint, iterations: r.iterations })
        .collect();
    report.iterations = results.iter().map(|r| r.iterations).sum();
    let best = best_result(&results, &options.optimizer).ok_or(FitError::NoFeasibleStart { stage })?;
    report.winner = Some(best.index);
    report.final_cost = best.cost.expect("feasible results carry a cost");
    report.constraint_violation = best.max_constraint.max(0.0);
    report.budget_exhausted = best.budget_exhausted;
    if report.budget_exhausted {
        report.warnings.push(format!("{stage} stage: iteration budget exhausted; best result so far returned"));
    }
    report.design = problem.design_with(&best.q);
    Ok(report)
}

/// Fits the humerus stage against the shoulder targets, then the radius
/// stage against the elbow targets with the humerus frozen.
pub fn optimize_armwing(mech: &MechanismGraph, targets: &TargetGait, options: &FitOptions) -> Result<FitReport, FitError> {
    let (initial_cost, _) = stage_cost(mech, targets, Stage::All)?;
    let order = match options.order {
        StageOrder::HumerusFirst => [Stage::Humerus, Stage::Radius],
        StageOrder::RadiusFirst => [Stage::Radius, Stage::Humerus],
    };
    let mut warnings = Vec::new();
    if options.order == StageOrder::RadiusFirst {
        let w = "radius stage fitted before the humerus it depends on; expect a worse fit".to_string();
        log::warn!("{w}");
        warnings.push(w);
    }
    let mut current = mech.clone();
    let mut stages = Vec::new();
    for stage in order {
        let r = optimize_stage(&current, targets, stage, options).map_err(|e| e.in_stage(stage))?;
        current = r.apply(&current)?;
        warnings.extend(r.warnings.iter().cloned());
        stages.push(r);
    }
    let (final_cost, violation) = stage_cost(&current, targets, Stage::All)?;
    Ok(FitReport {
        stage: Stage::All,
        initial_cost,
        final_cost,
        iterations: stages.iter().map(|s| s.iterations).sum(),
        winner: None,
        constraint_violation: violation,
        budget_exhausted: stages.iter().any(|s| s.budget_exhausted),
        starts: Vec::new(),
        design: DesignVector::from_mechanism(&current),
        stages,
        warnings,
    })
}
