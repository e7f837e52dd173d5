//! Quantities evaluated over P grids and the figure presets built on them.

use std::collections::BTreeMap;

use clap::ValueEnum;
use spdc_ng::exec;
use spdc_ng::moments::epr_product_gaussian;
use spdc_ng::*;

use crate::{CliError, GridArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Quantity {
    Epr,
    Mancini,
    NgTotal,
    NgCond,
    NgMarg,
    NegentropyFfCond,
    NegentropyNfCond,
    NegentropyFfMarg,
    NegentropyNfMarg,
    VarQNorm,
    VarXNorm,
    DeltaB,
}

impl Quantity {
    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }

    fn takes_alpha(self) -> bool {
        matches!(self, Quantity::Epr | Quantity::Mancini | Quantity::VarQNorm | Quantity::VarXNorm)
    }

    fn has_err(self) -> bool {
        !matches!(self, Quantity::Mancini | Quantity::DeltaB)
    }

    fn unit(self) -> &'static str {
        match self {
            Quantity::Epr | Quantity::Mancini | Quantity::VarQNorm | Quantity::VarXNorm => "dimensionless",
            Quantity::DeltaB => "nats",
            _ => "bits",
        }
    }

    fn columns(self, alphas: &[f64]) -> Vec<String> {
        let name = self.name();
        let mut cols = vec![name.clone()];
        if self.has_err() {
            cols.push(format!("{name}_err"));
        }
        if self.takes_alpha() {
            cols.extend(alphas.iter().map(|a| format!("{name}_alpha_{a}")));
        }
        cols
    }

    fn eval(self, params: &Params, alphas: &[f64], tol: &QuadTolerance) -> Result<Vec<f64>> {
        let n = |plane, form| negentropy(&make_density(plane, Model::Spdc, form, *params, tol)?);
        let pair = |form| -> Result<Vec<f64>> {
            let ff = n(Plane::FarField, form)?;
            let nf = n(Plane::NearField, form)?;
            Ok(vec![ff.value + nf.value, ff.err_estimate + nf.err_estimate])
        };
        let single = |plane, form| -> Result<Vec<f64>> {
            let v = n(plane, form)?;
            Ok(vec![v.value, v.err_estimate])
        };
        let gaussian = |f: &dyn Fn(f64) -> Result<f64>| alphas.iter().map(|&a| f(a)).collect::<Result<Vec<f64>>>();
        let p2 = params.p * params.p;
        let slice = Form::ConditionalAt(0.0);
        let mut out = match self {
            Quantity::Epr => {
                let r = epr_product(params, tol)?;
                vec![r.product, r.err_estimate]
            }
            Quantity::Mancini => vec![mancini_product(params, Model::Spdc, tol)?],
            Quantity::VarQNorm => {
                let v = conditional_variances(params, Model::Spdc, tol)?;
                vec![v.var_q_norm, v.err_q * p2]
            }
            Quantity::VarXNorm => {
                let v = conditional_variances(params, Model::Spdc, tol)?;
                vec![v.var_x_norm, v.err_x / p2]
            }
            Quantity::NgTotal => pair(Form::Joint)?,
            Quantity::NgCond => pair(slice)?,
            Quantity::NgMarg => pair(Form::Marginal)?,
            Quantity::NegentropyFfCond => single(Plane::FarField, slice)?,
            Quantity::NegentropyNfCond => single(Plane::NearField, slice)?,
            Quantity::NegentropyFfMarg => single(Plane::FarField, Form::Marginal)?,
            Quantity::NegentropyNfMarg => single(Plane::NearField, Form::Marginal)?,
            Quantity::DeltaB => vec![delta_b(params, tol)?],
        };
        if self.takes_alpha() {
            out.extend(match self {
                Quantity::Epr => gaussian(&|a| Ok(epr_product_gaussian(a, params)?.product))?,
                Quantity::Mancini => gaussian(&|a| mancini_product(params, Model::Gaussian { alpha: a }, tol))?,
                Quantity::VarQNorm => gaussian(&|a| Ok(gaussian_conditional_variances(a, params)?.var_q_norm))?,
                _ => gaussian(&|a| Ok(gaussian_conditional_variances(a, params)?.var_x_norm))?,
            });
        }
        Ok(out)
    }
}

/// Rows of numbers with an optional per-row failure message.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub units: BTreeMap<String, String>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub values: Vec<f64>,
    pub error: Option<String>,
}

impl Table {
    pub fn failed(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }

    pub fn outcome(&self) -> std::result::Result<(), CliError> {
        match self.failed() {
            0 => Ok(()),
            failed => Err(CliError::Partial { failed, total: self.rows.len() }),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct GridSpec {
    min: f64,
    max: f64,
    steps: usize,
    log: bool,
}

/// P grid from the flags, falling back to a preset for unset values.
fn grid_from(args: &GridArgs, preset: Option<GridSpec>) -> std::result::Result<Vec<f64>, CliError> {
    let missing = |flag: &str| CliError::Usage(format!("{flag} is required"));
    let min = args.p_min.or(preset.map(|g| g.min)).ok_or_else(|| missing("--p-min"))?;
    let max = args.p_max.or(preset.map(|g| g.max)).ok_or_else(|| missing("--p-max"))?;
    let steps = args.steps.or(preset.map(|g| g.steps)).unwrap_or(60);
    let log = args.log || preset.is_some_and(|g| g.log);
    if !(min > 0.0 && min < max && max.is_finite()) {
        return Err(CliError::Usage(format!("need 0 < p-min < p-max, got p-min = {min}, p-max = {max}")));
    }
    if steps < 2 {
        return Err(CliError::Usage(format!("--steps must be at least 2, got {steps}")));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            let t = i as f64 / last;
            match (i, log) {
                (0, _) => min,
                (i, _) if i == steps - 1 => max,
                (_, true) => min * (max / min).powf(t),
                (_, false) => min + (max - min) * t,
            }
        })
        .collect())
}

/// P grid from the flags alone.
pub fn grid(args: &GridArgs) -> std::result::Result<Vec<f64>, CliError> {
    grid_from(args, None)
}

/// Evaluate every quantity at every grid point; points run in parallel and
/// rows come back in grid order.
pub fn sweep(quantities: &[Quantity], grid: &[f64], sigma: f64, alphas: &[f64], tol: &QuadTolerance) -> Table {
    let mut columns = vec!["p".to_string()];
    let mut units = BTreeMap::from([("p".to_string(), "dimensionless".to_string())]);
    let mut widths = Vec::new();
    for q in quantities {
        let cols = q.columns(alphas);
        widths.push(cols.len());
        units.extend(cols.iter().map(|c| (c.clone(), q.unit().to_string())));
        columns.extend(cols);
    }
    let rows = exec::map(grid, |&p| {
        let mut values = vec![p];
        let mut errors = Vec::new();
        for (q, &w) in quantities.iter().zip(&widths) {
            match Params::new(p, sigma).and_then(|params| q.eval(&params, alphas, tol)) {
                Ok(v) => values.extend(v),
                Err(e) => {
                    values.extend(std::iter::repeat_n(f64::NAN, w));
                    errors.push(format!("{}: {e}", q.name()));
                }
            }
        }
        Row { values, error: (!errors.is_empty()).then(|| errors.join("; ")) }
    });
    Table { columns, units, rows }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    #[value(name = "1a")]
    Fig1a,
    #[value(name = "1b")]
    Fig1b,
    #[value(name = "1c")]
    Fig1c,
    #[value(name = "1d")]
    Fig1d,
    #[value(name = "1e")]
    Fig1e,
    #[value(name = "1f")]
    Fig1f,
    #[value(name = "2")]
    Fig2,
    #[value(name = "3a")]
    Fig3a,
    #[value(name = "3b")]
    Fig3b,
    #[value(name = "3c")]
    Fig3c,
    #[value(name = "3d")]
    Fig3d,
    #[value(name = "mancini")]
    Mancini,
    #[value(name = "supp_ngm")]
    SuppNgm,
}

const CURVE_ALPHAS: [f64; 2] = [0.45, 0.72];
const SWEEP_ALPHAS: [f64; 3] = [0.45, 0.72, 1.0];
const CRITERIA_GRID: GridSpec = GridSpec { min: 0.05, max: 5.0, steps: 60, log: true };
const NEGENTROPY_GRID: GridSpec = GridSpec { min: 0.01, max: 3.0, steps: 60, log: true };
const LARGE_P_GRID: GridSpec = GridSpec { min: 3.0, max: 15.0, steps: 30, log: true };
const SECTION_POINTS: usize = 201;
/// Half-width of a cross-section in SPDC conditional standard deviations.
const SECTION_HALF_WIDTH: f64 = 5.0;

/// Dataset behind a figure panel.
pub fn figure(
    id: FigureId,
    p: Option<f64>,
    grid: &GridArgs,
    sigma: f64,
    alphas: &[f64],
    tol: &QuadTolerance,
) -> std::result::Result<Table, CliError> {
    use FigureId::*;
    let pick = |preset: &[f64]| if alphas.is_empty() { preset.to_vec() } else { alphas.to_vec() };
    let (quantities, spec) = match id {
        Fig1a | Fig1b | Fig1c | Fig1d => {
            let plane = if matches!(id, Fig1a | Fig1c) { Plane::FarField } else { Plane::NearField };
            let p = p.unwrap_or(if matches!(id, Fig1a | Fig1b) { 0.1 } else { 2.0 });
            return Ok(cross_section(
                plane,
                Params::new(p, sigma).map_err(|e| CliError::Usage(e.to_string()))?,
                &pick(&CURVE_ALPHAS),
                tol,
            )?);
        }
        Fig1e => (vec![Quantity::VarQNorm], CRITERIA_GRID),
        Fig1f => (vec![Quantity::VarXNorm], CRITERIA_GRID),
        Fig2 => (vec![Quantity::Epr], CRITERIA_GRID),
        Mancini => (vec![Quantity::Mancini], CRITERIA_GRID),
        Fig3a => (vec![Quantity::NegentropyFfCond, Quantity::NegentropyNfCond], NEGENTROPY_GRID),
        Fig3b => (vec![Quantity::NegentropyFfMarg, Quantity::NegentropyNfMarg], NEGENTROPY_GRID),
        Fig3c => (vec![Quantity::NgCond], NEGENTROPY_GRID),
        Fig3d => (vec![Quantity::NgMarg], NEGENTROPY_GRID),
        SuppNgm => (vec![Quantity::NgMarg], LARGE_P_GRID),
    };
    let grid = grid_from(grid, Some(spec))?;
    Ok(sweep(&quantities, &grid, sigma, &pick(&SWEEP_ALPHAS), tol))
}

/// Origin-slice conditional densities of the SPDC model and of the Gaussian
/// model for each α, on a common coordinate grid.
fn cross_section(plane: Plane, params: Params, alphas: &[f64], tol: &QuadTolerance) -> Result<Table> {
    let slice = Form::ConditionalAt(0.0);
    let spdc = make_density(plane, Model::Spdc, slice, params, tol)?;
    let gaussians = alphas
        .iter()
        .map(|&alpha| make_density(plane, Model::Gaussian { alpha }, slice, params, tol))
        .collect::<Result<Vec<_>>>()?;
    let coord = match plane {
        Plane::FarField => "q",
        Plane::NearField => "x",
    };
    let mut columns = vec![coord.to_string(), "spdc".to_string()];
    columns.extend(alphas.iter().map(|a| format!("alpha_{a}")));
    let units = columns.iter().map(|c| (c.clone(), "dimensionless".to_string())).collect();

    let half = SECTION_HALF_WIDTH * spdc.variance()?.value.sqrt();
    let last = (SECTION_POINTS - 1) as f64;
    let rows = (0..SECTION_POINTS)
        .map(|i| {
            let x = -half + 2.0 * half * i as f64 / last;
            let mut values = vec![x, spdc.eval(&[x])?];
            for g in &gaussians {
                values.push(g.eval(&[x])?);
            }
            Ok(Row { values, error: None })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table { columns, units, rows })
}
