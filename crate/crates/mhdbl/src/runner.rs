//! Run orchestration: the step loop, diagnostics cadence, and persistence of
//! the time series and snapshots.

use std::path::Path;

use crate::config::RunConfig;
use crate::diagnostics::{self, EnergyReport};
use crate::dynamics::{g_equation_residual, step};
use crate::error::Result;
use crate::grid::Grid;
use crate::snapshot::write_snapshot;
use crate::state::{check_envelope, make_initial_data, State};
use crate::MhdError;

#[derive(Debug)]
pub struct RunOutcome {
    pub final_state: State,
    pub history: Vec<EnergyReport>,
    pub positivity_lost: Option<f64>,
}

fn report_for(
    state: &State,
    prev: Option<&State>,
    grid: &Grid,
    tail: f64,
) -> Result<EnergyReport> {
    let (div_u, div_f) = crate::state::divergence_residuals(state, grid)?;
    Ok(EnergyReport {
        t: state.t,
        e: diagnostics::energy_e(state, grid)?,
        d: diagnostics::dissipation_d(state, grid)?,
        cstar: 0.0, // filled from the running history
        cancel_residual: diagnostics::cancellation_residual(state, grid)?,
        b3_residual: diagnostics::boundary_identity_b3(state, grid)?,
        b5_residual: diagnostics::boundary_identity_b5(state, grid)?,
        div_u_residual: div_u,
        div_f_residual: div_f,
        g_eq_residual: match prev {
            Some(p) => g_equation_residual(state, p, grid)?,
            None => 0.0,
        },
        min_env_ratio: check_envelope(state, grid)?.min_ratio,
        tail_mass: tail,
        norm_breakdown_u: diagnostics::sobolev_table(&state.u, 4, grid.ell(), grid)?,
        norm_breakdown_f: diagnostics::sobolev_table(&state.f, 4, grid.ell(), grid)?,
    })
}

fn write_timeseries(dir: &Path, history: &[EnergyReport]) -> Result<()> {
    let mut text = String::from(diagnostics::CSV_HEADER);
    text.push('\n');
    for row in history {
        text.push_str(&row.csv_row());
        text.push('\n');
    }
    std::fs::write(dir.join("timeseries.csv"), text)?;
    Ok(())
}

pub fn run(config: &RunConfig, output_dir: &Path) -> Result<RunOutcome> {
    std::fs::create_dir_all(output_dir)?;
    let grid = config.grid()?;
    let cfg = config.solver();
    cfg.validate()?;
    let mut state = make_initial_data(&config.initial_data(), &grid)?;
    let tail = diagnostics::tail_mass(state.c, state.delta, grid.ell(), grid.ymax());

    let mut history = vec![report_for(&state, None, &grid, tail)?];
    let mut positivity_lost = None;
    let mut steps = 0usize;

    while state.t < cfg.tend - 1e-12 {
        let prev = match step(&state, &cfg, &grid) {
            Ok(next) => std::mem::replace(&mut state, next),
            Err(MhdError::PositivityLost { t, .. }) => {
                positivity_lost = Some(t);
                break;
            }
            Err(e) => return Err(e),
        };
        steps += 1;
        if steps % cfg.output_every == 0 {
            history.push(report_for(&state, Some(&prev), &grid, tail)?);
            let (trace, _) = diagnostics::inequality_ratio(&history);
            history.last_mut().unwrap().cstar = *trace.last().unwrap();
        }
        if config.snapshot_every > 0 && steps % config.snapshot_every == 0 {
            write_snapshot(&output_dir.join(format!("snapshot_{steps:06}.bin")), &grid, &state)?;
        }
    }

    write_timeseries(output_dir, &history)?;
    write_snapshot(&output_dir.join("final.bin"), &grid, &state)?;
    if let Some(t) = positivity_lost {
        std::fs::write(
            output_dir.join("run_report.txt"),
            format!("positivity lost at t = {t:.16e}; run aborted before tend\n"),
        )?;
    } else {
        std::fs::write(
            output_dir.join("run_report.txt"),
            format!("reached tend = {:.16e} in {steps} steps\n", state.t),
        )?;
    }
    Ok(RunOutcome { final_state: state, history, positivity_lost })
}
