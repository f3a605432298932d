//! Table builders behind each CLI subcommand.

use rayon::prelude::*;

use qamp::amplifier::{
    amplify_closed_form, amplify_simulated, sweep_gain_probability, AmplifierConfig,
    CoincidencePolicy, QubitVacuumInput,
};
use qamp::diqkd::{self, ChshCollectiveBound};
use qamp::elements::{DetectorKind, DetectorModel};
use qamp::entanglement::{
    self, amplified_state, concurrence, entangling_efficiency, log_negativity, lossy_state,
    negativity, optimal_gain, tradeoff_curve, Measure,
};
use qamp::error::Error;
use qamp::optimize::{linspace, logspace};

use crate::config::{
    spaced_grid, AmplifyConfig, AttenuateConfig, DiqkdConfig, DistillConfig, GainSweepConfig,
};
use crate::table::{Column, Table, Value};
use crate::CliError;

fn core_err(e: Error) -> CliError {
    match e {
        Error::Param(m) | Error::Policy(m) => CliError::Config(m),
        other => CliError::Numeric(other.to_string()),
    }
}

pub fn gain_sweep(cfg: &GainSweepConfig) -> Result<Table, CliError> {
    if cfg.alpha_sq.is_empty() {
        return Err(CliError::Config("gain_sweep.alpha_sq is empty".into()));
    }
    if cfg.gain_min < 1.0 {
        return Err(CliError::Config("gain sweep needs gains >= 1".into()));
    }
    let gains = spaced_grid(
        cfg.gain_min,
        cfg.gain_max,
        cfg.gain_steps,
        &cfg.gain_spacing,
    )?;
    let mut table = Table::new(vec![
        Column::finite("alpha_sq"),
        Column::gain("gain"),
        Column::finite("reflectivity"),
        Column::finite("success_prob"),
        Column::finite("nominal_gain"),
    ]);
    for &a2 in &cfg.alpha_sq {
        let input = QubitVacuumInput::from_vacuum_weight(a2).map_err(core_err)?;
        for point in sweep_gain_probability(&input, &gains) {
            table.push(vec![
                a2.into(),
                point.gain.into(),
                point.reflectivity.into(),
                point.success_prob.into(),
                point.nominal_gain.into(),
            ]);
        }
    }
    Ok(table)
}

pub fn amplify(cfg: &AmplifyConfig) -> Result<Table, CliError> {
    let policy = match cfg.policy.as_str() {
        "dd-aa" => CoincidencePolicy::DdAaOnly,
        "feed-forward" => CoincidencePolicy::WithFeedForward,
        other => {
            return Err(CliError::Config(format!(
                "unknown policy {other:?} (expected \"dd-aa\" or \"feed-forward\")"
            )))
        }
    };
    let input = QubitVacuumInput::from_vacuum_weight(cfg.alpha_sq).map_err(core_err)?;
    let config = AmplifierConfig::new(cfg.reflectivity, policy).map_err(core_err)?;
    let closed = amplify_closed_form(&input, &config).map_err(core_err)?;
    let sim = amplify_simulated(&input, &config).map_err(core_err)?;
    let fidelity = (closed.output.alpha().conj() * sim.output.alpha()
        + closed.output.beta_h().conj() * sim.output.beta_h()
        + closed.output.beta_v().conj() * sim.output.beta_v())
    .norm_sqr();

    let mut table = Table::new(vec![
        Column::finite("reflectivity"),
        Column::finite("alpha_sq"),
        Column::finite("success_prob"),
        Column::gain("gain"),
        Column::finite("nominal_gain"),
        Column::finite("out_vacuum_weight"),
        Column::finite("out_qubit_weight"),
        Column::finite("sim_abs_dp"),
        Column::finite("sim_infidelity"),
    ]);
    table.push(vec![
        cfg.reflectivity.into(),
        cfg.alpha_sq.into(),
        closed.success_prob.into(),
        closed.gain.into(),
        closed.nominal_gain.into(),
        closed.output.vacuum_weight().into(),
        closed.output.qubit_weight().into(),
        (closed.success_prob - sim.success_prob).abs().into(),
        (1.0 - fidelity).into(),
    ]);
    Ok(table)
}

pub fn distill(cfg: &DistillConfig) -> Result<Table, CliError> {
    if cfg.transmissivities.is_empty() {
        return Err(CliError::Config("distill.transmissivities is empty".into()));
    }
    if cfg.gain_min < 1.0 {
        return Err(CliError::Config("distillation gains must be >= 1".into()));
    }
    match cfg.mode.as_str() {
        "curves" => distill_curves(cfg),
        "optimal" => distill_optimal(cfg),
        "summary" => distill_summary(cfg),
        other => Err(CliError::Config(format!(
            "unknown distill mode {other:?} (expected \"curves\", \"optimal\" or \"summary\")"
        ))),
    }
}

fn distill_curves(cfg: &DistillConfig) -> Result<Table, CliError> {
    let gains = spaced_grid(
        cfg.gain_min,
        cfg.gain_max,
        cfg.gain_steps,
        &cfg.gain_spacing,
    )?;
    let mut columns = vec![
        Column::finite("transmissivity"),
        Column::gain("gain"),
        Column::finite("n_norm"),
        Column::finite("concurrence"),
        Column::finite("negativity"),
        Column::finite("log_negativity"),
    ];
    if !cfg.skip_ree {
        columns.push(Column::finite("ree"));
    }
    columns.push(Column::finite("success_prob"));
    let mut table = Table::new(columns);

    let points: Vec<(f64, f64)> = cfg
        .transmissivities
        .iter()
        .flat_map(|&t| gains.iter().map(move |&g| (t, g)))
        .collect();
    let rows: Result<Vec<Vec<Value>>, CliError> = points
        .par_iter()
        .map(|&(t, g)| {
            let (state, n_norm) = amplified_state(t, g).map_err(core_err)?;
            let mut row: Vec<Value> = vec![
                t.into(),
                g.into(),
                n_norm.into(),
                concurrence(&state).into(),
                negativity(&state).into(),
                log_negativity(&state).into(),
            ];
            if !cfg.skip_ree {
                let s = entanglement::ree::relative_entropy_of_entanglement(&state)
                    .map_err(core_err)?;
                row.push(s.into());
            }
            row.push(
                entanglement::distill_success_probability(t, g)
                    .map_err(core_err)?
                    .into(),
            );
            Ok(row)
        })
        .collect();
    for row in rows? {
        table.push(row);
    }
    Ok(table)
}

fn distill_optimal(cfg: &DistillConfig) -> Result<Table, CliError> {
    let mut table = Table::new(vec![
        Column::finite("transmissivity"),
        Column::finite("g_opt_negativity"),
        Column::finite("g_opt_concurrence"),
        Column::finite("g_opt_ree"),
    ]);
    let rows: Result<Vec<Vec<Value>>, CliError> = cfg
        .transmissivities
        .par_iter()
        .map(|&t| {
            Ok(vec![
                t.into(),
                optimal_gain(t, Measure::Negativity)
                    .map_err(core_err)?
                    .into(),
                optimal_gain(t, Measure::Concurrence)
                    .map_err(core_err)?
                    .into(),
                optimal_gain(t, Measure::RelativeEntropy)
                    .map_err(core_err)?
                    .into(),
            ])
        })
        .collect();
    for row in rows? {
        table.push(row);
    }
    Ok(table)
}

fn distill_summary(cfg: &DistillConfig) -> Result<Table, CliError> {
    let mut table = Table::new(vec![
        Column::finite("transmissivity"),
        Column::finite("c_before"),
        Column::finite("n_before"),
        Column::finite("s_before"),
        Column::finite("c_opt"),
        Column::finite("n_opt"),
        Column::finite("s_opt"),
    ]);
    let rows: Result<Vec<Vec<Value>>, CliError> = cfg
        .transmissivities
        .par_iter()
        .map(|&t| {
            let before = lossy_state(t).map_err(core_err)?;
            let s_before =
                entanglement::ree::relative_entropy_of_entanglement(&before).map_err(core_err)?;
            let gc = optimal_gain(t, Measure::Concurrence).map_err(core_err)?;
            let gn = optimal_gain(t, Measure::Negativity).map_err(core_err)?;
            let gs = optimal_gain(t, Measure::RelativeEntropy).map_err(core_err)?;
            let c_opt = concurrence(&amplified_state(t, gc).map_err(core_err)?.0);
            let n_opt = negativity(&amplified_state(t, gn).map_err(core_err)?.0);
            let s_opt = entanglement::ree::relative_entropy_of_entanglement(
                &amplified_state(t, gs).map_err(core_err)?.0,
            )
            .map_err(core_err)?;
            Ok(vec![
                t.into(),
                concurrence(&before).into(),
                negativity(&before).into(),
                s_before.into(),
                c_opt.into(),
                n_opt.into(),
                s_opt.into(),
            ])
        })
        .collect();
    for row in rows? {
        table.push(row);
    }
    Ok(table)
}

pub fn attenuate(cfg: &AttenuateConfig) -> Result<Table, CliError> {
    if cfg.transmissivities.is_empty() {
        return Err(CliError::Config(
            "attenuate.transmissivities is empty".into(),
        ));
    }
    match cfg.mode.as_str() {
        "tradeoff" => {
            if cfg.nu_steps < 2 || cfg.nu_min <= 0.0 || cfg.nu_min >= 1.0 {
                return Err(CliError::Config("invalid attenuation grid".into()));
            }
            let nu_grid = logspace(cfg.nu_min, 1.0, cfg.nu_steps);
            let mut table = Table::new(vec![
                Column::finite("transmissivity"),
                Column::finite("nu"),
                Column::gain("gain"),
                Column::finite("negativity"),
                Column::finite("success_prob"),
            ]);
            let rows: Result<Vec<Vec<Vec<Value>>>, CliError> = cfg
                .transmissivities
                .par_iter()
                .map(|&t| {
                    let curve = tradeoff_curve(t, &nu_grid).map_err(core_err)?;
                    Ok(curve
                        .into_iter()
                        .map(|pt| {
                            vec![
                                t.into(),
                                pt.nu.into(),
                                pt.gain.into(),
                                pt.negativity.into(),
                                pt.success_prob.into(),
                            ]
                        })
                        .collect())
                })
                .collect();
            for group in rows? {
                for row in group {
                    table.push(row);
                }
            }
            Ok(table)
        }
        "efficiency" => {
            let mut table = Table::new(vec![
                Column::finite("transmissivity"),
                Column::finite("entangling_efficiency"),
                Column::finite("nu_star"),
                Column::gain("g_star"),
            ]);
            let rows: Result<Vec<Vec<Value>>, CliError> = cfg
                .transmissivities
                .par_iter()
                .map(|&t| {
                    let (e, (nu, g)) = entangling_efficiency(t).map_err(core_err)?;
                    Ok(vec![t.into(), e.into(), nu.into(), g.into()])
                })
                .collect();
            for row in rows? {
                table.push(row);
            }
            Ok(table)
        }
        other => Err(CliError::Config(format!(
            "unknown attenuate mode {other:?} (expected \"tradeoff\" or \"efficiency\")"
        ))),
    }
}

pub fn diqkd(cfg: &DiqkdConfig) -> Result<Table, CliError> {
    if cfg.dark_count_probs.is_empty() {
        return Err(CliError::Config("diqkd.dark_count_probs is empty".into()));
    }
    if cfg.loss_db_steps == 0 {
        return Err(CliError::Config("diqkd loss grid is empty".into()));
    }
    if cfg.r_grid_points == 0 {
        return Err(CliError::Config("diqkd reflectivity grid is empty".into()));
    }
    let loss_grid = linspace(cfg.loss_db_min, cfg.loss_db_max, cfg.loss_db_steps);
    let mut r_grid = vec![0.0];
    r_grid.extend(logspace(1e-3, 1.0, cfg.r_grid_points));
    let bound = ChshCollectiveBound {
        mu_weight: cfg.mu_weight,
    };

    let mut table = Table::new(vec![
        Column::finite("dark_count_prob"),
        Column::finite("loss_db"),
        Column::finite("r_star"),
        Column::finite("mu_cc"),
        Column::finite("qber"),
        Column::finite("chsh"),
        Column::finite("mu"),
        Column::finite("rate"),
    ]);
    let jobs: Vec<(f64, f64)> = cfg
        .dark_count_probs
        .iter()
        .flat_map(|&d| loss_grid.iter().map(move |&l| (d, l)))
        .collect();
    let rows: Result<Vec<Vec<Value>>, CliError> = jobs
        .par_iter()
        .map(|&(dark, loss)| {
            let params = qamp::diqkd::ProtocolParams {
                source: diqkd::SourceModel::new(cfg.pair_prob, cfg.source_truncation)
                    .map_err(core_err)?,
                channel_loss_db: loss,
                herald_detectors: DetectorModel::new(
                    DetectorKind::Bucket,
                    cfg.detector_efficiency,
                    dark,
                )
                .map_err(core_err)?,
                bell_detectors: DetectorModel::new(
                    DetectorKind::PhotonNumberResolving,
                    cfg.detector_efficiency,
                    0.0,
                )
                .map_err(core_err)?,
                amplifier_r: 0.0,
                settings: diqkd::MeasurementSettings::standard(),
            };
            let opt = diqkd::optimize_reflectivity(&params, &r_grid, &bound).map_err(core_err)?;
            // μ can be infinite when no conclusive event survives; report the
            // rate-relevant fields and clamp μ for the table
            let mu = if opt.point.mu.is_finite() {
                opt.point.mu
            } else {
                -1.0
            };
            Ok(vec![
                dark.into(),
                loss.into(),
                opt.r_star.into(),
                opt.point.mu_cc.into(),
                opt.point.qber.into(),
                opt.point.chsh.into(),
                mu.into(),
                opt.point.rate.into(),
            ])
        })
        .collect();
    for row in rows? {
        table.push(row);
    }
    Ok(table)
}
