//! Built-in trust check: re-runs the closed-form versus brute-force
//! equivalence suites and reports the worst deviation of each.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qamp::amplifier::{
    amplify_closed_form, amplify_simulated, reflectivity_for_gain, AmplifierConfig,
    QubitVacuumInput,
};
use qamp::entanglement::{self, concurrence, negativity, oracle};

use crate::config::CheckConfig;
use crate::table::{Column, Table, Value};
use crate::CliError;

struct CheckLine {
    name: &'static str,
    samples: usize,
    max_deviation: f64,
    tolerance: f64,
}

fn random_input(rng: &mut ChaCha8Rng) -> QubitVacuumInput<f64> {
    let mut amp = || Complex::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
    QubitVacuumInput::from_unnormalized(amp(), amp(), amp()).expect("nonzero with prob 1")
}

pub fn run(cfg: &CheckConfig) -> Result<(Table, bool), CliError> {
    let mut lines = Vec::new();

    // closed form vs full Fock evolution
    {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut max_dp: f64 = 0.0;
        let mut max_infid: f64 = 0.0;
        for _ in 0..cfg.samples {
            let input = random_input(&mut rng);
            let r: f64 = rng.gen();
            let config = AmplifierConfig::dd_aa(r).map_err(|e| CliError::Numeric(e.to_string()))?;
            let cf = amplify_closed_form(&input, &config)
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            let sim =
                amplify_simulated(&input, &config).map_err(|e| CliError::Numeric(e.to_string()))?;
            max_dp = max_dp.max((cf.success_prob - sim.success_prob).abs());
            let fid = (cf.output.alpha().conj() * sim.output.alpha()
                + cf.output.beta_h().conj() * sim.output.beta_h()
                + cf.output.beta_v().conj() * sim.output.beta_v())
            .norm_sqr();
            max_infid = max_infid.max(1.0 - fid);
        }
        lines.push(CheckLine {
            name: "amplifier_success_prob",
            samples: cfg.samples,
            max_deviation: max_dp,
            tolerance: 1e-10,
        });
        lines.push(CheckLine {
            name: "amplifier_output_fidelity",
            samples: cfg.samples,
            max_deviation: max_infid,
            tolerance: 1e-10,
        });
    }

    // entanglement measures vs 4x4 density-matrix oracles
    {
        let states = oracle::sample_states::<f64>(cfg.samples, cfg.seed ^ 0xa5a5_a5a5);
        let mut max_dev: f64 = 0.0;
        for s in &states {
            let rho = s.density_matrix();
            let dc = (concurrence(s)
                - oracle::concurrence_dm(&rho).map_err(|e| CliError::Numeric(e.to_string()))?)
            .abs();
            let dn = (negativity(s)
                - oracle::negativity_dm(&rho).map_err(|e| CliError::Numeric(e.to_string()))?)
            .abs();
            max_dev = max_dev.max(dc).max(dn);
        }
        lines.push(CheckLine {
            name: "entanglement_measures",
            samples: states.len(),
            max_deviation: max_dev,
            tolerance: 1e-10,
        });
    }

    // relative entropy of entanglement: two independent search paths
    {
        let mut max_dev: f64 = 0.0;
        let mut count = 0;
        for &t in &[0.4, 0.8] {
            for &g in &[1.0, 3.0] {
                let (state, _) = amplified_state_checked(t, g)?;
                let a = entanglement::ree::relative_entropy_of_entanglement(&state)
                    .map_err(|e| CliError::Numeric(e.to_string()))?;
                let b = entanglement::ree::relative_entropy_of_entanglement_scan(&state)
                    .map_err(|e| CliError::Numeric(e.to_string()))?;
                max_dev = max_dev.max((a - b).abs());
                count += 1;
            }
        }
        lines.push(CheckLine {
            name: "ree_two_paths",
            samples: count,
            max_deviation: max_dev,
            tolerance: 1e-5,
        });
    }

    // distillation heralding probability vs the quoted expression
    {
        let mut max_dev: f64 = 0.0;
        let mut count = 0;
        for &t in &[0.25, 0.75] {
            for &g in &[1.0, 2.0, 6.0] {
                let (r, _) = reflectivity_for_gain(g);
                let input = QubitVacuumInput::from_unnormalized(
                    Complex::new((1.0 - t / 2.0f64).sqrt(), 0.0),
                    Complex::new((t / 2.0f64).sqrt(), 0.0),
                    Complex::new(0.0, 0.0),
                )
                .map_err(|e| CliError::Numeric(e.to_string()))?;
                let config =
                    AmplifierConfig::dd_aa(r).map_err(|e| CliError::Numeric(e.to_string()))?;
                let sim = amplify_simulated(&input, &config)
                    .map_err(|e| CliError::Numeric(e.to_string()))?;
                let expect = entanglement::distill_success_probability(t, g)
                    .map_err(|e| CliError::Numeric(e.to_string()))?;
                max_dev = max_dev.max((sim.success_prob - expect).abs());
                count += 1;
            }
        }
        lines.push(CheckLine {
            name: "distill_success_prob",
            samples: count,
            max_deviation: max_dev,
            tolerance: 1e-8,
        });
    }

    let mut table = Table::new(vec![
        Column::finite("check"),
        Column::finite("samples"),
        Column::finite("max_deviation"),
        Column::finite("tolerance"),
        Column::finite("pass"),
    ]);
    let mut all_pass = true;
    for line in &lines {
        let pass = line.max_deviation <= line.tolerance;
        all_pass &= pass;
        table.push(vec![
            Value::Text(line.name.into()),
            Value::Num(line.samples as f64),
            Value::Num(line.max_deviation),
            Value::Num(line.tolerance),
            Value::Text(if pass { "yes".into() } else { "no".into() }),
        ]);
        eprintln!(
            "check {:<28} samples {:>5}  max deviation {:>12.3e}  tolerance {:>8.0e}  {}",
            line.name,
            line.samples,
            line.max_deviation,
            line.tolerance,
            if pass { "ok" } else { "FAIL" }
        );
    }
    Ok((table, all_pass))
}

fn amplified_state_checked(
    t: f64,
    g: f64,
) -> Result<(entanglement::AmplitudeDampedState<f64>, f64), CliError> {
    entanglement::amplified_state(t, g).map_err(|e| CliError::Numeric(e.to_string()))
}
