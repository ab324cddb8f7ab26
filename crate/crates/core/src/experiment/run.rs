//! Executing one configured experiment.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::adversary::{
    anne_bill_reduction, claim2_attack, claim2_attack_unchecked, claim2_monte_carlo, combine_received, combined_choice_guess,
    consistency_probabilities, detection_probability, full_collusion, path_tamperer, tamper_attack, Claim2Outcome,
    ChoiceVector, FlipChoiceShare, Passive,
};
use crate::analysis::{
    correctness_rate, epsilon_receiver, epsilon_sender, exact_distribution, inverse_power_of_two, monte_carlo,
    statistical_distance, weak_against_alice, weak_against_bob, weak_honest_bob, Estimate, Metric, ReportMeta,
    SecurityReport,
};
use crate::bits::{reconstruct_xor, BitString, ChoiceBit};
use crate::classical_ot::CyclicGroup;
use crate::error::{Error, Result};
use crate::experiment::config::{Attack, ExperimentConfig, Mode, Protocol};
use crate::linkot::LinkOt;
use crate::netsim::{exists_honest_path, Controller, CorruptionSet, NodeId, Transcript};
use crate::protocols::{
    run_combined, run_path_ot, run_weak_ot, tamper_check_run, Network, PathOtInstance, TamperConfig, Variant,
    WeakOtInstance,
};
use crate::rng::{Randomness, SeededRng};

/// Runs the experiment and returns its report. Declared invariants that
/// fail are listed in `violations`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<SecurityReport> {
    evaluate(config, true)
}

/// 0 when clean, 2 on a violated invariant, 1 on any error.
pub fn exit_code(result: &Result<SecurityReport>) -> i32 {
    match result {
        Ok(r) if r.is_clean() => 0,
        Ok(_) => 2,
        Err(_) => 1,
    }
}

pub fn report_json(report: &SecurityReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)? + "\n")
}

/// With `strict` off, the separation attack also runs on non-separating sets.
pub(crate) fn evaluate(config: &ExperimentConfig, strict: bool) -> Result<SecurityReport> {
    let network = config.network();
    let mut corruption = config.corruption()?;
    if config.attack == Some(Attack::Collude) {
        corruption = full_collusion(&network)?;
    }
    let mut report = SecurityReport::new(meta(config, &network, &corruption));
    let ideal = config.link_ot == LinkOt::Ideal;
    match (config.protocol, config.attack) {
        (Protocol::Path(v), None) => path_plain(config, v, &network, &corruption, ideal, &mut report)?,
        (Protocol::Path(v), Some(Attack::Claim2)) => claim2(config, v, &network, &corruption, strict, &mut report)?,
        (Protocol::Path(v), Some(Attack::Collude)) => collude(config, v, &network, &corruption, ideal, &mut report)?,
        (Protocol::Path(v), Some(Attack::Tamper)) => {
            let inst = instance(config, v)?;
            let other = if config.choice.value() { inst.s0 } else { inst.s1 };
            let m = match config.mode {
                Mode::Exact => Metric::exact(&exact_distribution(|rng| Ok(tamper_attack(config.flip_path, &inst, &network, rng)? == other))?.prob(&true)),
                Mode::MonteCarlo => Metric::estimate(&monte_carlo(config.trials, config.seed, |rng| {
                    Ok(tamper_attack(config.flip_path, &inst, &network, rng)? == other)
                })?),
            };
            report.detail("success", m);
        }
        (Protocol::Path(v), Some(Attack::Reduction)) => reduction(config, v, &network, ideal, &mut report)?,
        (Protocol::Combined, None) => combined(config, &network, &corruption, &mut report)?,
        (Protocol::Weak, None) => weak(config, &network, &corruption, ideal, &mut report)?,
        (Protocol::Tamper, None) => tamper(config, &network, None, &mut report)?,
        (Protocol::Tamper, Some(Attack::Tamper)) => tamper(config, &network, Some(config.flip_path), &mut report)?,
        (p, Some(a)) => {
            return Err(Error::config("attack", format!("{} does not apply to protocol {}", a.name(), p.name())));
        }
    }
    Ok(report)
}

fn meta(config: &ExperimentConfig, network: &Network, corruption: &CorruptionSet) -> ReportMeta {
    ReportMeta {
        protocol: match config.attack {
            Some(a) => format!("{}+{}", config.protocol.name(), a.name()),
            None => config.protocol.name().to_string(),
        },
        ell: config.ell,
        n: network.paths.len(),
        corrupt: corruption.corrupted().iter().map(|n| n.to_string()).collect(),
        controller: corruption.controller(),
        honest_path: exists_honest_path(&network.topology, &network.paths, corruption),
        internally_disjoint: network.paths.is_internally_disjoint(),
        mode: config.mode.name().to_string(),
        seed: (config.mode == Mode::MonteCarlo).then_some(config.seed),
    }
}

fn instance(config: &ExperimentConfig, variant: Variant) -> Result<PathOtInstance> {
    PathOtInstance::new(config.inputs[0], config.inputs[1], config.choice, variant)
}

fn random_instance(variant: Variant, ell: usize, rng: &mut dyn Randomness) -> Result<PathOtInstance> {
    let s0 = BitString::random(ell, rng)?;
    let s1 = BitString::random(ell, rng)?;
    PathOtInstance::new(s0, s1, ChoiceBit::random(rng), variant)
}

/// Node adjacent to Bob on path `j`, or Bob on a direct link.
fn last_relay(network: &Network, j: usize) -> &NodeId {
    let p = network.paths.path(j);
    if p.len() == 2 {
        network.bob()
    } else {
        &p[p.len() - 2]
    }
}

/// Node adjacent to Alice on path `j`, or Alice on a direct link.
fn first_relay(network: &Network, j: usize) -> &NodeId {
    let p = network.paths.path(j);
    if p.len() == 2 {
        network.alice()
    } else {
        &p[1]
    }
}

/// Which epsilons the variant promises to be zero: `(receiver, sender)`.
fn promised_zero(variant: Variant, network: &Network, corruption: &CorruptionSet) -> (bool, bool) {
    let honest_path = exists_honest_path(&network.topology, &network.paths, corruption);
    let bad = corruption.corrupted();
    let n = network.paths.len();
    match variant {
        Variant::Protocol1 => (honest_path, true),
        Variant::Protocol2 => (true, honest_path),
        Variant::Hybrid1 => ((0..n).any(|j| !bad.contains(last_relay(network, j))), true),
        Variant::Hybrid2 => (true, (0..n).any(|j| !bad.contains(first_relay(network, j)))),
    }
}

fn correctness_mc(config: &ExperimentConfig, variant: Variant, network: &Network) -> Result<Estimate> {
    let honest = CorruptionSet::honest(&network.topology);
    monte_carlo(config.trials, config.seed, |rng| {
        let inst = random_instance(variant, config.ell, rng)?;
        Ok(run_path_ot(&inst, network, &honest, None, rng)?.bob_output == inst.expected())
    })
}

fn require_all(report: &mut SecurityReport, e: &Estimate, what: &str) {
    report.require(e.successes == e.trials, format!("{what}: {} of {} trials", e.successes, e.trials));
}

fn path_plain(
    config: &ExperimentConfig,
    variant: Variant,
    network: &Network,
    corruption: &CorruptionSet,
    ideal: bool,
    report: &mut SecurityReport,
) -> Result<()> {
    if config.mode == Mode::MonteCarlo {
        let e = correctness_mc(config, variant, network)?;
        require_all(report, &e, "correctness");
        report.correctness_rate = Some(Metric::estimate(&e));
        return Ok(());
    }
    let ell = config.ell;
    let rate = correctness_rate(variant, network, ell)?;
    report.require(rate.is_one(), format!("correctness rate is {rate}"));
    report.correctness_rate = Some(Metric::exact(&rate));
    let er = epsilon_receiver(variant, network, corruption, ell)?;
    let ss = epsilon_sender(variant, network, corruption, ell)?;
    let hidden_max = ss.per_vector.iter().map(|(_, g)| g.hidden.clone()).max().unwrap_or_else(BigRational::zero);
    report.detail("sender_hidden_guess", Metric::exact(&hidden_max));
    if ideal {
        let (receiver_zero, sender_zero) = promised_zero(variant, network, corruption);
        if receiver_zero {
            report.require(er.is_zero(), format!("epsilon_receiver is {er}, expected 0"));
        }
        if sender_zero {
            report.require(ss.epsilon.is_zero(), format!("epsilon_sender is {}, expected 0", ss.epsilon));
        }
    }
    report.epsilon_receiver = Some(Metric::exact(&er));
    report.epsilon_sender = Some(Metric::exact(&ss.epsilon));
    Ok(())
}

fn claim2(
    config: &ExperimentConfig,
    variant: Variant,
    network: &Network,
    corruption: &CorruptionSet,
    strict: bool,
    report: &mut SecurityReport,
) -> Result<()> {
    let ell = config.ell;
    let separating = network.topology.separates(corruption.corrupted());
    report.detail("target", Metric::exact(&Claim2Outcome::target(ell)));
    report.detail("epsilon_floor", Metric::exact(&Claim2Outcome::epsilon_floor(ell)));
    match config.mode {
        Mode::Exact => {
            let outcome = if strict {
                claim2_attack(variant, network, corruption, ell)?
            } else {
                claim2_attack_unchecked(variant, network, corruption, ell)?
            };
            let (rb, sb) = (outcome.receiver_epsilon_bound(), outcome.sender_epsilon_bound());
            if separating {
                let floor = Claim2Outcome::epsilon_floor(ell);
                report.require(
                    rb >= floor || sb >= floor,
                    format!("neither epsilon bound ({rb}, {sb}) reaches {floor}"),
                );
            }
            report.detail("success", Metric::exact(&outcome.success));
            report.detail("unchosen_guess", Metric::exact(&outcome.unchosen_guess));
            report.detail("receiver_epsilon_bound", Metric::exact(&rb));
            report.detail("sender_epsilon_bound", Metric::exact(&sb));
        }
        Mode::MonteCarlo => {
            if strict || separating {
                let e = claim2_monte_carlo(variant, network, corruption, ell, config.trials, config.seed)?;
                report.detail("success", Metric::estimate(&e));
            }
        }
    }
    Ok(())
}

fn collude(
    config: &ExperimentConfig,
    variant: Variant,
    network: &Network,
    corruption: &CorruptionSet,
    ideal: bool,
    report: &mut SecurityReport,
) -> Result<()> {
    if !matches!(variant, Variant::Protocol1 | Variant::Hybrid1) {
        return Err(Error::config("attack", "collude targets p1 or hybrid1"));
    }
    let ell = config.ell;
    match config.mode {
        Mode::Exact => {
            let ss = epsilon_sender(variant, network, corruption, ell)?;
            let floor = inverse_power_of_two(ell);
            let hidden: Vec<_> = ss.per_vector.iter().map(|(_, g)| g.hidden.clone()).collect();
            let (lo, hi) = (hidden.iter().min().cloned(), hidden.iter().max().cloned());
            let (lo, hi) = (lo.unwrap_or_else(BigRational::zero), hi.unwrap_or_else(BigRational::zero));
            if ideal {
                report.require(ss.one_input_always_hidden(ell), format!("hidden input guessed with probability up to {hi}, expected {floor}"));
            }
            report.detail("hidden_guess_min", Metric::exact(&lo));
            report.detail("hidden_guess_max", Metric::exact(&hi));
            report.epsilon_sender = Some(Metric::exact(&ss.epsilon));
        }
        Mode::MonteCarlo => {
            let n = network.paths.len();
            let e = monte_carlo(config.trials, config.seed, |rng| {
                let inst = random_instance(variant, ell, rng)?;
                let d: Vec<ChoiceBit> = (0..n).map(|_| ChoiceBit::random(rng)).collect();
                let mut adversary = ChoiceVector::new(d.clone());
                let run = run_path_ot(&inst, network, corruption, Some(&mut adversary), rng)?;
                let learned = combine_received(&run.view, n)?;
                let target = if reconstruct_xor(&d)?.value() { inst.s1 } else { inst.s0 };
                Ok(learned == target)
            })?;
            report.detail("success", Metric::estimate(&e));
        }
    }
    Ok(())
}

fn reduction(
    config: &ExperimentConfig,
    variant: Variant,
    network: &Network,
    ideal: bool,
    report: &mut SecurityReport,
) -> Result<()> {
    let r = anne_bill_reduction(variant, network, &config.anne_paths, &config.bill_paths)
        .map_err(|e| Error::config("anne_paths", e.to_string()))?;
    let run = r.run(config.inputs[0], config.inputs[1], config.choice, None, None, &mut SeededRng::new(config.seed))?;
    report.detail("crossings", Metric::exact(&BigRational::from_integer(run.crossings.len().into())));
    match config.mode {
        Mode::Exact => {
            let rate = correctness_rate(variant, network, config.ell)?;
            let er = r.epsilon_receiver(config.ell)?;
            let es = r.sender_security(config.ell)?.epsilon;
            report.require(rate.is_one(), format!("correctness rate is {rate}"));
            if ideal {
                report.require(er.is_zero(), format!("dishonest anne: epsilon_receiver is {er}"));
                report.require(es.is_zero(), format!("dishonest bill: epsilon_sender is {es}"));
            }
            report.correctness_rate = Some(Metric::exact(&rate));
            report.epsilon_receiver = Some(Metric::exact(&er));
            report.epsilon_sender = Some(Metric::exact(&es));
        }
        Mode::MonteCarlo => {
            let e = monte_carlo(config.trials, config.seed, |rng| {
                let i = random_instance(variant, config.ell, rng)?;
                Ok(r.run(i.s0, i.s1, i.choice, None, None, rng)?.output == i.expected())
            })?;
            require_all(report, &e, "correctness");
            report.correctness_rate = Some(Metric::estimate(&e));
        }
    }
    Ok(())
}

fn combined(
    config: &ExperimentConfig,
    network: &Network,
    corruption: &CorruptionSet,
    report: &mut SecurityReport,
) -> Result<()> {
    let group: CyclicGroup = config.group;
    let against_bob = corruption.with_controller(Controller::Alice);
    let inst = instance(config, Variant::Protocol1)?;
    match config.mode {
        Mode::Exact => {
            let ok = exact_distribution(|rng| {
                Ok(run_combined(&inst, network, &CorruptionSet::honest(&network.topology), &group, None, rng)?.bob_output
                    == inst.expected())
            })?
            .prob(&true);
            report.require(ok.is_one(), format!("correctness rate is {ok}"));
            report.correctness_rate = Some(Metric::exact(&ok));
            let views = |c: ChoiceBit| {
                let i = PathOtInstance { choice: c, ..inst };
                exact_distribution(|rng| {
                    let run = run_combined(&i, network, &against_bob, &group, None, rng)?;
                    Ok((run.view, run.candidate_a.view))
                })
            };
            let (d0, d1) = (views(ChoiceBit::ZERO)?, views(ChoiceBit::ONE)?);
            let full = statistical_distance(&d0.map(|(v, _)| v.clone()), &d1.map(|(v, _)| v.clone()));
            let a = statistical_distance(&d0.map(|(_, a)| a.clone()), &d1.map(|(_, a)| a.clone()));
            if exists_honest_path(&network.topology, &network.paths, corruption) {
                report.require(a.is_zero(), format!("candidate A view distance is {a}, expected 0"));
            }
            report.detail("candidate_a_distance", Metric::exact(&a));
            report.epsilon_receiver = Some(Metric::exact(&full));
        }
        Mode::MonteCarlo => {
            let honest = CorruptionSet::honest(&network.topology);
            let e = monte_carlo(config.trials, config.seed, |rng| {
                let i = random_instance(Variant::Protocol1, config.ell, rng)?;
                Ok(run_combined(&i, network, &honest, &group, None, rng)?.bob_output == i.expected())
            })?;
            require_all(report, &e, "correctness");
            report.correctness_rate = Some(Metric::estimate(&e));
            let n = network.paths.len();
            let guess = monte_carlo(config.trials, config.seed, |rng| {
                let i = random_instance(Variant::Protocol1, config.ell, rng)?;
                let run = run_combined(&i, network, &against_bob, &group, None, rng)?;
                Ok(combined_choice_guess(&run.view, n, &group, rng)? == i.choice)
            })?;
            report.detail("choice_guess", Metric::estimate(&guess));
        }
    }
    Ok(())
}

fn weak(
    config: &ExperimentConfig,
    network: &Network,
    corruption: &CorruptionSet,
    ideal: bool,
    report: &mut SecurityReport,
) -> Result<()> {
    let ell = config.ell;
    let honest = CorruptionSet::honest(&network.topology);
    let random_weak = |rng: &mut dyn Randomness| -> Result<WeakOtInstance> {
        let mut s = [[BitString::zeros(ell)?; 2]; 2];
        for x in s.iter_mut().flatten() {
            *x = BitString::random(ell, rng)?;
        }
        WeakOtInstance::new(s, ChoiceBit::random(rng), ChoiceBit::random(rng))
    };
    if config.mode == Mode::MonteCarlo {
        let e = monte_carlo(config.trials, config.seed, |rng| {
            let i = random_weak(rng)?;
            Ok(run_weak_ot(&i, network, &honest, None, rng)?.outputs == i.expected())
        })?;
        require_all(report, &e, "correctness");
        report.correctness_rate = Some(Metric::estimate(&e));
        return Ok(());
    }
    let rate = exact_distribution(|rng| {
        let i = random_weak(rng)?;
        Ok(run_weak_ot(&i, network, &honest, None, rng)?.outputs == i.expected())
    })?
    .prob(&true);
    report.require(rate.is_one(), format!("correctness rate is {rate}"));
    report.correctness_rate = Some(Metric::exact(&rate));

    let count = |x: usize| Metric::exact(&BigRational::from_integer(x.into()));
    let bob = weak_honest_bob(network, ell)?;
    let vs_alice = weak_against_alice(network, corruption, ell)?;
    let vs_bob = weak_against_bob(network, corruption, ell)?;
    if ideal {
        report.require(bob.min_determined == 2 && bob.max_determined == 2, "honest bob does not learn exactly two inputs");
        report.require(vs_alice.max_determined <= 3, format!("bob's side pins down {} inputs", vs_alice.max_determined));
        report.require(vs_alice.min_uniform >= 1, "some view leaves no input uniform");
        report.require(vs_bob.c_prime_distance.is_zero(), format!("c' distance is {}", vs_bob.c_prime_distance));
        if exists_honest_path(&network.topology, &network.paths, corruption) {
            report.require(vs_bob.c_distance.is_zero(), format!("c distance is {}", vs_bob.c_distance));
        }
    }
    report.detail("honest_bob_determined", count(bob.max_determined));
    report.detail("bob_side_max_determined", count(vs_alice.max_determined));
    report.detail("bob_side_min_uniform", count(vs_alice.min_uniform));
    report.detail("c_distance", Metric::exact(&vs_bob.c_distance));
    report.detail("c_prime_distance", Metric::exact(&vs_bob.c_prime_distance));
    Ok(())
}

fn tamper(config: &ExperimentConfig, network: &Network, flip: Option<usize>, report: &mut SecurityReport) -> Result<()> {
    let tc = TamperConfig::new(config.k, config.open_fraction).map_err(|e| Error::config("k", e.to_string()))?;
    let m = tc.opened();
    let inst = instance(config, Variant::Protocol1)?;
    let corruption = match flip {
        Some(j) => path_tamperer(network, j).map_err(|e| Error::config("flip_path", e.to_string()))?,
        None => CorruptionSet::honest(&network.topology),
    };
    report.detail("opened", Metric::exact(&BigRational::from_integer(m.into())));
    match config.mode {
        Mode::Exact => {
            let q = match flip {
                Some(j) => consistency_probabilities(&inst, network, &corruption, tc.k, || FlipChoiceShare::always(j))?,
                None => consistency_probabilities(&inst, network, &corruption, tc.k, || Passive)?,
            };
            let caught = detection_probability(&q, m)?;
            match flip {
                Some(_) => {
                    let expected = BigRational::one() - inverse_power_of_two(config.ell * m);
                    report.require(caught == expected, format!("detection is {caught}, expected {expected}"));
                    report.detail("detection_probability", Metric::exact(&caught));
                }
                None => {
                    report.require(caught.is_zero(), format!("honest runs abort with probability {caught}"));
                    report.detail("abort_probability", Metric::exact(&caught));
                }
            }
        }
        Mode::MonteCarlo => {
            let e = monte_carlo(config.trials, config.seed, |rng| {
                let mut adversary = flip.map(FlipChoiceShare::always);
                let adv = adversary.as_mut().map(|a| a as &mut dyn crate::netsim::Adversary);
                match tamper_check_run(&inst, network, &corruption, &tc, adv, rng) {
                    Ok(out) => Ok(flip.is_none() && out.output == inst.expected()),
                    Err(Error::Abort { .. }) => Ok(flip.is_some()),
                    Err(e) => Err(e),
                }
            })?;
            match flip {
                Some(_) => report.detail("detection_probability", Metric::estimate(&e)),
                None => {
                    require_all(report, &e, "honest tamper check");
                    report.correctness_rate = Some(Metric::estimate(&e));
                }
            }
        }
    }
    Ok(())
}

/// One execution under the configured corruption, tape seeded by `seed`.
pub fn sample_transcript(config: &ExperimentConfig) -> Result<Transcript> {
    let network = config.network();
    let corruption = config.corruption()?;
    let rng = &mut SeededRng::new(config.seed);
    Ok(match config.protocol {
        Protocol::Path(v) => run_path_ot(&instance(config, v)?, &network, &corruption, None, rng)?.transcript,
        Protocol::Tamper => run_path_ot(&instance(config, Variant::Protocol1)?, &network, &corruption, None, rng)?.transcript,
        Protocol::Combined => {
            run_combined(&instance(config, Variant::Protocol1)?, &network, &corruption, &config.group, None, rng)?.transcript
        }
        Protocol::Weak => {
            let s = [[config.inputs[0], config.inputs[1]], [config.inputs[2], config.inputs[3]]];
            let inst = WeakOtInstance::new(s, config.choice, config.choice2)?;
            run_weak_ot(&inst, &network, &corruption, None, rng)?.transcript
        }
    })
}
