//! Dishonest-receiver strategies: what gets measured and stored while the
//! qubits are in flight, and the optimal post-reveal guessing with its
//! exact per-bit success probabilities. Small instances also admit an
//! exact computation of the hashed string's distance from uniform.

use std::str::FromStr;

use rand::Rng;

use crate::attack_opt::{symmetrize, AttackParams};
use crate::bits::BitString;
use crate::channels::{KrausChannel, MeasurementFamily};
use crate::distinguish::{
    helstrom_povm, helstrom_weighted, nonuniformity, pg_given_basis, CqEnsemble, StorageAttack,
};
use crate::error::{Error, Result};
use crate::hashing::AffineHash;
use crate::mat::CMat;
use crate::qstate::{bb84_state, Basis, DensityMatrix};

/// Probability that a weak pulse of mean photon number mu carries more
/// than one photon, in the small-mu approximation.
fn multi_photon_prob(mu: f64) -> f64 {
    mu / 2.0
}

/// Per-qubit processing applied by a dishonest receiver before the bases
/// are revealed.
#[derive(Clone, Debug, PartialEq)]
pub enum Strategy {
    /// Keep the qubit in storage that depolarizes with survival rate r.
    Store { r: f64 },
    /// Measure immediately in the intermediate basis; keep the outcome.
    Breidbart,
    /// Measure immediately in a fixed coding basis; keep the outcome.
    BasisMeasure(Basis),
    /// Partial measurement from the optimizer family, then noisy storage.
    Partial { params: AttackParams<f64>, r: f64 },
    /// Split multi-photon pulses: learn the bit outright on a fraction
    /// ~mu/2 of slots, fall back to the intermediate basis elsewhere.
    BeamSplit { mu: f64 },
    /// Independent per-slot choice.
    Hybrid(Vec<Strategy>),
}

impl Strategy {
    pub fn validate(&self, n_slots: usize) -> Result<()> {
        match self {
            Strategy::Store { r } | Strategy::Partial { r, .. } => {
                if !(0.0..=1.0).contains(r) {
                    return Err(Error::InvalidParam(format!("storage rate {r} outside [0, 1]")));
                }
            }
            Strategy::BasisMeasure(Basis::Breidbart) => {
                return Err(Error::InvalidParam(
                    "basis measurement takes a coding basis; use the breidbart strategy".into(),
                ))
            }
            Strategy::BeamSplit { mu } => {
                if !(0.0..=1.0).contains(mu) {
                    return Err(Error::InvalidParam(format!("mean photon number {mu} outside [0, 1]")));
                }
            }
            Strategy::Hybrid(list) => {
                if list.len() != n_slots {
                    return Err(Error::InvalidParam(format!(
                        "hybrid list has {} entries for {n_slots} slots",
                        list.len()
                    )));
                }
                for s in list {
                    if matches!(s, Strategy::Hybrid(_)) {
                        return Err(Error::InvalidParam("hybrid lists do not nest".into()));
                    }
                    s.validate(1)?;
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn slot(&self, i: usize) -> &Strategy {
        match self {
            Strategy::Hybrid(list) => &list[i],
            other => other,
        }
    }

    /// Measurement and storage channel of a non-hybrid slot strategy;
    /// beam-split slots are resolved separately because their behavior is
    /// a classical mixture of two attacks.
    fn attack(&self) -> Result<StorageAttack<f64>> {
        Ok(match self {
            Strategy::Store { r } => StorageAttack::plain(KrausChannel::depolarize(*r)?),
            Strategy::Breidbart => {
                StorageAttack::full_measurement(MeasurementFamily::projective(Basis::Breidbart))
            }
            Strategy::BasisMeasure(b) => {
                StorageAttack::full_measurement(MeasurementFamily::projective(*b))
            }
            Strategy::Partial { params, r } => StorageAttack {
                meas: symmetrize(&params.operator())?,
                noise: KrausChannel::depolarize(*r)?,
            },
            Strategy::BeamSplit { .. } => {
                StorageAttack::full_measurement(MeasurementFamily::projective(Basis::Breidbart))
            }
            Strategy::Hybrid(_) => {
                return Err(Error::InvalidParam("hybrid has no single slot attack".into()))
            }
        })
    }

    /// A-priori per-qubit guessing value once `basis` is revealed.
    pub fn pg(&self, i: usize, basis: Basis) -> Result<f64> {
        let s = self.slot(i);
        if let Strategy::BeamSplit { mu } = s {
            let p2 = multi_photon_prob(*mu);
            return Ok(p2 + (1.0 - p2) * pg_given_basis(&s.attack()?, basis));
        }
        Ok(pg_given_basis(&s.attack()?, basis))
    }
}

impl FromStr for Strategy {
    type Err = Error;

    /// Descriptors like `store:r=0.7`, `breidbart`, `basis:+`, `basis:x`,
    /// `partial:alpha=0.3,r=0.9`, `beamsplit:mu=0.2`.
    fn from_str(text: &str) -> Result<Self> {
        let (kind, args) = text.split_once(':').unwrap_or((text, ""));
        if kind == "basis" {
            return match args {
                "+" => Ok(Strategy::BasisMeasure(Basis::Computational)),
                "x" => Ok(Strategy::BasisMeasure(Basis::Hadamard)),
                other => Err(Error::Parse(format!("unknown basis {other:?}"))),
            };
        }
        let mut map = std::collections::BTreeMap::new();
        for part in args.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
            let value: f64 = v
                .parse()
                .map_err(|_| Error::Parse(format!("bad number {v:?} in {text:?}")))?;
            map.insert(k.to_string(), value);
        }
        let take = |map: &mut std::collections::BTreeMap<String, f64>, key: &str| {
            map.remove(key)
                .ok_or_else(|| Error::Parse(format!("missing {key} in {text:?}")))
        };
        let strategy = match kind {
            "store" => Strategy::Store { r: take(&mut map, "r")? },
            "breidbart" => Strategy::Breidbart,
            "partial" => {
                let alpha = take(&mut map, "alpha")?;
                // Direction defaults to the symmetric optimum x = z.
                let c = std::f64::consts::FRAC_1_SQRT_2;
                Strategy::Partial {
                    params: AttackParams::new(alpha, c, 0.0, c)?,
                    r: take(&mut map, "r")?,
                }
            }
            "beamsplit" => Strategy::BeamSplit { mu: take(&mut map, "mu")? },
            other => return Err(Error::Parse(format!("unknown strategy {other:?}"))),
        };
        if !map.is_empty() {
            return Err(Error::Parse(format!("unused arguments in {text:?}")));
        }
        strategy.validate(1)?;
        Ok(strategy)
    }
}

/// What one slot leaves behind after the storage phase.
#[derive(Clone, Debug)]
pub struct SlotRecord {
    pub meas: MeasurementFamily<f64>,
    pub noise: KrausChannel<f64>,
    /// Sampled measurement outcome, if the slot measurement has more than
    /// one operator.
    pub outcome: Option<usize>,
    /// Post-measurement stored state after noise, if anything survives.
    pub state: Option<DensityMatrix<f64>>,
    /// Beam-split multi-photon bonus: outcomes of one copy measured in
    /// each coding basis, (computational, hadamard).
    pub split_outcomes: Option<(u8, u8)>,
}

#[derive(Clone, Debug)]
pub struct StoredLab {
    pub slots: Vec<SlotRecord>,
}

fn sample_index<R: Rng>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut draw = rng.gen_range(0.0..total);
    for (i, w) in weights.iter().enumerate() {
        if draw < *w {
            return i;
        }
        draw -= w;
    }
    weights.len() - 1
}

/// Run the strategy over the transmitted qubits.
pub fn storage_phase<R: Rng>(
    strategy: &Strategy,
    qubits: &[(u8, Basis)],
    rng: &mut R,
) -> Result<StoredLab> {
    strategy.validate(qubits.len())?;
    let mut slots = Vec::with_capacity(qubits.len());
    for (i, &(bit, basis)) in qubits.iter().enumerate() {
        let s = strategy.slot(i);
        if let Strategy::BeamSplit { mu } = s {
            if rng.gen_bool(multi_photon_prob(*mu)) {
                // One copy per coding basis: the matching one is exact, the
                // conjugate one is uniform.
                let matching = bit;
                let conjugate = u8::from(rng.gen_bool(0.5));
                let (plus, times) = match basis {
                    Basis::Computational => (matching, conjugate),
                    Basis::Hadamard => (conjugate, matching),
                    Basis::Breidbart => unreachable!("not a coding basis"),
                };
                slots.push(SlotRecord {
                    meas: MeasurementFamily::trivial(),
                    noise: KrausChannel::depolarize(0.0)?,
                    outcome: None,
                    state: None,
                    split_outcomes: Some((plus, times)),
                });
                continue;
            }
        }
        let attack = s.attack()?;
        let sigma = bb84_state::<f64>(bit, basis)?;
        let records = crate::channels::measure_and_store(&attack.meas, &attack.noise, &sigma);
        let weights: Vec<f64> = records.iter().map(|rec| rec.weight).collect();
        let pick = sample_index(&weights, rng);
        let rec = &records[pick];
        slots.push(SlotRecord {
            meas: attack.meas.clone(),
            noise: attack.noise.clone(),
            outcome: rec.outcome,
            state: rec.state.clone(),
            split_outcomes: None,
        });
    }
    Ok(StoredLab { slots })
}

/// Conditional branch data for one slot once `basis` is revealed: priors
/// and normalized stored states for the two possible bit values.
fn slot_conditionals(rec: &SlotRecord, basis: Basis) -> Result<(f64, CMat<f64>, f64, CMat<f64>)> {
    let k = rec.outcome.unwrap_or(0);
    let f = &rec.meas.operators()[k];
    let mut weights = [0.0; 2];
    let mut states = Vec::with_capacity(2);
    for bit in 0..2u8 {
        let sigma = bb84_state::<f64>(bit, basis)?;
        let branch = rec.noise.apply_raw(&f.sandwich(sigma.matrix()));
        let w = branch.trace().re;
        weights[bit as usize] = 0.5 * w;
        states.push(if w > 1e-14 {
            branch.scale_re(1.0 / w)
        } else {
            CMat::identity(2).scale_re(0.5)
        });
    }
    let total = weights[0] + weights[1];
    let s1 = states.pop().unwrap();
    let s0 = states.pop().unwrap();
    Ok((weights[0] / total, s0, weights[1] / total, s1))
}

/// Optimal guess for each selected slot after the bases are revealed,
/// together with the exact per-slot success probability of that optimal
/// measurement. The guess itself is sampled from the stored state; the
/// probabilities are analytic.
pub fn post_reveal_guess<R: Rng>(
    lab: &StoredLab,
    theta: &[Basis],
    indices: &[usize],
    rng: &mut R,
) -> Result<(BitString, Vec<f64>)> {
    let mut guess = BitString::zeros(indices.len());
    let mut probs = Vec::with_capacity(indices.len());
    for (slot_pos, &i) in indices.iter().enumerate() {
        let rec = &lab.slots[i];
        if let Some((plus, times)) = rec.split_outcomes {
            let g = match theta[i] {
                Basis::Computational => plus,
                Basis::Hadamard => times,
                Basis::Breidbart => return Err(Error::InvalidParam("not a coding basis".into())),
            };
            guess.set(slot_pos, g == 1);
            probs.push(1.0);
            continue;
        }
        let (q0, rho0, q1, rho1) = slot_conditionals(rec, theta[i])?;
        probs.push(helstrom_weighted(q0, &rho0, q1, &rho1));
        let g = match &rec.state {
            Some(state) => {
                let (m0, _) = helstrom_povm(q0, &rho0, q1, &rho1);
                let p0 = m0.mul(state.matrix()).trace().re.clamp(0.0, 1.0);
                !rng.gen_bool(p0)
            }
            // Nothing stored: guess the likelier bit, ties to 0.
            None => q1 > q0,
        };
        guess.set(slot_pos, g);
    }
    Ok((guess, probs))
}

/// The basis whose substring the strategy guesses better; ties resolve to
/// the computational (`+`) basis.
pub fn choice_bit_cprime(strategy: &Strategy, n_slots: usize) -> Result<Basis> {
    strategy.validate(n_slots)?;
    let mut log_plus = 0.0f64;
    let mut log_times = 0.0f64;
    for i in 0..n_slots {
        log_plus += strategy.pg(i, Basis::Computational)?.ln();
        log_times += strategy.pg(i, Basis::Hadamard)?.ln();
    }
    Ok(if log_plus >= log_times - 1e-12 {
        Basis::Computational
    } else {
        Basis::Hadamard
    })
}

/// Uncertainty value of the beam-splitting attack:
/// 1/2 + 1/(2 sqrt 2) + mu (1 - 1/sqrt 2)/4.
pub fn beam_split_delta(mu: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::InvalidParam(format!("mean photon number {mu} outside [0, 1]")));
    }
    let p2 = multi_photon_prob(mu);
    Ok(p2 + (1.0 - p2) * crate::distinguish::BREIDBART_DELTA)
}

/// Full record state of one slot for bit value `bit`: outcome register as
/// diagonal blocks, stored state inside each block.
fn slot_record_state(s: &Strategy, basis: Basis, bit: u8) -> Result<DensityMatrix<f64>> {
    if let Strategy::BeamSplit { mu } = s {
        // Blocks: [knows bit 0, knows bit 1, breidbart outcome 0, outcome 1].
        let p2 = multi_photon_prob(*mu);
        let base = slot_record_state(&Strategy::Breidbart, basis, bit)?;
        let mut m = CMat::zeros(4);
        m[(bit as usize, bit as usize)] = num_complex::Complex::new(p2, 0.0);
        for i in 0..2 {
            m[(2 + i, 2 + i)] = base.matrix()[(i, i)].scale(1.0 - p2);
        }
        return DensityMatrix::new(m);
    }
    let attack = s.attack()?;
    let sigma = bb84_state::<f64>(bit, basis)?;
    if attack.meas.len() == 1 {
        return DensityMatrix::new(attack.noise.apply_raw(sigma.matrix()));
    }
    let fully_depolarized = match s {
        Strategy::Breidbart | Strategy::BasisMeasure(_) => true,
        Strategy::Partial { r, .. } => *r == 0.0,
        _ => false,
    };
    if fully_depolarized {
        // Post-measurement storage is uniform for every outcome, so only
        // the classical outcome register carries information.
        let k = attack.meas.len();
        let mut m = CMat::zeros(k);
        for (i, f) in attack.meas.operators().iter().enumerate() {
            let w = f.sandwich(sigma.matrix()).trace().re;
            m[(i, i)] = num_complex::Complex::new(w, 0.0);
        }
        return DensityMatrix::new(m);
    }
    // Outcome register tensored with the stored branch state: block k holds
    // noise(F_k sigma F_k^dagger), whose trace is the branch weight.
    let k = attack.meas.len();
    let mut m = CMat::zeros(2 * k);
    for (i, f) in attack.meas.operators().iter().enumerate() {
        let block = attack.noise.apply_raw(&f.sandwich(sigma.matrix()));
        for a in 0..2 {
            for b in 0..2 {
                m[(2 * i + a, 2 * i + b)] = block[(a, b)];
            }
        }
    }
    DensityMatrix::new(m)
}

/// Exact distance from uniform of the hashed substring, given everything
/// the strategy retains, computed by exhaustive enumeration. Only viable
/// for a handful of qubits and one or two output bits.
pub fn exact_string_distinguisher(
    strategy: &Strategy,
    theta: &[Basis],
    hash: &AffineHash,
) -> Result<f64> {
    let m = theta.len();
    strategy.validate(m)?;
    if m > 8 {
        return Err(Error::Dimension(format!("{m} slots exceed the exhaustive cap of 8")));
    }
    let ell = hash.output_bits();
    if ell > 2 {
        return Err(Error::Dimension(format!("{ell} hash bits exceed the exhaustive cap of 2")));
    }
    if hash.input_bits() != m {
        return Err(Error::InvalidParam("hash input size differs from slot count".into()));
    }

    let prior = 1.0 / (1u64 << m) as f64;
    let mut by_label: Vec<Option<CMat<f64>>> = vec![None; 1 << ell];
    let mut mass = vec![0.0f64; 1 << ell];
    for x in 0..1u64 << m {
        let xs = BitString::from_u64(x, m);
        let label = hash.eval(&xs)?.as_u64() as usize;
        let mut state = CMat::identity(1);
        for i in 0..m {
            let bit = u8::from(xs.get(i));
            let rec = slot_record_state(strategy.slot(i), theta[i], bit)?;
            state = state.kron(rec.matrix());
        }
        by_label[label] = Some(match by_label[label].take() {
            Some(acc) => acc.add(&state),
            None => state,
        });
        mass[label] += prior;
    }
    let entries = by_label
        .into_iter()
        .zip(&mass)
        .enumerate()
        .filter_map(|(label, (state, &p))| {
            state.map(|s| {
                let rho = DensityMatrix::new(s.scale_re(prior / p)).expect("normalized mixture");
                (label as u64, p, rho)
            })
        })
        .collect();
    Ok(nonuniformity(&CqEnsemble::new(entries, ell as u32)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distinguish::{delta_of_channel, pa_bound, BREIDBART_DELTA};
    use crate::hashing::sample_hash;

    const COS2: f64 = 0.8535533905932737;

    fn coding(n: usize) -> Vec<Basis> {
        (0..n)
            .map(|i| if i % 2 == 0 { Basis::Computational } else { Basis::Hadamard })
            .collect()
    }

    #[test]
    fn parse_descriptors() {
        assert_eq!("store:r=0.7".parse::<Strategy>().unwrap(), Strategy::Store { r: 0.7 });
        assert_eq!("breidbart".parse::<Strategy>().unwrap(), Strategy::Breidbart);
        assert_eq!(
            "basis:+".parse::<Strategy>().unwrap(),
            Strategy::BasisMeasure(Basis::Computational)
        );
        assert_eq!(
            "basis:x".parse::<Strategy>().unwrap(),
            Strategy::BasisMeasure(Basis::Hadamard)
        );
        assert!(matches!(
            "partial:alpha=0.3,r=0.9".parse::<Strategy>().unwrap(),
            Strategy::Partial { .. }
        ));
        assert_eq!(
            "beamsplit:mu=0.2".parse::<Strategy>().unwrap(),
            Strategy::BeamSplit { mu: 0.2 }
        );
        for bad in ["store", "store:r=2", "basis:breidbart", "nope", "store:r=0.5,x=1"] {
            assert!(bad.parse::<Strategy>().is_err(), "{bad} parsed");
        }
    }

    #[test]
    fn storage_phase_store_keeps_state() {
        let mut rng = crate::sample::test_rng(101);
        let qubits = vec![(0u8, Basis::Computational)];
        let lab = storage_phase(&Strategy::Store { r: 1.0 }, &qubits, &mut rng).unwrap();
        let state = lab.slots[0].state.as_ref().unwrap();
        let want = bb84_state::<f64>(0, Basis::Computational).unwrap();
        assert!(state.matrix().max_abs_diff(want.matrix()) < 1e-12);
        assert!(lab.slots[0].outcome.is_none());
    }

    #[test]
    fn breidbart_outcome_statistics() {
        let mut rng = crate::sample::test_rng(103);
        let n = 10_000;
        let qubits = vec![(0u8, Basis::Computational); n];
        let lab = storage_phase(&Strategy::Breidbart, &qubits, &mut rng).unwrap();
        let zeros = lab.slots.iter().filter(|s| s.outcome == Some(0)).count();
        let rate = zeros as f64 / n as f64;
        let sigma = (COS2 * (1.0 - COS2) / n as f64).sqrt();
        assert!((rate - COS2).abs() < 4.0 * sigma, "rate {rate}");
    }

    #[test]
    fn per_bit_probabilities_match_theory() {
        let mut rng = crate::sample::test_rng(107);
        let theta = coding(4);
        let qubits: Vec<(u8, Basis)> = theta.iter().map(|&b| (0u8, b)).collect();
        let indices = [0usize, 1, 2, 3];

        for r in [0.0, 0.4, 1.0] {
            let lab = storage_phase(&Strategy::Store { r }, &qubits, &mut rng).unwrap();
            let (_, probs) = post_reveal_guess(&lab, &theta, &indices, &mut rng).unwrap();
            for p in probs {
                assert!((p - (1.0 + r) / 2.0).abs() < 1e-12);
            }
        }

        let lab = storage_phase(&Strategy::Breidbart, &qubits, &mut rng).unwrap();
        let (_, probs) = post_reveal_guess(&lab, &theta, &indices, &mut rng).unwrap();
        for p in probs {
            assert!((p - COS2).abs() < 1e-12);
        }

        // Measuring + then seeing x revealed leaves pure guessing; matching
        // basis is certain.
        let strat = Strategy::BasisMeasure(Basis::Computational);
        let lab = storage_phase(&strat, &qubits, &mut rng).unwrap();
        let (guess, probs) = post_reveal_guess(&lab, &theta, &indices, &mut rng).unwrap();
        for (k, &i) in indices.iter().enumerate() {
            match theta[i] {
                Basis::Computational => {
                    assert!((probs[k] - 1.0).abs() < 1e-12);
                    assert!(!guess.get(k), "certain slot guessed wrong");
                }
                _ => assert!((probs[k] - 0.5).abs() < 1e-12),
            }
        }
    }

    #[test]
    fn empirical_guess_rate_matches_exact() {
        let mut rng = crate::sample::test_rng(109);
        let n = 100_000;
        let theta = vec![Basis::Hadamard; n];
        let qubits: Vec<(u8, Basis)> = (0..n)
            .map(|_| (u8::from(rng.gen_bool(0.5)), Basis::Hadamard))
            .collect();
        let indices: Vec<usize> = (0..n).collect();
        for strat in [
            Strategy::Store { r: 0.6 },
            Strategy::Breidbart,
            Strategy::Partial {
                params: AttackParams::new(
                    0.3,
                    std::f64::consts::FRAC_1_SQRT_2,
                    0.0,
                    std::f64::consts::FRAC_1_SQRT_2,
                )
                .unwrap(),
                r: 0.8,
            },
        ] {
            let lab = storage_phase(&strat, &qubits, &mut rng).unwrap();
            let (guess, probs) = post_reveal_guess(&lab, &theta, &indices, &mut rng).unwrap();
            let hits = (0..n)
                .filter(|&i| guess.get(i) == (qubits[i].0 == 1))
                .count() as f64;
            let expected: f64 = probs.iter().sum();
            let var: f64 = probs.iter().map(|p| p * (1.0 - p)).sum();
            assert!(
                (hits - expected).abs() <= 3.0 * var.sqrt().max(1.0),
                "{strat:?}: {hits} hits vs {expected}"
            );
        }
    }

    #[test]
    fn choice_bit_examples() {
        assert_eq!(
            choice_bit_cprime(&Strategy::Breidbart, 6).unwrap(),
            Basis::Computational
        );
        assert_eq!(
            choice_bit_cprime(&Strategy::BasisMeasure(Basis::Computational), 6).unwrap(),
            Basis::Computational
        );
        assert_eq!(
            choice_bit_cprime(&Strategy::BasisMeasure(Basis::Hadamard), 6).unwrap(),
            Basis::Hadamard
        );
        assert_eq!(
            choice_bit_cprime(&Strategy::Store { r: 0.5 }, 6).unwrap(),
            Basis::Computational
        );
    }

    #[test]
    fn beam_split_values() {
        assert!((beam_split_delta(0.0).unwrap() - BREIDBART_DELTA).abs() < 1e-9);
        assert!((beam_split_delta(1.0).unwrap() - 0.9267766952966369).abs() < 1e-12);
        assert!((beam_split_delta(0.2).unwrap() - 0.8681980515339464).abs() < 1e-12);
        assert!(beam_split_delta(1.5).is_err());
        // Matches the mixture of per-basis guessing values.
        for mu in [0.0, 0.3, 1.0] {
            let s = Strategy::BeamSplit { mu };
            let d = (s.pg(0, Basis::Computational).unwrap() * s.pg(0, Basis::Hadamard).unwrap())
                .sqrt();
            assert!((d - beam_split_delta(mu).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn beam_split_zero_reduces_to_breidbart() {
        let mut rng = crate::sample::test_rng(113);
        let n = 10_000;
        let qubits = vec![(1u8, Basis::Hadamard); n];
        let lab = storage_phase(&Strategy::BeamSplit { mu: 0.0 }, &qubits, &mut rng).unwrap();
        assert!(lab.slots.iter().all(|s| s.split_outcomes.is_none()));
        let ref_lab = storage_phase(&Strategy::Breidbart, &qubits, &mut rng).unwrap();
        let rate = |l: &StoredLab| {
            l.slots.iter().filter(|s| s.outcome == Some(0)).count() as f64 / n as f64
        };
        assert!((rate(&lab) - rate(&ref_lab)).abs() < 0.02);
    }

    #[test]
    fn product_guessing_bounded_by_max_uncertainty() {
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        for &r in &grid {
            let cap = crate::attack_opt::theorem2_delta(r);
            for strat in [
                Strategy::Store { r },
                Strategy::Breidbart,
                Strategy::BasisMeasure(Basis::Computational),
                Strategy::Partial {
                    params: AttackParams::new(
                        0.35,
                        std::f64::consts::FRAC_1_SQRT_2,
                        0.0,
                        std::f64::consts::FRAC_1_SQRT_2,
                    )
                    .unwrap(),
                    r,
                },
            ] {
                let d2 = strat.pg(0, Basis::Computational).unwrap()
                    * strat.pg(0, Basis::Hadamard).unwrap();
                assert!(d2 <= cap * cap + 1e-9, "{strat:?} at r {r}: {d2}");
            }
        }
    }

    #[test]
    fn distinguisher_extremes() {
        let mut rng = crate::sample::test_rng(127);
        // Nothing stored: hashed string is perfectly uniform.
        let theta = coding(4);
        let hash = sample_hash(4, 1, &mut rng).unwrap();
        let d = exact_string_distinguisher(&Strategy::Store { r: 0.0 }, &theta, &hash).unwrap();
        assert!(d < 1e-10, "got {d}");

        // Full correlation: measure the same basis as every slot, take one
        // bit straight through.
        let theta = vec![Basis::Computational; 3];
        let one_bit = AffineHash::new(
            vec![{
                let mut row = BitString::zeros(3);
                row.set(0, true);
                row
            }],
            BitString::zeros(1),
            3,
        )
        .unwrap();
        let d = exact_string_distinguisher(
            &Strategy::BasisMeasure(Basis::Computational),
            &theta,
            &one_bit,
        )
        .unwrap();
        assert!((d - 0.5).abs() < 1e-10, "got {d}");
    }

    #[test]
    fn distinguisher_respects_product_bound() {
        let mut rng = crate::sample::test_rng(131);
        let theta = coding(6);
        let hash = sample_hash(6, 1, &mut rng).unwrap();
        let d = exact_string_distinguisher(&Strategy::Breidbart, &theta, &hash).unwrap();
        // Hashing six qubits of intermediate-basis outcomes down to one
        // bit: bounded by the square-root guessing bound.
        assert!(d <= pa_bound(1, 0, COS2.powi(3)), "got {d}");
    }

    #[test]
    fn distinguisher_rejects_large_instances() {
        let mut rng = crate::sample::test_rng(137);
        let hash = sample_hash(9, 1, &mut rng).unwrap();
        assert!(exact_string_distinguisher(&Strategy::Breidbart, &coding(9), &hash).is_err());
        let hash = sample_hash(4, 3, &mut rng).unwrap();
        assert!(exact_string_distinguisher(&Strategy::Breidbart, &coding(4), &hash).is_err());
    }

    #[test]
    fn hybrid_per_slot() {
        let mut rng = crate::sample::test_rng(139);
        let strat = Strategy::Hybrid(vec![
            Strategy::Store { r: 1.0 },
            Strategy::BasisMeasure(Basis::Computational),
        ]);
        let qubits = vec![(1u8, Basis::Computational), (0u8, Basis::Computational)];
        let lab = storage_phase(&strat, &qubits, &mut rng).unwrap();
        assert!(lab.slots[0].state.is_some());
        assert!(lab.slots[1].outcome.is_some());
        let (guess, probs) =
            post_reveal_guess(&lab, &[Basis::Computational; 2], &[0, 1], &mut rng).unwrap();
        assert_eq!(probs, vec![1.0, 1.0]);
        assert!(guess.get(0) && !guess.get(1));
        assert!(Strategy::Hybrid(vec![Strategy::Breidbart]).validate(2).is_err());
    }

    #[test]
    fn store_r1_lab_delta_matches_channel() {
        // Coherence check between the strategy layer and the channel-level
        // uncertainty quantity.
        for r in [0.3, 0.8] {
            let s = Strategy::Store { r };
            let d = (s.pg(0, Basis::Computational).unwrap() * s.pg(0, Basis::Hadamard).unwrap())
                .sqrt();
            let c = delta_of_channel(&s.attack().unwrap());
            assert!((d - c).abs() < 1e-12);
        }
    }
}
