//! Executable randomized oblivious transfer: the noiseless protocol, its
//! photonic variant with erasures, honest channel noise and an abort test,
//! and the wrapper turning randomized OT into chosen-input OT.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{choice_bit_cprime, post_reveal_guess, storage_phase, Strategy};
use crate::bits::BitString;
use crate::codes::{LinearCode, SyndromeBundle};
use crate::error::{Error, Result};
use crate::hashing::{pad_input, sample_hash, AffineHash};
use crate::qstate::Basis;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Perfect,
    Practical,
}

/// Run configuration for one protocol execution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Number of transmitted qubits.
    pub n: usize,
    /// Output string length in bits.
    pub ell: usize,
    /// Waiting time between transmission and basis reveal, in seconds.
    /// Informational only; the storage rate r is what the bounds consume.
    pub wait_seconds: f64,
    /// Adversary storage survival probability.
    pub r: f64,
    /// Honest per-slot erasure probability (practical mode).
    pub p_erase: f64,
    /// Honest bit-flip probability on same-basis outcomes (practical mode).
    pub p_error: f64,
    /// Mean photon number per pulse (adversary models).
    pub mu: f64,
    /// Abort-slack multiplier: abort below (1 - p_erase) n / 2 - c sqrt(n).
    pub c_abort: f64,
    /// Root seed; all randomness in a run derives from it.
    pub seed: u64,
    pub mode: Mode,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            n: 2048,
            ell: 50,
            wait_seconds: 1.0,
            r: 0.5,
            p_erase: 0.3,
            p_error: 0.01,
            mu: 0.2,
            c_abort: 3.0,
            seed: 0,
            mode: Mode::Practical,
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        if self.n < 8 {
            return Err(Error::InvalidParam(format!("n = {} below the minimum of 8", self.n)));
        }
        if self.ell < 1 {
            return Err(Error::InvalidParam("ell must be at least 1".into()));
        }
        for (name, value) in [("p_erase", self.p_erase), ("p_error", self.p_error)] {
            if !(0.0..0.5).contains(&value) {
                return Err(Error::InvalidParam(format!("{name} = {value} outside [0, 1/2)")));
            }
        }
        if !(0.0..=1.0).contains(&self.r) {
            return Err(Error::InvalidParam(format!("r = {} outside [0, 1]", self.r)));
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(Error::InvalidParam(format!("mu = {} outside [0, 1]", self.mu)));
        }
        if self.c_abort < 0.0 || !self.c_abort.is_finite() {
            return Err(Error::InvalidParam(format!("c_abort = {} negative", self.c_abort)));
        }
        if self.wait_seconds < 0.0 || !self.wait_seconds.is_finite() {
            return Err(Error::InvalidParam(format!(
                "wait_seconds = {} negative",
                self.wait_seconds
            )));
        }
        Ok(())
    }

    /// Parse `key = value` lines over the defaults; `#` starts a comment.
    pub fn from_config(text: &str) -> Result<Self> {
        let mut p = Params::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::Parse(format!("line {}: bad {what} {value:?}", lineno + 1));
            match key {
                "n" => p.n = value.parse().map_err(|_| bad("integer"))?,
                "ell" => p.ell = value.parse().map_err(|_| bad("integer"))?,
                "wait_seconds" => p.wait_seconds = value.parse().map_err(|_| bad("number"))?,
                "r" => p.r = value.parse().map_err(|_| bad("number"))?,
                "p_erase" => p.p_erase = value.parse().map_err(|_| bad("number"))?,
                "p_error" => p.p_error = value.parse().map_err(|_| bad("number"))?,
                "mu" => p.mu = value.parse().map_err(|_| bad("number"))?,
                "c_abort" => p.c_abort = value.parse().map_err(|_| bad("number"))?,
                "seed" => p.seed = value.parse().map_err(|_| bad("integer"))?,
                "mode" => {
                    p.mode = match value {
                        "perfect" => Mode::Perfect,
                        "practical" => Mode::Practical,
                        _ => return Err(bad("mode")),
                    }
                }
                other => {
                    return Err(Error::Parse(format!("line {}: unknown key {other:?}", lineno + 1)))
                }
            }
        }
        p.validate()?;
        Ok(p)
    }
}

/// The receiving party in one run.
#[derive(Clone, Debug)]
pub enum Receiver {
    /// Follows the protocol with this choice basis.
    Honest(Basis),
    /// Attacks with the given per-qubit strategy.
    Dishonest(Strategy),
    /// Reports every slot erased (practical mode); always triggers an abort.
    EraseAll,
}

/// Complete record of one run, serializable to JSON with hex bitstrings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Transcript {
    pub seed: u64,
    pub mode: Mode,
    pub x: BitString,
    pub theta: Vec<Basis>,
    /// Bit i set means slot i was reported erased (practical mode only).
    pub erasure_report: Option<BitString>,
    pub index_plus: Vec<usize>,
    pub index_times: Vec<usize>,
    pub hash_plus: AffineHash,
    pub hash_times: AffineHash,
    pub syndrome_plus: Option<SyndromeBundle>,
    pub syndrome_times: Option<SyndromeBundle>,
    pub s_plus: BitString,
    pub s_times: BitString,
    /// The receiver's hashed output; absent on abort.
    pub bob_output: Option<BitString>,
    pub aborted: bool,
    /// The abort threshold was negative and clamped to zero.
    pub threshold_clamped: bool,
    /// One of the index sets came out empty; its string hashes zero padding.
    pub empty_index_set: bool,
}

/// Fixed sub-stream layout for the counter-based generator: everything in a
/// run derives from the one seed.
const STREAM_X: u64 = 0;
const STREAM_THETA: u64 = 1;
const STREAM_HASH: u64 = 2;
const STREAM_HONEST: u64 = 3;
const STREAM_ADVERSARY: u64 = 4;

fn rng_stream(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// floor((1 - p_erase) n / 2 - c sqrt(n)), clamped at zero. The boolean
/// flags the clamp: the test is vacuous there.
pub fn abort_threshold(n: usize, p_erase: f64, c_abort: f64) -> Result<(usize, bool)> {
    if !(0.0..=1.0).contains(&p_erase) {
        return Err(Error::InvalidParam(format!("p_erase = {p_erase} outside [0, 1]")));
    }
    if c_abort < 0.0 {
        return Err(Error::InvalidParam(format!("c_abort = {c_abort} negative")));
    }
    let raw = (1.0 - p_erase) * n as f64 / 2.0 - c_abort * (n as f64).sqrt();
    if raw < 0.0 {
        Ok((0, true))
    } else {
        Ok((raw.floor() as usize, false))
    }
}

/// Hash input width for a substring of m retained bits: at least ell so an
/// empty or short set still hashes a zero-padded string.
fn hash_width(m: usize, ell: usize) -> usize {
    m.max(ell)
}

fn sample_basis<R: Rng>(rng: &mut R) -> Basis {
    if rng.gen_bool(0.5) {
        Basis::Hadamard
    } else {
        Basis::Computational
    }
}

fn coding_index(basis: Basis) -> Result<usize> {
    match basis {
        Basis::Computational => Ok(0),
        Basis::Hadamard => Ok(1),
        Basis::Breidbart => Err(Error::InvalidParam("receiver choice must be a coding basis".into())),
    }
}

struct RunCommon {
    x: BitString,
    theta: Vec<Basis>,
}

fn draw_common(p: &Params) -> RunCommon {
    let x = BitString::random(p.n, &mut rng_stream(p.seed, STREAM_X));
    let mut theta_rng = rng_stream(p.seed, STREAM_THETA);
    let theta = (0..p.n).map(|_| sample_basis(&mut theta_rng)).collect();
    RunCommon { x, theta }
}

fn split_indices(theta: &[Basis], retained: impl Fn(usize) -> bool) -> (Vec<usize>, Vec<usize>) {
    let mut plus = Vec::new();
    let mut times = Vec::new();
    for (i, b) in theta.iter().enumerate() {
        if retained(i) {
            match b {
                Basis::Computational => plus.push(i),
                Basis::Hadamard => times.push(i),
                Basis::Breidbart => unreachable!("encoding uses coding bases only"),
            }
        }
    }
    (plus, times)
}

/// The receiver's output when attacking: store through the wait, pick the
/// better-guessed basis, guess that substring and hash it.
fn dishonest_output(
    strategy: &Strategy,
    common: &RunCommon,
    indices: [&[usize]; 2],
    hashes: [&AffineHash; 2],
    rng: &mut ChaCha12Rng,
) -> Result<BitString> {
    let qubits: Vec<(u8, Basis)> = (0..common.x.len())
        .map(|i| (u8::from(common.x.get(i)), common.theta[i]))
        .collect();
    let lab = storage_phase(strategy, &qubits, rng)?;
    let cprime = choice_bit_cprime(strategy, qubits.len())?;
    let side = coding_index(cprime)?;
    let (guess, _) = post_reveal_guess(&lab, &common.theta, indices[side], rng)?;
    hashes[side].eval(&pad_input(&guess, hashes[side].input_bits())?)
}

/// Noiseless protocol: every slot arrives, same-basis measurement is exact,
/// no abort branch exists.
pub fn run_rot_perfect(p: &Params, receiver: &Receiver) -> Result<Transcript> {
    p.validate()?;
    if p.mode != Mode::Perfect {
        return Err(Error::InvalidParam("run_rot_perfect needs mode = perfect".into()));
    }
    let common = draw_common(p);
    let (index_plus, index_times) = split_indices(&common.theta, |_| true);

    let mut hash_rng = rng_stream(p.seed, STREAM_HASH);
    let hash_plus = sample_hash(hash_width(index_plus.len(), p.ell), p.ell, &mut hash_rng)?;
    let hash_times = sample_hash(hash_width(index_times.len(), p.ell), p.ell, &mut hash_rng)?;

    let sel = |idx: &[usize], h: &AffineHash| -> Result<BitString> {
        h.eval(&pad_input(&common.x.select(idx), h.input_bits())?)
    };
    let s_plus = sel(&index_plus, &hash_plus)?;
    let s_times = sel(&index_times, &hash_times)?;

    let bob_output = match receiver {
        Receiver::Honest(choice) => {
            let side = coding_index(*choice)?;
            let mut bob_rng = rng_stream(p.seed, STREAM_HONEST);
            // Conjugate-basis outcomes are uniform; drawing them keeps the
            // honest stream layout identical across modes.
            let mut measured = BitString::zeros(p.n);
            for i in 0..p.n {
                let hit = common.theta[i] == *choice;
                let outcome = if hit { common.x.get(i) } else { bob_rng.gen_bool(0.5) };
                measured.set(i, outcome);
            }
            let (idx, h) = if side == 0 { (&index_plus, &hash_plus) } else { (&index_times, &hash_times) };
            Some(h.eval(&pad_input(&measured.select(idx), h.input_bits())?)?)
        }
        Receiver::Dishonest(strategy) => {
            let mut adv_rng = rng_stream(p.seed, STREAM_ADVERSARY);
            Some(dishonest_output(
                strategy,
                &common,
                [&index_plus, &index_times],
                [&hash_plus, &hash_times],
                &mut adv_rng,
            )?)
        }
        Receiver::EraseAll => {
            return Err(Error::InvalidParam(
                "erasure reporting only exists in the practical protocol".into(),
            ))
        }
    };

    let empty_index_set = index_plus.is_empty() || index_times.is_empty();
    Ok(Transcript {
        seed: p.seed,
        mode: Mode::Perfect,
        x: common.x,
        theta: common.theta,
        erasure_report: None,
        index_plus,
        index_times,
        hash_plus,
        hash_times,
        syndrome_plus: None,
        syndrome_times: None,
        s_plus,
        s_times,
        bob_output,
        aborted: false,
        threshold_clamped: false,
        empty_index_set,
    })
}

/// Photonic protocol: per-slot erasures, an abort test on the reported
/// counts, syndromes for the honest decode, flips on same-basis outcomes.
pub fn run_rot_practical(p: &Params, receiver: &Receiver) -> Result<Transcript> {
    p.validate()?;
    if p.mode != Mode::Practical {
        return Err(Error::InvalidParam("run_rot_practical needs mode = practical".into()));
    }
    let common = draw_common(p);
    let mut honest_rng = rng_stream(p.seed, STREAM_HONEST);
    let mut adv_rng = rng_stream(p.seed, STREAM_ADVERSARY);

    // The receiver reports which slots were lost. Honest loss is physical
    // and basis-independent; a dishonest receiver on a lossless channel
    // mimics the same statistics to stay unremarkable.
    let mut report = BitString::zeros(p.n);
    match receiver {
        Receiver::Honest(_) => {
            for i in 0..p.n {
                report.set(i, honest_rng.gen_bool(p.p_erase));
            }
        }
        Receiver::Dishonest(_) => {
            for i in 0..p.n {
                report.set(i, adv_rng.gen_bool(p.p_erase));
            }
        }
        Receiver::EraseAll => {
            for i in 0..p.n {
                report.set(i, true);
            }
        }
    }

    let (index_plus, index_times) = split_indices(&common.theta, |i| !report.get(i));
    let (threshold, threshold_clamped) = abort_threshold(p.n, p.p_erase, p.c_abort)?;
    let aborted = index_plus.len() <= threshold || index_times.len() <= threshold;

    let mut hash_rng = rng_stream(p.seed, STREAM_HASH);
    let hash_plus = sample_hash(hash_width(index_plus.len(), p.ell), p.ell, &mut hash_rng)?;
    let hash_times = sample_hash(hash_width(index_times.len(), p.ell), p.ell, &mut hash_rng)?;

    let code = LinearCode::hamming_7_4();
    let x_plus = common.x.select(&index_plus);
    let x_times = common.x.select(&index_times);
    let syndrome_plus = code.syndrome(&x_plus);
    let syndrome_times = code.syndrome(&x_times);
    let s_plus = hash_plus.eval(&pad_input(&x_plus, hash_plus.input_bits())?)?;
    let s_times = hash_times.eval(&pad_input(&x_times, hash_times.input_bits())?)?;

    let bob_output = if aborted {
        None
    } else {
        match receiver {
            Receiver::Honest(choice) => {
                let side = coding_index(*choice)?;
                let (idx, h, syn) = if side == 0 {
                    (&index_plus, &hash_plus, &syndrome_plus)
                } else {
                    (&index_times, &hash_times, &syndrome_times)
                };
                // Same-basis outcomes pass a binary symmetric channel;
                // conjugate-basis slots are not used by the honest receiver.
                let mut noisy = BitString::zeros(idx.len());
                for (k, &i) in idx.iter().enumerate() {
                    let hit = common.theta[i] == *choice;
                    let outcome = if hit {
                        common.x.get(i) ^ honest_rng.gen_bool(p.p_error)
                    } else {
                        honest_rng.gen_bool(0.5)
                    };
                    noisy.set(k, outcome);
                }
                let corrected = code.decode(&noisy, syn)?;
                Some(h.eval(&pad_input(&corrected, h.input_bits())?)?)
            }
            Receiver::Dishonest(strategy) => Some(dishonest_output(
                strategy,
                &common,
                [&index_plus, &index_times],
                [&hash_plus, &hash_times],
                &mut adv_rng,
            )?),
            Receiver::EraseAll => unreachable!("all-erased reports always abort"),
        }
    };

    let empty_index_set = index_plus.is_empty() || index_times.is_empty();
    Ok(Transcript {
        seed: p.seed,
        mode: Mode::Practical,
        x: common.x,
        theta: common.theta,
        erasure_report: Some(report),
        index_plus,
        index_times,
        hash_plus,
        hash_times,
        syndrome_plus: Some(syndrome_plus),
        syndrome_times: Some(syndrome_times),
        s_plus,
        s_times,
        bob_output,
        aborted,
        threshold_clamped,
        empty_index_set,
    })
}

/// Sender inputs to the chosen-input OT wrapper. The choice bit maps the
/// computational basis to 0.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OtInputs {
    pub s0_hat: BitString,
    pub s1_hat: BitString,
    pub c: u8,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OtOutcome {
    /// The two masked strings the sender publishes.
    pub pads: (BitString, BitString),
    /// What the receiver unmasks: equals the chosen input on honest runs.
    pub receiver_output: BitString,
}

/// One-time-pad wrapper: the sender masks her inputs with the two run
/// outputs; the receiver unmasks the side matching his choice.
pub fn rot_to_ot(t: &Transcript, inputs: &OtInputs) -> Result<OtOutcome> {
    if t.aborted {
        return Err(Error::InvalidParam("aborted runs carry no output strings".into()));
    }
    if inputs.c > 1 {
        return Err(Error::InvalidParam(format!("choice bit must be 0 or 1, got {}", inputs.c)));
    }
    let ell = t.s_plus.len();
    if inputs.s0_hat.len() != ell || inputs.s1_hat.len() != ell {
        return Err(Error::InvalidParam("input strings must match the run output length".into()));
    }
    let bob = t
        .bob_output
        .as_ref()
        .ok_or_else(|| Error::InvalidParam("transcript has no receiver output".into()))?;
    let pads = (inputs.s0_hat.xor(&t.s_plus), inputs.s1_hat.xor(&t.s_times));
    let chosen_pad = if inputs.c == 0 { &pads.0 } else { &pads.1 };
    let receiver_output = bob.xor(chosen_pad);
    Ok(OtOutcome { pads, receiver_output })
}
