//! The acceptance suite: each check exercises one end-to-end claim the
//! crate is built around, at tolerances chosen so a pass is meaningful and
//! a failure is a real regression. The CLI `verify` subcommand and the
//! integration test target both run exactly these functions.

use rand::Rng;

use crate::adversary::{choice_bit_cprime, exact_string_distinguisher, Strategy};
use crate::attack_opt::{closed_form_eigs, optimize_delta, theorem2_delta, AttackParams, Regime};
use crate::bits::BitString;
use crate::channels::MeasurementFamily;
use crate::codes::LinearCode;
use crate::distinguish::{
    delta_of_channel, dual_certificate, pa_bound, pg_given_basis, product_guess, StorageAttack,
    BREIDBART_DELTA,
};
use crate::hashing::sample_hash;
use crate::mat::CMat;
use crate::protocol::{run_rot_practical, Mode, Params, Receiver};
use crate::qstate::Basis;
use crate::sample::test_rng;
use crate::security::{
    breidbart_perror_threshold, delta_sec_perfect, lemma5_check, tradeoff_boundary_root,
    tradeoff_value,
};

/// Outcome of one acceptance check.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

impl CheckResult {
    fn pass(name: &'static str, details: String) -> Self {
        CheckResult { name, passed: true, details }
    }

    fn fail(name: &'static str, details: String) -> Self {
        CheckResult { name, passed: false, details }
    }

    fn of(name: &'static str, passed: bool, details: String) -> Self {
        CheckResult { name, passed, details }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.details
        )
    }
}

macro_rules! try_check {
    ($name:expr, $expr:expr) => {
        match $expr {
            Ok(v) => v,
            Err(e) => return CheckResult::fail($name, format!("error: {e}")),
        }
    };
}

/// 1. Optimized attack value matches the piecewise analytic maximum on a
/// dense rate grid, and the regime switches at rate 1/sqrt(2).
pub fn check_optimizer_matches_analytic() -> CheckResult {
    const NAME: &str = "optimizer-matches-analytic";
    let mut worst = 0.0f64;
    for step in 0..=20 {
        let rate = step as f64 / 20.0;
        let opt = try_check!(NAME, optimize_delta(rate, 0.02, 1e-7));
        let gap = (opt.delta_max - theorem2_delta(rate)).abs();
        worst = worst.max(gap);
        if gap >= 1e-4 {
            return CheckResult::fail(NAME, format!("gap {gap:.2e} at rate {rate}"));
        }
    }
    // Bisect the regime switch point.
    let regime_at = |rate: f64| optimize_delta(rate, 0.02, 1e-7).map(|o| o.regime);
    let (mut lo, mut hi) = (0.6f64, 0.8f64);
    if try_check!(NAME, regime_at(lo)) != Regime::Breidbart
        || try_check!(NAME, regime_at(hi)) != Regime::Store
    {
        return CheckResult::fail(NAME, "regimes wrong at bracket ends".into());
    }
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if try_check!(NAME, regime_at(mid)) == Regime::Breidbart {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let switch = 0.5 * (lo + hi);
    let want = std::f64::consts::FRAC_1_SQRT_2;
    CheckResult::of(
        NAME,
        (switch - want).abs() <= 0.01,
        format!("max |gap| {worst:.2e} on 21 rates; regime switch at {switch:.4} (want {want:.4})"),
    )
}

/// 2. The intermediate-basis measurement value is (1 + 1/sqrt(2))/2.
pub fn check_breidbart_constant() -> CheckResult {
    const NAME: &str = "breidbart-constant";
    let attack = StorageAttack::full_measurement(MeasurementFamily::<f64>::projective(Basis::Breidbart));
    let got = delta_of_channel(&attack);
    let gap = (got - 0.8535533906f64).abs();
    CheckResult::of(NAME, gap <= 1e-9, format!("delta {got:.12}, |gap| {gap:.2e}"))
}

/// 3. Error-rate threshold for the intermediate-basis regime sits near 0.029.
pub fn check_error_threshold() -> CheckResult {
    const NAME: &str = "error-threshold";
    let t = breidbart_perror_threshold();
    CheckResult::of(NAME, (0.028..=0.030).contains(&t), format!("threshold {t:.6}"))
}

/// 4. Closed-form eigenvalues of the objective matrices agree with numerical
/// eigendecomposition on 10^4 random parameter points.
pub fn check_closed_form_eigs() -> CheckResult {
    const NAME: &str = "closed-form-eigenvalues";
    let mut rng = test_rng(401);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let alpha = rng.gen_range(0.0..std::f64::consts::FRAC_1_SQRT_2);
        let rate = rng.gen_range(0.0..=1.0);
        // Random unit direction.
        let (x, y, z) = loop {
            let v: [f64; 3] = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 1e-3 {
                break (v[0] / n, v[1] / n, v[2] / n);
            }
        };
        let params = match AttackParams::new(alpha, x, y, z) {
            Ok(p) => p,
            Err(e) => return CheckResult::fail(NAME, format!("error: {e}")),
        };
        let f = params.operator();
        let (p1, p2, t1, t2) = closed_form_eigs(alpha, x, z, rate);
        for (basis, want) in [(Basis::Computational, [p1, p2]), (Basis::Hadamard, [t1, t2])] {
            let delta = crate::distinguish::coding_difference_for::<f64>(basis);
            let m = f.mul(&delta).mul(&f);
            let tr = m.trace().re;
            let obj = m
                .scale_re(rate)
                .add(&CMat::identity(2).scale_re((1.0 - rate) * tr * 0.5));
            let got = obj.herm_eigenvalues();
            let mut want = want;
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (g, w) in got.iter().zip(&want) {
                let gap = (g - w).abs();
                worst = worst.max(gap);
                if gap >= 1e-9 {
                    return CheckResult::fail(
                        NAME,
                        format!("gap {gap:.2e} at alpha {alpha:.4}, rate {rate:.4}"),
                    );
                }
            }
        }
    }
    CheckResult::pass(NAME, format!("max |gap| {worst:.2e} over 10^4 samples"))
}

/// 5. Random complete measurement families never beat the intermediate-basis
/// uncertainty product.
pub fn check_measurement_uncertainty() -> CheckResult {
    const NAME: &str = "measurement-uncertainty";
    let mut rng = test_rng(501);
    let cap = BREIDBART_DELTA * BREIDBART_DELTA;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let fam = crate::sample::random_measurement_family::<f64, _>(&mut rng);
        let attack = StorageAttack::full_measurement(fam);
        let prod = pg_given_basis(&attack, Basis::Computational)
            * pg_given_basis(&attack, Basis::Hadamard);
        worst = worst.max(prod);
        if prod > cap + 1e-9 {
            return CheckResult::fail(NAME, format!("product {prod:.12} above cap {cap:.12}"));
        }
    }
    CheckResult::pass(NAME, format!("max product {worst:.6} <= cap {cap:.6} on 1000 families"))
}

/// 6. Product guessing equals the tensor dual-certificate value, with the
/// tensor certificate feasible, on 100 random 2-bit product ensembles.
pub fn check_product_dual_certificates() -> CheckResult {
    const NAME: &str = "product-dual-certificates";
    let mut rng = test_rng(601);
    let mut worst_gap = 0.0f64;
    let mut worst_margin = f64::INFINITY;
    for _ in 0..100 {
        let pairs = [
            (
                crate::sample::random_density::<f64, _>(2, &mut rng),
                crate::sample::random_density::<f64, _>(2, &mut rng),
            ),
            (
                crate::sample::random_density::<f64, _>(2, &mut rng),
                crate::sample::random_density::<f64, _>(2, &mut rng),
            ),
        ];
        let direct = product_guess(&[pairs[0].clone(), pairs[1].clone()]);
        let c0 = try_check!(NAME, dual_certificate(&pairs[0].0, &pairs[0].1));
        let c1 = try_check!(NAME, dual_certificate(&pairs[1].0, &pairs[1].1));
        let tensor_value = c0.value * c1.value;
        let gap = (tensor_value - direct).abs();
        worst_gap = worst_gap.max(gap);
        if gap >= 1e-9 {
            return CheckResult::fail(NAME, format!("value gap {gap:.2e}"));
        }
        let q = c0.q.kron(&c1.q);
        for b0 in 0..2 {
            for b1 in 0..2 {
                let rho0 = if b0 == 0 { &pairs[0].0 } else { &pairs[0].1 };
                let rho1 = if b1 == 0 { &pairs[1].0 } else { &pairs[1].1 };
                let margin = q.sub(&rho0.matrix().kron(rho1.matrix())).min_eigenvalue();
                worst_margin = worst_margin.min(margin);
                if margin < -1e-9 {
                    return CheckResult::fail(NAME, format!("certificate margin {margin:.2e}"));
                }
            }
        }
    }
    CheckResult::pass(
        NAME,
        format!("max value gap {worst_gap:.2e}, min PSD margin {worst_margin:.2e} on 100 ensembles"),
    )
}

/// 7. Exhaustive small-scale sender security: the exact distance of the
/// hashed unchosen substring from uniform, averaged over the whole hash
/// family, never exceeds the bound chain. The average matters: a single
/// degenerate hash (the zero row) has distance 1/2 on its own, and the
/// guarantee is over the family draw. Offsets only relabel outputs and
/// leave the distance unchanged, so linear hashes enumerate the family.
pub fn check_exhaustive_sender_security() -> CheckResult {
    const NAME: &str = "exhaustive-sender-security";
    let mut strategies = vec![
        Strategy::Breidbart,
        Strategy::BasisMeasure(Basis::Computational),
        Strategy::BasisMeasure(Basis::Hadamard),
    ];
    for r in [0.0, 0.25, 0.5, 0.75, 1.0] {
        strategies.push(Strategy::Store { r });
    }
    let mut instances = 0usize;
    let mut worst_slack = f64::INFINITY;
    for strategy in &strategies {
        for m in 2..=6usize {
            let cprime = try_check!(NAME, choice_bit_cprime(strategy, m));
            let unchosen = match cprime {
                Basis::Computational => Basis::Hadamard,
                Basis::Hadamard => Basis::Computational,
                Basis::Breidbart => unreachable!("choice is a coding basis"),
            };
            let theta = vec![unchosen; m];
            let pg_bit = try_check!(NAME, strategy.pg(0, unchosen));
            let pg_chosen = try_check!(NAME, strategy.pg(0, cprime));
            let strategy_delta = (pg_bit * pg_chosen).sqrt();

            let mut avg = 0.0f64;
            for row_bits in 0..1u64 << m {
                let hash = try_check!(
                    NAME,
                    crate::hashing::AffineHash::new(
                        vec![BitString::from_u64(row_bits, m)],
                        BitString::zeros(1),
                        m,
                    )
                );
                avg += try_check!(NAME, exact_string_distinguisher(strategy, &theta, &hash));
            }
            avg /= (1u64 << m) as f64;

            // Tight chain: distance <= 2^{ell/2 - 1} sqrt(exact guessing).
            let tight = pa_bound(1, 0, pg_bit.powi(m as i32));
            // Module formula with the total qubit count 2m and the
            // strategy's own uncertainty value.
            let formula = try_check!(NAME, delta_sec_perfect(1, 2 * m as u64, strategy_delta));
            let bound = tight.min(formula);
            worst_slack = worst_slack.min(bound - avg);
            instances += 1;
            if avg > tight + 1e-9 || avg > formula + 1e-9 {
                return CheckResult::fail(
                    NAME,
                    format!("{strategy:?}, m = {m}: avg distance {avg:.6} above bound {bound:.6}"),
                );
            }
        }
    }
    CheckResult::pass(
        NAME,
        format!("{instances} instances, min bound slack {worst_slack:.3e}"),
    )
}

/// 8. Honest protocol correctness at scale: n = 2048, 30% erasure, 1% flips.
/// Success means the receiver reproduces the chosen string exactly.
pub fn check_protocol_correctness() -> CheckResult {
    const NAME: &str = "protocol-correctness";
    let runs = 1000u64;
    let mut correct = 0u64;
    let mut aborts = 0u64;
    for seed in 0..runs {
        let p = Params {
            n: 2048,
            ell: 50,
            p_erase: 0.3,
            p_error: 0.01,
            seed,
            mode: Mode::Practical,
            ..Params::default()
        };
        let t = try_check!(NAME, run_rot_practical(&p, &Receiver::Honest(Basis::Computational)));
        if t.aborted {
            aborts += 1;
        } else if t.bob_output.as_ref() == Some(&t.s_plus) {
            correct += 1;
        }
    }
    let delivered = runs - aborts;
    let success = correct as f64 / delivered.max(1) as f64;
    let abort_rate = aborts as f64 / runs as f64;
    CheckResult::of(
        NAME,
        success >= 0.999 && abort_rate <= 0.01,
        format!(
            "success {success:.4} (want >= 0.999), false-abort {abort_rate:.4} (want <= 0.01) over {runs} seeds"
        ),
    )
}

/// 9. Receiver security proxy: the erasure report carries no trace of the
/// choice basis (chi-square homogeneity over 10^4 runs at n = 64).
pub fn check_erasure_report_independence() -> CheckResult {
    const NAME: &str = "erasure-report-independence";
    let n = 64usize;
    let runs = 5000usize;
    let mut counts = [vec![0u32; n], vec![0u32; n]];
    for seed in 0..runs as u64 {
        for (ci, choice) in [Basis::Computational, Basis::Hadamard].iter().enumerate() {
            let p = Params {
                n,
                ell: 8,
                seed: seed.wrapping_add(ci as u64 * 0x9e37_79b9_7f4a_7c15),
                ..Params::default()
            };
            let t = try_check!(NAME, run_rot_practical(&p, &Receiver::Honest(*choice)));
            let report = t.erasure_report.expect("practical mode reports erasures");
            for i in 0..n {
                if report.get(i) {
                    counts[ci][i] += 1;
                }
            }
        }
    }
    let stat: f64 = (0..n)
        .map(|i| {
            let a = f64::from(counts[0][i]);
            let b = f64::from(counts[1][i]);
            let pooled = (a + b) / (2.0 * runs as f64);
            let expect = runs as f64 * pooled;
            let var = expect * (1.0 - pooled);
            if var > 0.0 {
                (a - expect).powi(2) / var + (b - expect).powi(2) / var
            } else {
                0.0
            }
        })
        .sum();
    let dist = statrs::distribution::ChiSquared::new(n as f64).expect("valid dof");
    let p_value = 1.0 - statrs::distribution::ContinuousCDF::cdf(&dist, stat);
    CheckResult::of(
        NAME,
        p_value > 0.01,
        format!("chi-square {stat:.1} on {n} dof, p = {p_value:.4} over {} runs", 2 * runs),
    )
}

/// 10. Storage-noise trade-off surface: non-empty secure region,
/// monotone in the noise-scaling parameter, pinned boundary at a = 1.
pub fn check_tradeoff_surface() -> CheckResult {
    const NAME: &str = "tradeoff-surface";
    let mut secure = 0usize;
    let mut total = 0usize;
    for ri in 1..=50 {
        let r = ri as f64 / 50.0;
        let mut prev = f64::INFINITY;
        for ai in 0..=20 {
            let a = 1.0 + ai as f64 * 0.05;
            if a * r > 1.0 {
                break;
            }
            let v = try_check!(NAME, tradeoff_value(r, a));
            total += 1;
            if v < 0.0 {
                secure += 1;
            }
            if v > prev + 1e-12 {
                return CheckResult::fail(NAME, format!("value rose in a at r = {r}, a = {a}"));
            }
            prev = v;
        }
    }
    if secure == 0 {
        return CheckResult::fail(NAME, format!("no secure grid point among {total}"));
    }
    let root = try_check!(NAME, tradeoff_boundary_root(1.0));
    let golden = 1.0;
    let gap = (root - golden).abs();
    CheckResult::of(
        NAME,
        gap <= 1e-6,
        format!("{secure}/{total} secure points; boundary root at a = 1 is {root:.8} (pinned {golden})"),
    )
}

/// 11. Product-to-power inequality behind the security exponent: equality at
/// the symmetric point, inequality on random admissible instances.
pub fn check_guessing_inequality() -> CheckResult {
    const NAME: &str = "guessing-inequality";
    let (holds, lhs, rhs) = try_check!(NAME, lemma5_check(&[0.5; 12], 0.5));
    if !holds || (lhs - rhs).abs() > 1e-12 {
        return CheckResult::fail(NAME, format!("symmetric point: lhs {lhs:.3e}, rhs {rhs:.3e}"));
    }
    let mut rng = test_rng(1101);
    let mut min_slack = f64::INFINITY;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=20usize);
        let p_list: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..=1.0)).collect();
        let product: f64 = p_list.iter().product();
        let cap = product.powf(1.0 / n as f64);
        let (holds, lhs, rhs) = try_check!(NAME, lemma5_check(&p_list, cap));
        min_slack = min_slack.min(rhs - lhs);
        if !holds {
            return CheckResult::fail(NAME, format!("violated: lhs {lhs:.3e} > rhs {rhs:.3e}"));
        }
    }
    CheckResult::pass(
        NAME,
        format!("equality at symmetric point; 10^4 random instances hold, min slack {min_slack:.2e}"),
    )
}

/// 12. Two-universal hashing at (n, ell) = (8, 3) and exhaustive single-flip
/// recovery of the block code up to 28 bits.
pub fn check_hashing_and_codes() -> CheckResult {
    const NAME: &str = "hashing-and-codes";
    // Hashing: worst pairwise collision rate over all 256 inputs, 4000
    // sampled hashes, within binomial noise of 1/8.
    let mut rng = test_rng(1201);
    let samples = 4000usize;
    let images: Vec<Vec<u64>> = (0..samples)
        .map(|_| {
            let h = sample_hash(8, 3, &mut rng).expect("valid shape");
            (0..256u64)
                .map(|v| h.eval(&BitString::from_u64(v, 8)).expect("sized input").as_u64())
                .collect()
        })
        .collect();
    let mut worst = 0.0f64;
    for x in 0..256usize {
        for y in (x + 1)..256 {
            let collisions = images.iter().filter(|img| img[x] == img[y]).count();
            worst = worst.max(collisions as f64 / samples as f64);
        }
    }
    let tol = 0.125 + 4.0 * (0.125 * 0.875 / samples as f64).sqrt();
    if worst > tol {
        return CheckResult::fail(NAME, format!("collision rate {worst:.4} above {tol:.4}"));
    }

    // Codes: every single-flip pattern on every message up to 28 bits
    // decodes back exactly.
    let code = LinearCode::hamming_7_4();
    let mut rng = test_rng(1202);
    let mut checked = 0usize;
    for len in 1..=28usize {
        for _ in 0..40 {
            let x = BitString::random(len, &mut rng);
            let syn = code.syndrome(&x);
            for flip in 0..len {
                let mut noisy = x.clone();
                noisy.flip(flip);
                let decoded = match code.decode(&noisy, &syn) {
                    Ok(d) => d,
                    Err(e) => return CheckResult::fail(NAME, format!("decode error: {e}")),
                };
                checked += 1;
                if decoded != x {
                    return CheckResult::fail(NAME, format!("misdecoded flip {flip} at len {len}"));
                }
            }
        }
    }
    CheckResult::pass(
        NAME,
        format!("collision rate {worst:.4} <= {tol:.4}; {checked} single-flip decodes exact"),
    )
}

/// Names and runners for every acceptance check, in numbered order; lets
/// callers run a selected subset without paying for the rest.
pub fn all_checks_lazy() -> Vec<(&'static str, fn() -> CheckResult)> {
    vec![
        ("optimizer-matches-analytic", check_optimizer_matches_analytic),
        ("breidbart-constant", check_breidbart_constant),
        ("error-threshold", check_error_threshold),
        ("closed-form-eigenvalues", check_closed_form_eigs),
        ("measurement-uncertainty", check_measurement_uncertainty),
        ("product-dual-certificates", check_product_dual_certificates),
        ("exhaustive-sender-security", check_exhaustive_sender_security),
        ("protocol-correctness", check_protocol_correctness),
        ("erasure-report-independence", check_erasure_report_independence),
        ("tradeoff-surface", check_tradeoff_surface),
        ("guessing-inequality", check_guessing_inequality),
        ("hashing-and-codes", check_hashing_and_codes),
    ]
}

/// Every acceptance check, in numbered order.
pub fn all_checks() -> Vec<CheckResult> {
    all_checks_lazy().into_iter().map(|(_, run)| run()).collect()
}
