//! Generators, golden data and invariant checks shared by the integration
//! test targets. Every check draws from its own stream derived from
//! [`GLOBAL_SEED`], so a check gives the same result whether it runs alone or
//! inside the full suite.
#![allow(dead_code)]

use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, FileFailurePersistence, RngSeed, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zlrr::analysis::{binet_squarefree, predict_divergence, principal_coefficient, scaled_by_power, Divergence};
use zlrr::lab::{
    random_beta, random_zlrr, runtime_experiment, slowdown_experiment, slowdown_family, write_csv,
    ExperimentConfig,
};
use zlrr::poly::{sturm_root_count, Interval, Polynomial, Rat};
use zlrr::recurrence::{Classification, Recurrence};
use zlrr::roots::{all_roots_numeric, elementary_symmetric, principal_root, sign_at_principal_root};
use zlrr::zeroing::{Termination, Zeroing, ZeroingOptions, ZeroingTrace};

pub const GLOBAL_SEED: u64 = 0x5EED_0F_2EC5;

pub fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(GLOBAL_SEED);
    r.set_stream(stream);
    r
}

fn proptest_runner(stream: u64, cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        rng_seed: RngSeed::Fixed(GLOBAL_SEED ^ stream),
        failure_persistence: Some(Box::new(FileFailurePersistence::Off)),
        ..Config::default()
    })
}

pub fn ints(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| Rat::from_integer(x.into())).collect()
}

/// `(a, b, ...)` with rationals written `p/q`.
pub fn show(v: &[Rat]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

pub fn pow10_neg(k: u32) -> Rat {
    Rat::new(BigInt::one(), BigInt::from(10u32).pow(k))
}

/// Recurrence coefficients and the derived polynomial obtained with prefix
/// `(1, -1)`.
pub const GOLDEN_DERIVATIONS: [(&[i64], &str); 19] = [
    (&[0, 1, 1], "x^5-x^4-1"),
    (&[0, 1, 1, 1], "x^6-x^5-x^2-1"),
    (&[0, 2, 2], "x^5-x^4-2x-4"),
    (
        &[0, 19, 0, 0, 38],
        "x^29-x^28-310601172680577x^4-40586681545596725x^3-4277914985538462x^2-170201741455942x-81203021913963806",
    ),
    (&[0, 6, 3, 5], "x^10-x^9-69x^3-1669x^2-722x-1245"),
    (&[0, 0, 1, 1], "x^20-x^19-4x^3-x^2-1"),
    (&[0, 0, 3, 1, 3], "x^13-x^12-14x^4-3x^3-54x^2-4x-39"),
    (
        &[0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1],
        "x^358-x^357-4000705295x^19-7080648306x^18-575930712x^17-1937068817x^16-1082811308x^15-92014103x^14-2546102784x^13-1062101754x^12-372938426x^11-3264026504x^10-996542899x^9-834914708x^8-4089249024x^7-890353375x^6-1541366894x^5-5013188421x^4-759208181x^3-2567648478x^2-6018966637x-635668820",
    ),
    (
        &[0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1],
        "x^156-x^155-16626x^20-6x^19-16814x^18-4094x^17-1037x^16-6777x^15-5088x^14-1849x^13-9106x^12-6334x^11-3060x^10-12166x^9-7932x^8-4851x^7-16190x^6-10031x^5-7482x^4-21483x^3-12839x^2-11312x-11809",
    ),
    (&[0, 1, 2, 0, 2, 3], "x^11-x^10-2x^5-2x^4-15x^3-x^2-7x-15"),
    (
        &[0, 0, 0, 40, 52],
        "x^25-x^24-555888384x^4-1064960000x^3-519168000x^2-3308595200x-4535145472",
    ),
    (
        &[0, 0, 0, 0, 0, 0, 0, 0, 1, 1],
        "x^488-x^487-7634770044678x^9-16848326467063x^8-25319805215106x^7-29495744687667x^6-27304765351108x^5-19325535741204x^4-8910253837548x^3-1049595609091x^2-321640563521x-1106933774826",
    ),
    (&[0, 0, 1, 0, 1, 0, 1], "x^23-x^22-x^6-6x^5-x^4-6x^3-x^2-3x-2"),
    (&[0, 3, 5], "x^5-x^4-2x^2-4x-15"),
    (
        &[0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1],
        "x^572-x^571-141734291356872x^12-1386240086076478x^11-3383864145243271x^10-4628373080436668x^9-4069191511013055x^8-2094637579574813x^7-395154232336030x^6-528518791146011x^5-1761055564629423x^4-2792877805797871x^3-2780671348399214x^2-1681201891412681x-401879825813162",
    ),
    (
        &[0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1],
        "x^665-x^664-17581679276200473x^10-43065699679149511x^9-70765959937154578x^8-91624450164084254x^7-98016133194347743x^6-86803369058214690x^5-61120624939489989x^4-30036033003931493x^3-5927897678515792x^2-271244487735336x-1643001862841472",
    ),
    (&[0, 1, 0, 0, 0, 0, 1], "x^37-x^36-18x^6-2x^5-9x^4-2x^3-7x^2-9x-4"),
    (&[0, 0, 2, 3, 0, 5], "x^19-x^18-75x^5-207x^4-708x^3-384x^2-370x-740"),
    (&[0, 1, 2], "x^8-x^7-x^2-x-6"),
];

/// Any non-degenerate recurrence (PLRR or ZLRR) of order in `degrees` with
/// coefficients in `[0, bound]`.
pub fn random_recurrence<R: Rng>(rng: &mut R, degrees: std::ops::RangeInclusive<usize>, bound: i64) -> Recurrence {
    loop {
        let l = rng.gen_range(degrees.clone());
        let mut c: Vec<i64> = (0..l).map(|_| rng.gen_range(0..=bound)).collect();
        c[l - 1] = rng.gen_range(1..=bound);
        if let Ok(rec) = Recurrence::from_i64s(&c) {
            return rec;
        }
    }
}

pub fn random_squarefree<R: Rng>(rng: &mut R, degrees: std::ops::RangeInclusive<usize>) -> Polynomial {
    loop {
        let p = random_recurrence(rng, degrees.clone(), 9).characteristic_polynomial();
        if p.is_squarefree() {
            return p;
        }
    }
}

fn random_rational<R: Rng>(rng: &mut R, bound: i64) -> Rat {
    let den = rng.gen_range(1..=6i64);
    Rat::new(rng.gen_range(-bound * den..=bound * den).into(), den.into())
}

fn random_poly<R: Rng>(rng: &mut R, max_degree: usize, bound: i64) -> Polynomial {
    let d = rng.gen_range(0..=max_degree);
    Polynomial::new((0..=d).map(|_| random_rational(rng, bound)).collect())
}

/// `(P, beta)` pairs with the expected sign of `Q0(r)`: random ones first,
/// then constructed pairs where `Q0` shares the factor of `P` that vanishes
/// at `r`, so `Q0(r) = 0`.
pub struct TerminationCase {
    pub p: Polynomial,
    pub beta: Vec<Rat>,
    pub constructed_zero: bool,
}

pub fn termination_cases(random: usize, boundary: usize) -> Vec<TerminationCase> {
    let mut g = rng(4);
    let mut out = Vec::with_capacity(random + boundary);
    while out.len() < random {
        let rec = if out.len() % 2 == 0 {
            let degree = g.gen_range(3..=6);
            random_zlrr(degree, 9, &mut g).unwrap()
        } else {
            random_recurrence(&mut g, 2..=6, 9)
        };
        let beta = random_beta(rec.order(), 10, &mut g);
        out.push(TerminationCase { p: rec.characteristic_polynomial(), beta, constructed_zero: false });
    }
    while out.len() < random + boundary {
        let a = random_recurrence(&mut g, 2..=4, 5).characteristic_polynomial();
        let a_deg = a.degree().unwrap();
        let j = g.gen_range(1..=(6 - a_deg).max(1));
        let b = &Polynomial::monomial(Rat::one(), j) + &Polynomial::one();
        let p = &a * &b;
        if Zeroing::new(&p).is_err() {
            continue;
        }
        let c = Polynomial::new((0..j).map(|_| Rat::from_integer(g.gen_range(-5..=5i64).into())).collect());
        if c.is_zero() {
            continue;
        }
        let q0 = &a * &c;
        let k = p.degree().unwrap();
        let mut beta = vec![Rat::zero(); k - 1 - q0.degree().unwrap()];
        beta.extend(q0.coeffs().iter().rev().cloned());
        out.push(TerminationCase { p, beta, constructed_zero: true });
    }
    out
}

/// Outcome of one termination case.
pub struct TerminationOutcome {
    pub sign: i8,
    pub trace: ZeroingTrace,
    pub forced: Option<ZeroingTrace>,
}

pub const FORCED_BUDGET: usize = 1500;

pub fn run_termination_case(case: &TerminationCase) -> Result<TerminationOutcome, String> {
    let sign = sign_at_principal_root(&Zeroing::new(&case.p).unwrap().q0(&case.beta).unwrap(), &case.p)
        .map_err(|e| e.to_string())?;
    let z = Zeroing::new(&case.p).map_err(|e| e.to_string())?;
    let trace = z.run(&case.beta, &ZeroingOptions::default()).map_err(|e| e.to_string())?;
    let forced = if sign >= 0 {
        let opts = ZeroingOptions { budget: FORCED_BUDGET, force: true, keep_trace: true };
        Some(z.run(&case.beta, &opts).map_err(|e| e.to_string())?)
    } else {
        None
    };
    Ok(TerminationOutcome { sign, trace, forced })
}

/// `Ok(())` when the outcome agrees with "terminates iff `Q0(r) < 0`".
pub fn termination_agrees(case: &TerminationCase, o: &TerminationOutcome) -> Result<(), String> {
    if case.constructed_zero && o.sign != 0 {
        return Err(format!("constructed case {} / {} has sign {}", case.p, show(&case.beta), o.sign));
    }
    match (o.sign, o.trace.termination()) {
        (-1, Termination::TerminatedAt(_)) => Ok(()),
        (s, Termination::WontTerminate { sign }) if s >= 0 && sign == s => match &o.forced {
            Some(f) if f.termination() == (Termination::Budget { steps: FORCED_BUDGET }) => Ok(()),
            Some(f) => Err(format!("P={} beta={}: sign {s} but forced run ended {:?}", case.p, show(&case.beta), f.termination())),
            None => Err("forced run missing".into()),
        },
        (s, t) => Err(format!("P={} beta={}: sign {s}, termination {t:?}", case.p, show(&case.beta))),
    }
}

/// A named invariant check returning a one-line summary on success.
pub struct Check {
    pub name: &'static str,
    pub run: fn() -> Result<String, String>,
}

pub fn all_checks() -> Vec<Check> {
    vec![
        Check { name: "poly: exact division round trip", run: poly_division_round_trip },
        Check { name: "poly: gcd divides both operands", run: poly_gcd_divides },
        Check { name: "poly: interval evaluation encloses point values", run: poly_interval_soundness },
        Check { name: "poly: results are canonical", run: poly_canonical_form },
        Check { name: "recurrence: classification totality", run: recurrence_classification_totality },
        Check { name: "recurrence: non-negative starts grow", run: recurrence_eventually_increasing },
        Check { name: "recurrence: characteristic polynomial round trip", run: recurrence_characteristic_round_trip },
        Check { name: "roots: exact sign agrees with fine midpoint", run: roots_sign_agreement },
        Check { name: "roots: principal root dominates", run: roots_dominance_gap },
        Check { name: "roots: Vieta consistency", run: roots_vieta },
        Check { name: "roots: elementary symmetric identity", run: roots_esp_identity },
        Check { name: "roots: refinement keeps the root", run: roots_refinement_monotone },
        Check { name: "zeroing: iteration identities", run: zeroing_iteration_identities },
        Check { name: "zeroing: evaluation invariant", run: zeroing_evaluation_invariant },
        Check { name: "zeroing: termination iff Q0(r) < 0", run: zeroing_termination_soundness },
        Check { name: "zeroing: tail bound", run: zeroing_tail_bound },
        Check { name: "zeroing: derivation correctness", run: zeroing_derivation_correctness },
        Check { name: "analysis: predictor agrees with iteration", run: analysis_predictor_vs_oracle },
        Check { name: "analysis: predictor is scale invariant", run: analysis_linearity },
        Check { name: "analysis: Binet reconstruction", run: analysis_binet_reconstruction },
        Check { name: "analysis: principal coefficient limit and sign", run: analysis_principal_coefficient },
        Check { name: "lab: determinism and per-record checks", run: lab_records },
        Check { name: "lab: monotone slowdown", run: lab_monotone_slowdown },
        Check { name: "cli: convert round trip", run: cli_convert_round_trip },
        Check { name: "cli: exit codes", run: cli_exit_codes },
        Check { name: "cli: identical invocations give identical files", run: cli_output_stability },
    ]
}

fn poly_strategy(max_degree: usize) -> impl Strategy<Value = Polynomial> {
    proptest::collection::vec((-20i64..=20, 1i64..=4), 0..=max_degree + 1)
        .prop_map(|v| Polynomial::new(v.into_iter().map(|(n, d)| Rat::new(n.into(), d.into())).collect()))
}

fn nonzero_poly_strategy(max_degree: usize) -> impl Strategy<Value = Polynomial> {
    poly_strategy(max_degree).prop_filter("nonzero", |p| !p.is_zero())
}

fn poly_division_round_trip() -> Result<String, String> {
    let mut runner = proptest_runner(1, 500);
    runner
        .run(&(poly_strategy(6), nonzero_poly_strategy(4)), |(a, b)| {
            let prod = &a * &b;
            prop_assert_eq!(prod.divide_exact(&b).unwrap(), a.clone());
            if let Ok(q) = a.divide_exact(&b) {
                prop_assert_eq!(&b * &q, a.clone());
            }
            let (q, r) = a.div_rem(&b).unwrap();
            prop_assert_eq!(&(&b * &q) + &r, a.clone());
            prop_assert!(r.is_zero() || r.degree() < b.degree());
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("500 cases".into())
}

fn poly_gcd_divides() -> Result<String, String> {
    let mut runner = proptest_runner(2, 300);
    runner
        .run(&(poly_strategy(4), poly_strategy(4), nonzero_poly_strategy(3)), |(a, b, common)| {
            let a = &a * &common;
            let b = &b * &common;
            if a.is_zero() && b.is_zero() {
                return Ok(());
            }
            let g = a.gcd(&b).unwrap();
            prop_assert!(a.divide_exact(&g).is_ok());
            prop_assert!(b.divide_exact(&g).is_ok());
            if !a.is_zero() && !b.is_zero() {
                prop_assert!(g.divide_exact(&common).is_ok(), "gcd {} misses {}", g, common);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("300 cases".into())
}

fn poly_interval_soundness() -> Result<String, String> {
    let mut g = rng(3);
    for _ in 0..1000 {
        let p = random_poly(&mut g, 6, 10);
        let a = random_rational(&mut g, 5);
        let b = random_rational(&mut g, 5);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let t = Rat::new(g.gen_range(0..=100i64).into(), 100.into());
        let x = &lo + (&hi - &lo) * t;
        let range = Interval::new(lo, hi).unwrap();
        let v = p.eval(&x);
        if !p.eval_interval(&range).contains(&v) {
            return Err(format!("{p} at {x}: {v} outside {}", p.eval_interval(&range)));
        }
    }
    Ok("1000 triples".into())
}

fn is_canonical(p: &Polynomial) -> bool {
    p.coeffs().last().is_none_or(|c| !c.is_zero())
        && p.coeffs().iter().all(|c| c.denom().is_positive() && c.numer().gcd(c.denom()).is_one())
}

fn poly_canonical_form() -> Result<String, String> {
    let mut runner = proptest_runner(5, 300);
    runner
        .run(&(poly_strategy(5), nonzero_poly_strategy(3)), |(a, b)| {
            let (q, r) = a.div_rem(&b).unwrap();
            let results = [
                &a + &b,
                &a - &a,
                &a * &b,
                q,
                r,
                a.derivative(),
                a.gcd(&b).unwrap(),
                b.monic(),
                b.squarefree_part().unwrap(),
            ];
            for p in &results {
                prop_assert!(is_canonical(p), "not canonical: {:?}", p);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("300 cases".into())
}

fn recurrence_classification_totality() -> Result<String, String> {
    let mut runner = proptest_runner(6, 1000);
    runner
        .run(&proptest::collection::vec(-3i64..=5, 1..8), |c| {
            match Recurrence::from_i64s(&c) {
                Ok(rec) => {
                    prop_assert!(c.iter().all(|&x| x >= 0) && *c.last().unwrap() > 0);
                    match rec.classification() {
                        Classification::Plrr => prop_assert!(c[0] > 0),
                        Classification::Zlrr { depth } => {
                            prop_assert!(depth >= 1 && c[..depth].iter().all(|&x| x == 0) && c[depth] > 0)
                        }
                    }
                }
                Err(_) => {
                    let support: Vec<usize> = (1..=c.len()).filter(|&i| c[i - 1] != 0).collect();
                    let gcd = support.iter().fold(0usize, |g, &i| g.gcd(&i));
                    prop_assert!(c.iter().any(|&x| x < 0) || *c.last().unwrap() == 0 || gcd != 1);
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("1000 vectors".into())
}

fn recurrence_eventually_increasing() -> Result<String, String> {
    let mut g = rng(7);
    for _ in 0..200 {
        let rec = random_recurrence(&mut g, 1..=6, 9);
        // `a_{n+1} = a_n` has r = 1 and stays constant.
        if rec.coeffs().len() == 1 && rec.coeff(1).is_one() {
            continue;
        }
        let init: Vec<Rat> = loop {
            let v: Vec<Rat> = (0..rec.order()).map(|_| Rat::from_integer(g.gen_range(0..=5i64).into())).collect();
            if v.iter().any(|x| !x.is_zero()) {
                break v;
            }
        };
        let terms = rec.iterate_terms(&init, 200).unwrap().terms;
        if !terms[180..].windows(2).all(|w| w[0] < w[1]) {
            return Err(format!("{:?} from {:?} is not increasing by n = 200", rec.coeffs(), show(&init)));
        }
    }
    Ok("200 sequences".into())
}

fn recurrence_characteristic_round_trip() -> Result<String, String> {
    let mut g = rng(8);
    for _ in 0..500 {
        let rec = random_recurrence(&mut g, 1..=8, 20);
        let p = rec.characteristic_polynomial();
        let l = rec.order();
        for i in 1..=l {
            if -p.coeff(l - i) != Rat::from_integer(rec.coeff(i)) {
                return Err(format!("coefficient {i} of {:?} lost in {p}", rec.coeffs()));
            }
        }
        if Recurrence::from_characteristic(&p).unwrap() != rec {
            return Err(format!("{p} does not map back"));
        }
    }
    Ok("500 recurrences".into())
}

fn roots_sign_agreement() -> Result<String, String> {
    let mut g = rng(9);
    let mut compared = 0;
    for _ in 0..500 {
        let p = random_recurrence(&mut g, 1..=6, 9).characteristic_polynomial();
        let q = random_poly(&mut g, 6, 10);
        let s = sign_at_principal_root(&q, &p).map_err(|e| e.to_string())?;
        let mid = principal_root(&p, &pow10_neg(30)).unwrap().midpoint();
        let v = q.eval(&mid);
        if v.abs() > pow10_neg(20) {
            compared += 1;
            let expect = if v.is_positive() { 1 } else { -1 };
            if s != expect {
                return Err(format!("sign of {q} at root of {p}: {s}, midpoint says {expect}"));
            }
        }
    }
    Ok(format!("500 pairs, {compared} compared"))
}

fn roots_dominance_gap() -> Result<String, String> {
    let mut g = rng(10);
    let gap = 1e-12;
    for _ in 0..200 {
        let degree = g.gen_range(3..=6);
        let rec = random_zlrr(degree, 9, &mut g).unwrap();
        let roots = all_roots_numeric(&rec.characteristic_polynomial(), 30).map_err(|e| e.to_string())?;
        let r = roots.roots()[0].to_c64();
        if !roots.roots()[0].is_real() || r.re <= 0.0 {
            return Err(format!("{:?}: first root {r} is not the principal root", rec.coeffs()));
        }
        let max_other = roots.roots()[1..].iter().map(|x| x.to_c64().norm()).fold(0.0, f64::max);
        if max_other >= r.re - gap {
            return Err(format!("{:?}: |r_i| = {max_other} vs r = {}", rec.coeffs(), r.re));
        }
    }
    Ok("200 ZLRRs".into())
}

fn roots_vieta() -> Result<String, String> {
    let mut g = rng(11);
    for _ in 0..200 {
        let p = random_squarefree(&mut g, 1..=6);
        let k = p.degree().unwrap();
        let roots = all_roots_numeric(&p, 30).map_err(|e| e.to_string())?.with_multiplicity_c64();
        for n in 1..=k {
            let s = elementary_symmetric(&roots, n).unwrap();
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            let c_n = -p.coeff(k - n).to_f64().unwrap();
            if (s * sign - c_n).norm() > 1e-8 {
                return Err(format!("{p}: S_{n} = {s}, c_{n} = {c_n}"));
            }
        }
    }
    Ok("200 polynomials".into())
}

fn roots_esp_identity() -> Result<String, String> {
    let mut g = rng(12);
    for _ in 0..200 {
        let degree = g.gen_range(3..=6);
        let rec = random_zlrr(degree, 9, &mut g).unwrap();
        let p = rec.characteristic_polynomial();
        let roots = all_roots_numeric(&p, 30).map_err(|e| e.to_string())?.with_multiplicity_c64();
        let rest = &roots[1..];
        let s = |n: usize| elementary_symmetric(rest, n).unwrap_or(Complex64::new(0.0, 0.0));
        for n in 2..=degree {
            let c_n = rec.coeff(n).to_f64().unwrap();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let lhs = s(1) * s(n - 1);
            let rhs = s(n) + sign * c_n;
            if (lhs - rhs).norm() > 1e-8 {
                return Err(format!("{p}, n = {n}: {lhs} vs {rhs}"));
            }
        }
    }
    Ok("200 ZLRRs".into())
}

fn roots_refinement_monotone() -> Result<String, String> {
    let mut g = rng(13);
    for _ in 0..100 {
        let p = random_recurrence(&mut g, 1..=6, 9).characteristic_polynomial();
        let mut e = principal_root(&p, &Rat::one()).unwrap();
        for digits in [2u32, 5, 10, 20, 40] {
            let next = e.refine(&pow10_neg(digits)).unwrap();
            if !next.interval().is_subset_of(e.interval()) {
                return Err(format!("{p}: refinement left the previous enclosure"));
            }
            if sturm_root_count(&p, next.interval()).unwrap() != 1 {
                return Err(format!("{p}: root lost at 1e-{digits}"));
            }
            e = next;
        }
    }
    Ok("100 polynomials".into())
}

fn zeroing_iteration_identities() -> Result<String, String> {
    let mut g = rng(14);
    let mut steps = 0;
    for _ in 0..300 {
        let rec = random_recurrence(&mut g, 2..=6, 9);
        let p = rec.characteristic_polynomial();
        let k = rec.order();
        let beta = random_beta(k, 10, &mut g);
        let beta_s = show(&beta);
        let z = Zeroing::new(&p).unwrap();
        let opts = ZeroingOptions { budget: 300, force: true, keep_trace: true };
        let tr = z.run(&beta, &opts).map_err(|e| e.to_string())?;
        let polys = tr.polys();
        let c = |i: usize| Rat::from_integer(rec.coeff(i));
        for t in 1..polys.len() {
            let q1_prev = tr.q(1, t - 1).unwrap();
            let expect = &polys[t - 1].shift(1) - &p.scale(&q1_prev);
            if expect.degree().is_some_and(|d| d >= k) || expect != polys[t] {
                return Err(format!("{p} beta {beta_s}: Q_{t} is not x Q_{} - q(1,{}) P", t - 1, t - 1));
            }
            for n in 1..=k {
                let next = if n < k { tr.q(n + 1, t - 1).unwrap() } else { Rat::zero() };
                if tr.q(n, t).unwrap() != next + c(n) * &q1_prev {
                    return Err(format!("{p} beta {beta_s}: q({n},{t}) breaks the coefficient recurrence"));
                }
            }
            steps += 1;
        }
        let q1 = tr.q1_sequence();
        for t in k..q1.len() {
            let s = (1..=k).fold(Rat::zero(), |acc, i| acc + c(i) * &q1[t - i]);
            if s != q1[t] {
                return Err(format!("{p} beta {beta_s}: q(1,{t}) does not follow the recurrence"));
            }
        }
        let from_start = z.q1_initial_values(&beta).unwrap();
        if q1.len() >= k && from_start[..] != q1[..k] {
            return Err(format!("{p} beta {beta_s}: initial q(1,t) values differ"));
        }
    }
    Ok(format!("300 runs, {steps} steps"))
}

fn zeroing_evaluation_invariant() -> Result<String, String> {
    let mut g = rng(15);
    for _ in 0..100 {
        let degree = g.gen_range(3..=6);
        let rec = random_zlrr(degree, 9, &mut g).unwrap();
        let p = rec.characteristic_polynomial();
        let beta = random_beta(degree, 10, &mut g);
        let beta_s = show(&beta);
        let z = Zeroing::new(&p).unwrap();
        let tr = z.run(&beta, &ZeroingOptions { budget: 60, force: true, keep_trace: true }).unwrap();
        let enc = principal_root(&p, &pow10_neg(20)).unwrap();
        let q0_at_r = enc.eval(&z.q0(&beta).unwrap());
        let mut r_pow = Interval::point(Rat::one());
        for (t, qt) in tr.polys().iter().enumerate() {
            let lhs = enc.eval(qt);
            let rhs = r_pow.mul(&q0_at_r);
            r_pow = r_pow.mul(enc.interval());
            if lhs.hi() < rhs.lo() || rhs.hi() < lhs.lo() {
                return Err(format!("{p} beta {beta_s}: Q_{t}(r) and r^{t} Q0(r) enclosures are disjoint"));
            }
        }
        if p.is_squarefree() && tr.sign_q0_at_r() != 0 {
            let a1 = principal_coefficient(&z, &beta, 30).map_err(|e| e.to_string())?;
            if zlrr::analysis::sign_f64(a1.a1) != tr.sign_q0_at_r() {
                return Err(format!("{p} beta {beta_s}: a1 = {} but sign Q0(r) = {}", a1.a1, tr.sign_q0_at_r()));
            }
        }
    }
    Ok("100 runs".into())
}

fn zeroing_termination_soundness() -> Result<String, String> {
    let cases = termination_cases(1000, 50);
    let mut by_sign = [0usize; 3];
    for case in &cases {
        let o = run_termination_case(case)?;
        termination_agrees(case, &o)?;
        by_sign[(o.sign + 1) as usize] += 1;
    }
    Ok(format!("{} cases; sign -1/0/+1: {}/{}/{}", cases.len(), by_sign[0], by_sign[1], by_sign[2]))
}

/// `c_1 = 0`, the setting in which the tail bound is claimed.
pub fn is_zero_leading(p: &Polynomial) -> bool {
    let k = p.degree().unwrap();
    k >= 1 && p.coeff(k - 1).is_zero()
}

fn zeroing_tail_bound() -> Result<String, String> {
    let cases = termination_cases(1000, 0);
    let mut checked = 0;
    for case in &cases {
        if !is_zero_leading(&case.p) {
            continue;
        }
        let z = Zeroing::new(&case.p).unwrap();
        let tr = z.run(&case.beta, &ZeroingOptions::default()).unwrap();
        if let Some(ok) = tr.tail_bound_holds() {
            checked += 1;
            if !ok {
                return Err(format!(
                    "{} beta {}: terminated at {}, q(1,t) non-positive from {}",
                    case.p,
                    show(&case.beta),
                    tr.steps(),
                    tr.q1_nonpositive_at()
                ));
            }
        }
    }
    Ok(format!("{checked} terminating ZLRR runs"))
}

fn check_derivation(rec: &Recurrence, gamma: &[Rat], budget: usize) -> Result<(), String> {
    let p = rec.characteristic_polynomial();
    let z = Zeroing::new(&p).unwrap();
    let d = z.run_modified(gamma, budget).map_err(|e| format!("{:?}: {e}", rec.coeffs()))?;
    let quotient = d.p.divide_exact(&p).map_err(|e| format!("{:?}: {e}", rec.coeffs()))?;
    if quotient != d.quotient {
        return Err(format!("{:?}: stored quotient differs", rec.coeffs()));
    }
    let deg = d.p.degree().unwrap();
    for (i, g) in gamma.iter().enumerate() {
        if &d.p.coeff(deg - i) != g {
            return Err(format!("{:?}: prefix of {} is not {}", rec.coeffs(), d.p, show(gamma)));
        }
    }
    if (0..=deg - gamma.len()).any(|i| d.p.coeff(i).is_positive()) {
        return Err(format!("{:?}: {} has a positive tail coefficient", rec.coeffs(), d.p));
    }
    if gamma.iter().all(|x| x.is_integer()) && !quotient.is_integral() {
        return Err(format!("{:?}: quotient {quotient} is not integral", rec.coeffs()));
    }
    if is_zero_leading(&p) && !d.tail_bound_holds() {
        return Err(format!("{:?}: tail bound fails in the plain phase", rec.coeffs()));
    }
    Ok(())
}

fn zeroing_derivation_correctness() -> Result<String, String> {
    let mut g = rng(16);
    for _ in 0..100 {
        let degree = g.gen_range(3..=6);
        let rec = random_zlrr(degree, 9, &mut g).unwrap();
        check_derivation(&rec, &ints(&[1, -1]), 1_000_000)?;
    }
    let mut done = 0;
    while done < 50 {
        let rec = random_recurrence(&mut g, 1..=5, 9);
        let mut gamma = vec![Rat::one()];
        for _ in 0..g.gen_range(1..=3) {
            gamma.push(random_rational(&mut g, 3));
        }
        let gamma_poly = Polynomial::from_descending(gamma.clone());
        if sign_at_principal_root(&gamma_poly, &rec.characteristic_polynomial()).unwrap() <= 0 {
            continue;
        }
        check_derivation(&rec, &gamma, 1_000_000)?;
        done += 1;
    }
    Ok("150 derivations".into())
}

/// Sign shown by the last `window` terms if all share one sign and exceed
/// `threshold` in magnitude.
pub fn decisive_sign(terms: &[Rat], window: usize, threshold: &Rat) -> Option<i8> {
    let tail = &terms[terms.len() - window..];
    if tail.iter().all(|x| x > threshold) {
        Some(1)
    } else if tail.iter().all(|x| x < &-threshold) {
        Some(-1)
    } else {
        None
    }
}

pub struct PredictorReport {
    pub pairs: usize,
    pub decisive: usize,
    pub zero_verdicts: usize,
    pub mismatches: Vec<String>,
}

/// Runs the predictor against 400 exact terms on `count` random pairs.
pub fn predictor_vs_oracle(count: usize) -> PredictorReport {
    let mut g = rng(17);
    let threshold = Rat::from_integer(1_000_000.into());
    let mut report = PredictorReport { pairs: count, decisive: 0, zero_verdicts: 0, mismatches: Vec::new() };
    for i in 0..count {
        let degree = g.gen_range(3..=6);
        let rec = random_zlrr(degree, 9, &mut g).unwrap();
        let init: Vec<Rat> = loop {
            let v: Vec<Rat> = (0..degree)
                .map(|_| if i % 2 == 0 { Rat::from_integer(g.gen_range(-10..=10i64).into()) } else { random_rational(&mut g, 10) })
                .collect();
            if v.iter().any(|x| !x.is_zero()) {
                break v;
            }
        };
        check_prediction(&rec, &init, &threshold, &mut report);
    }
    // Starts that cancel the dominant term exactly.
    let zero_cases: [(&[i64], &[i64]); 2] = [(&[0, 2, 1], &[1, -1, 1]), (&[0, 1, 1, 1], &[1, -1, 0, 0])];
    for (c, init) in zero_cases {
        check_prediction(&Recurrence::from_i64s(c).unwrap(), &ints(init), &threshold, &mut report);
    }
    report
}

fn check_prediction(rec: &Recurrence, init: &[Rat], threshold: &Rat, report: &mut PredictorReport) {
    let init_s = show(init);
    let verdict = match predict_divergence(rec, init) {
        Ok(v) => v,
        Err(e) => {
            report.mismatches.push(format!("{:?} {init_s}: {e}", rec.coeffs()));
            return;
        }
    };
    let terms = rec.iterate_terms(init, 400).unwrap().terms;
    if verdict.sign == Divergence::ZeroCoefficient {
        report.zero_verdicts += 1;
        let r = principal_root(&rec.characteristic_polynomial(), &pow10_neg(40)).unwrap().midpoint();
        let ratio = scaled_by_power(&terms[399], &r, 400).abs();
        if ratio.is_nan() || ratio >= 1e-3 {
            report.mismatches.push(format!("{:?} {init_s}: zero verdict but a_n / r^n = {ratio}", rec.coeffs()));
        }
    }
    if let Some(s) = decisive_sign(&terms, 20, threshold) {
        report.decisive += 1;
        if s != verdict.sign.sign() {
            report.mismatches.push(format!("{:?} {init_s}: terms have sign {s}, verdict {}", rec.coeffs(), verdict));
        }
    }
}

fn analysis_predictor_vs_oracle() -> Result<String, String> {
    let r = predictor_vs_oracle(1000);
    if let Some(m) = r.mismatches.first() {
        return Err(format!("{} mismatches, first: {m}", r.mismatches.len()));
    }
    Ok(format!("{} pairs, {} decisive, {} zero verdicts", r.pairs, r.decisive, r.zero_verdicts))
}

fn analysis_linearity() -> Result<String, String> {
    let mut g = rng(18);
    for _ in 0..300 {
        let rec = random_recurrence(&mut g, 1..=6, 9);
        let init = random_beta(rec.order(), 10, &mut g);
        let init_s = show(&init);
        let lambda = Rat::new(g.gen_range(1..=50i64).into(), g.gen_range(1..=50i64).into());
        let scaled: Vec<Rat> = init.iter().map(|x| x * &lambda).collect();
        let a = predict_divergence(&rec, &init).map_err(|e| e.to_string())?;
        let b = predict_divergence(&rec, &scaled).map_err(|e| e.to_string())?;
        if a.sign != b.sign || b.q != a.q.scale(&lambda) {
            return Err(format!("{:?} {init_s} times {lambda}: {a} vs {b}", rec.coeffs()));
        }
    }
    Ok("300 pairs".into())
}

/// Largest relative reconstruction error over `count` random squarefree `P`.
pub fn binet_worst_case(count: usize) -> Result<(f64, String), String> {
    let mut g = rng(19);
    let mut worst = (0.0f64, String::new());
    for _ in 0..count {
        let p = random_squarefree(&mut g, 1..=6);
        let b = binet_squarefree(&p, 30).map_err(|e| format!("{p}: {e}"))?;
        let err = b.max_relative_error(41).map_err(|e| format!("{p}: {e}"))?;
        if err > worst.0 {
            worst = (err, p.to_string());
        }
    }
    Ok(worst)
}

fn analysis_binet_reconstruction() -> Result<String, String> {
    let (err, p) = binet_worst_case(100)?;
    if err >= 1e-6 {
        return Err(format!("relative error {err:e} for {p}"));
    }
    Ok(format!("100 polynomials, worst relative error {err:.1e}"))
}

pub struct PrincipalSample {
    pub p: Polynomial,
    pub beta: Vec<Rat>,
    pub a1: f64,
    pub limit: f64,
    pub exact_sign: i8,
    pub ties: bool,
}

/// `count` random squarefree instances with `Q0(r) != 0`, comparing `a_1`
/// with `q(1,200) / r^200`.
pub fn principal_samples(count: usize) -> Result<Vec<PrincipalSample>, String> {
    let mut g = rng(20);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let degree = g.gen_range(3..=6);
        let rec = random_zlrr(degree, 9, &mut g).unwrap();
        let p = rec.characteristic_polynomial();
        if !p.is_squarefree() {
            continue;
        }
        let z = Zeroing::new(&p).unwrap();
        let beta = random_beta(degree, 10, &mut g);
        let exact_sign = sign_at_principal_root(&z.q0(&beta).unwrap(), &p).unwrap();
        if exact_sign == 0 {
            continue;
        }
        let pc = principal_coefficient(&z, &beta, 30).map_err(|e| format!("{p}: {e}"))?;
        let start = z.q1_initial_values(&beta).unwrap();
        let q1 = rec.iterate_terms(&start, 201).unwrap().terms;
        let run = z.run(&beta, &ZeroingOptions { budget: 200, force: true, keep_trace: true }).unwrap();
        let seen = run.q1_sequence();
        if seen[..] != q1[..seen.len()] {
            return Err(format!("{p}: q(1,t) from the run differs from the recurrence"));
        }
        let r = principal_root(&p, &pow10_neg(40)).unwrap().midpoint();
        let limit = scaled_by_power(&q1[200], &r, 200);
        out.push(PrincipalSample { p, beta, a1: pc.a1, limit, exact_sign, ties: pc.magnitude_ties });
    }
    Ok(out)
}

/// `q(1,t) / r^t` for a sample at a later step `t`.
pub fn principal_limit_at(s: &PrincipalSample, t: usize) -> f64 {
    let z = Zeroing::new(&s.p).unwrap();
    let rec = Recurrence::from_characteristic(&s.p).unwrap();
    let q1 = rec.iterate_terms(&z.q1_initial_values(&s.beta).unwrap(), t + 1).unwrap().terms;
    let r = principal_root(&s.p, &pow10_neg(40)).unwrap().midpoint();
    scaled_by_power(&q1[t], &r, t)
}

fn analysis_principal_coefficient() -> Result<String, String> {
    let samples = principal_samples(100)?;
    let mut worst = 0.0f64;
    for s in &samples {
        let diff = (s.a1 - s.limit).abs();
        worst = worst.max(diff);
        if diff >= 1e-4 {
            return Err(format!("{} beta {}: a1 = {}, q(1,200)/r^200 = {}", s.p, show(&s.beta), s.a1, s.limit));
        }
        if zlrr::analysis::sign_f64(s.a1) != s.exact_sign {
            return Err(format!("{} beta {}: sign of a1 = {} vs {}", s.p, show(&s.beta), s.a1, s.exact_sign));
        }
    }
    Ok(format!("100 instances, worst |a1 - limit| = {worst:.1e}"))
}

fn small_lab_config() -> ExperimentConfig {
    ExperimentConfig { polys_per_degree: 3, samples_per_poly: 60, seed: GLOBAL_SEED, ..ExperimentConfig::default() }
}

fn lab_records() -> Result<String, String> {
    let cfg = small_lab_config();
    let a = runtime_experiment(&cfg).map_err(|e| e.to_string())?;
    let b = runtime_experiment(&cfg).map_err(|e| e.to_string())?;
    let (mut csv_a, mut csv_b) = (Vec::new(), Vec::new());
    write_csv(&a, &mut csv_a).map_err(|e| e.to_string())?;
    write_csv(&b, &mut csv_b).map_err(|e| e.to_string())?;
    if csv_a != csv_b {
        return Err("CSV differs between identical configs".into());
    }
    let mut g = rng(21);
    let mut exact_checked = 0;
    for rec in &a {
        if rec.terminated != (rec.sign == -1) {
            return Err(format!("record {rec:?} breaks termination iff sign -1"));
        }
        if g.gen_ratio(1, 100) && rec.q0_at_r.abs() > 1e-9 {
            exact_checked += 1;
            if zlrr::analysis::sign_f64(rec.q0_at_r) != rec.sign {
                return Err(format!("record {rec:?}: stored sign disagrees with Q0(r) = {}", rec.q0_at_r));
            }
        }
        if let (Some(steps), Some(first)) = (rec.steps, rec.q1_nonpos_step) {
            if steps as i64 - first as i64 > rec.degree as i64 - 2 {
                return Err(format!("record {rec:?} breaks the tail bound"));
            }
        }
    }
    Ok(format!("{} records, {exact_checked} sampled signs cross-checked", a.len()))
}

fn lab_monotone_slowdown() -> Result<String, String> {
    let recs = slowdown_experiment(&slowdown_family(1..=8), 1_000_000).map_err(|e| e.to_string())?;
    let t0: Vec<usize> = recs.iter().map(|r| r.t0.unwrap_or(usize::MAX)).collect();
    if !t0.windows(2).all(|w| w[0] <= w[1]) {
        return Err(format!("t0 = {t0:?}"));
    }
    Ok(format!("t0 = {t0:?}"))
}

pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["zlrr"];
    argv.extend_from_slice(args);
    let code = zlrr::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn cli_convert_round_trip() -> Result<String, String> {
    for (c, _) in GOLDEN_DERIVATIONS {
        let coeffs: Vec<String> = c.iter().map(i64::to_string).collect();
        let (code, out, err) = run_cli(&["convert", "--coeffs", &coeffs.join(",")]);
        if code != 0 {
            return Err(format!("convert {c:?} exited {code}: {err}"));
        }
        let line = out.lines().find_map(|l| l.strip_prefix("derived polynomial: ")).ok_or("no derived polynomial line")?;
        let p: Polynomial = line.parse().map_err(|e| format!("{line}: {e}"))?;
        let base = Recurrence::from_i64s(c).unwrap().characteristic_polynomial();
        let q = p.divide_exact(&base).map_err(|e| format!("{c:?}: {e}"))?;
        if !q.is_integral() {
            return Err(format!("{c:?}: quotient {q} is not integral"));
        }
    }
    Ok("19 conversions".into())
}

fn cli_exit_codes() -> Result<String, String> {
    let cases: &[(&[&str], i32)] = &[
        (&["classify", "--coeffs", "0,1,1"], 0),
        (&["classify", "--coeffs", "0,1,0,1"], 0),
        (&["classify", "--coeffs", "1,-1"], 1),
        (&["classify", "--coeffs", "1,x"], 1),
        (&["classify"], 1),
        (&["classify", "--coeffs", "0,1,1", "--file", "nowhere.json"], 1),
        (&["classify", "--file", "/nonexistent/r.json"], 1),
        (&["convert", "--coeffs", "0,1,1"], 0),
        (&["convert", "--coeffs", "0,1,1", "--n", "2"], 2),
        (&["convert", "--coeffs", "0,1,1", "--n", "0"], 1),
        (&["convert", "--coeffs", "0,0,1", "--n", "1"], 1),
        (&["convert", "--coeffs", "0,0,0,0,0,0,0,0,1,1", "--budget", "10"], 3),
        (&["zeroing", "--coeffs", "0,2,1", "--beta", "3,-2,-5"], 0),
        (&["zeroing", "--coeffs", "0,2,1", "--beta", "1,0,0"], 2),
        (&["zeroing", "--coeffs", "0,2,1", "--beta", "1,0,0", "--force", "--budget", "5"], 3),
        (&["zeroing", "--coeffs", "0,2,1", "--beta", "0,0,0"], 1),
        (&["zeroing", "--coeffs", "0,2,1", "--beta", "1,2"], 1),
        (&["predict", "--coeffs", "0,2,1", "--init", "3,-2,1"], 0),
        (&["predict", "--coeffs", "0,2,1", "--init", "0,0,0"], 1),
        (&["predict", "--coeffs", "0,2,1"], 1),
        (&["binet", "--coeffs", "1,1"], 0),
        (&["binet", "--coeffs", "1,1", "--digits", "0"], 1),
        (&["binet", "--coeffs", "1,1", "--digits", "100000"], 1),
        (&["binet", "--coeffs", "1,1,-1,-1"], 1),
        (&["lab", "--experiment", "slowdown", "--max-s", "2"], 0),
        (&["lab", "--experiment", "slowdown", "--max-s", "3", "--budget", "20"], 3),
        (&["lab", "--experiment", "runtime", "--samples", "0"], 0),
        (&["lab", "--experiment", "runtime", "--min-degree", "2"], 1),
        (&["lab", "--experiment", "probe"], 1),
        (&["plot", "--csv", "/nonexistent/x.csv", "--out", "/nonexistent/x.svg"], 1),
        (&["frobnicate"], 1),
        (&["--help"], 0),
        (&["--version"], 0),
    ];
    for (args, expect) in cases {
        let (code, _, err) = run_cli(args);
        if code != *expect {
            return Err(format!("{args:?}: exit {code}, expected {expect} ({})", err.trim()));
        }
    }
    Ok(format!("{} invocations", cases.len()))
}

fn cli_output_stability() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = Vec::new();
    for i in 0..2 {
        let csv = dir.path().join(format!("run{i}.csv"));
        let svg = dir.path().join(format!("run{i}.svg"));
        let json = dir.path().join(format!("conv{i}.json"));
        let trace = dir.path().join(format!("trace{i}.txt"));
        let args = [
            "lab", "--polys", "2", "--samples", "40", "--max-degree", "4", "--seed", "7",
            "--out", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap(),
        ];
        if run_cli(&args).0 != 0 {
            return Err("lab run failed".into());
        }
        if run_cli(&["convert", "--coeffs", "0,0,1,1", "--out", json.to_str().unwrap()]).0 != 0 {
            return Err("convert failed".into());
        }
        let targs = ["zeroing", "--coeffs", "0,2,1", "--beta", "3,-2,-5", "--trace", "--out", trace.to_str().unwrap()];
        if run_cli(&targs).0 != 0 {
            return Err("zeroing failed".into());
        }
        let read = |p: &std::path::Path| std::fs::read(p).map_err(|e| e.to_string());
        files.push([read(&csv)?, read(&svg)?, read(&json)?, read(&trace)?]);
    }
    if files[0] != files[1] {
        return Err("outputs differ between identical invocations".into());
    }
    Ok("CSV, SVG, JSON and trace files identical".into())
}

/// Runs every check, returning `(name, result, seconds)`.
pub fn run_all() -> Vec<(&'static str, Result<String, String>, f64)> {
    all_checks()
        .into_iter()
        .map(|c| {
            let start = Instant::now();
            let r = (c.run)();
            (c.name, r, start.elapsed().as_secs_f64())
        })
        .collect()
}
