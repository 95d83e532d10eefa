//! Acceptance criteria, one line each. Criteria 1 and 7 are known to fail
//! (see the README); the run exits nonzero if any other outcome changes.

use std::process::{Command, ExitCode};

use bell_excess::bounds::{
    best_bounds, circulant3_observables, hs18_excess, jkks_excess, nu, nu_saturated, numerical_radius,
    quantum_witness, spectral_norm, CMatrix,
};
use bell_excess::catalog::{builtin, order8_pairings, weighing_set, Party};
use bell_excess::constructions::{circulant, fourier_square, mquwm_check, sylvester, MquwmParams, SignMatrix};
use bell_excess::game::{constant_row_sum, game_matrix_from_tensor, GameMatrix, GameTensor};
use bell_excess::lhv::{
    correlation_lhv, enumerate_optimizers, lhv_value, normalize_to_allplus, tensor_game, LhvConfig, Strategy,
};
use bell_excess::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXPECTED_FAILURES: [usize; 2] = [1, 7];

type Outcome = Result<String, String>;

fn check(cond: bool, what: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what)
    }
}

fn int(r: &Real) -> Option<i64> {
    r.as_integer().and_then(|b| i64::try_from(b).ok())
}

fn cfg() -> LhvConfig {
    LhvConfig::default()
}

fn lhv(m: &GameMatrix) -> Real {
    lhv_value(m, &cfg()).expect("solver").value
}

fn random_tensor(rng: &mut ChaCha8Rng, m: usize, q: usize) -> GameTensor {
    let coeffs: Vec<i64> = (0..q * q * m * m).map(|_| rng.gen_range(-3..=3)).collect();
    GameTensor::from_ints(m, q, &coeffs).unwrap()
}

fn normalized(m: &GameMatrix) -> (Real, GameMatrix) {
    let r = lhv_value(m, &cfg()).unwrap();
    (r.value, normalize_to_allplus(m, &r.witness, &cfg()).unwrap())
}

fn criterion1() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_bell-excess"))
        .args(["table1", "--format", "json"])
        .output()
        .map_err(|e| e.to_string())?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let rows = v["rows"].as_array().ok_or("no rows")?;
    let vertices: Vec<u64> = rows.iter().map(|r| r["vertices"].as_u64().unwrap()).collect();
    let ranks: Vec<u64> = rows.iter().map(|r| r["affine_rank"].as_u64().unwrap()).collect();
    let tight: Vec<bool> = rows.iter().map(|r| r["tight"].as_bool().unwrap()).collect();
    let want_v = [4, 4, 64, 2640, 896, 192, 64, 21504, 21504, 20064, 20064, 20064];
    let want_r = [3, 3, 63, 143, 105, 81, 45, 255, 255, 399, 399, 399];
    let want_t = [true, false, true, true, false, false, false, true, true, true, true, true];
    let summary = format!("vertices {vertices:?}, ranks {ranks:?}, exit {:?}", out.status.code());
    check(rows.len() == 12, format!("{} rows", rows.len()))?;
    check(ranks == want_r, format!("ranks differ: {summary}"))?;
    check(tight == want_t, format!("verdicts differ: {summary}"))?;
    check(vertices == want_v, format!("vertex counts differ: {summary}"))?;
    check(out.status.code() == Some(0), format!("table1 exit code: {summary}"))?;
    Ok(summary)
}

fn criterion2() -> Outcome {
    let chsh = lhv(&sylvester(1).to_game());
    check(int(&chsh) == Some(2), format!("CHSH {chsh}"))?;
    let c3 = lhv(&circulant(&[0, -1, 1]).unwrap().to_game());
    check(int(&c3) == Some(4), format!("circ(0,-1,1) {c3}"))?;
    let h4 = circulant(&[-1, 1, 1, 1]).unwrap();
    let c4 = lhv(&h4.to_game());
    let spectral = 4.0 * spectral_norm(&CMatrix::from(&h4));
    check(int(&c4) == Some(8), format!("circ(-1,1,1,1) {c4}"))?;
    check((spectral - 8.0).abs() < 1e-9, format!("n sigma = {spectral}"))?;
    let (a, b) = circulant3_observables();
    let w = quantum_witness(&circulant(&[0, -1, 1]).unwrap().to_game(), &a, &b).map_err(|e| e.to_string())?;
    check((w - 27f64.sqrt()).abs() < 1e-8, format!("witness {w}"))?;
    Ok(format!("C = 2, 4, 8; n sigma = {spectral:.12}; witness = {w:.12}"))
}

fn criterion3() -> Outcome {
    let mut parts = Vec::new();
    for q in 2..=5usize {
        let m = fourier_square(q).map_err(|e| e.to_string())?;
        let q3 = (q * q * q) as f64;
        let (c, norm) = normalized(&m);
        if q == 2 || q == 4 {
            check(int(&c) == Some(q3 as i64), format!("q={q}: C = {c}"))?;
        } else {
            check((c.to_f64() - q3).abs() < 1e-6 * q3, format!("q={q}: C = {c}"))?;
        }
        let tol = 1e-9;
        let gamma = constant_row_sum(&norm, tol).ok_or(format!("q={q}: normalized rows not constant"))?;
        let g = gamma.real_part(tol).ok_or(format!("q={q}: complex row sum"))?.to_f64();
        check((g - q as f64).abs() <= tol, format!("q={q}: gamma = {g}"))?;
        let cm = CMatrix::from(&norm);
        let n = cm.order() as f64;
        let bound = n.sqrt() * nu(&cm);
        check(nu_saturated(&cm, tol).saturated, format!("q={q}: not saturated"))?;
        check((bound - c.to_f64()).abs() <= tol * q3, format!("q={q}: sqrt(n) nu = {bound}"))?;
        parts.push(format!("q={q}: C={:.9}", c.to_f64()));
    }
    Ok(parts.join(", "))
}

fn criterion4() -> Outcome {
    let h8 = int(&lhv(&sylvester(3).to_game()));
    let (order, jk) = jkks_excess(2).map_err(|e| e.to_string())?;
    check(order == 8 && h8 == Some(jk as i64) && jk == 20, format!("H8 {h8:?}, jkks {jk}"))?;
    let h12 = int(&lhv(&builtin(12, 0).map_err(|e| e.to_string())?.matrix.to_game()));
    let hs11 = hs18_excess(11).map_err(|e| e.to_string())?;
    check(hs11.order == 12 && h12 == Some(hs11.excess as i64) && h12 == Some(36), format!("H12 {h12:?}, formula {}", hs11.excess))?;
    let h4 = int(&lhv(&circulant(&[-1, 1, 1, 1]).unwrap().to_game()));
    let hs3 = hs18_excess(3).map_err(|e| e.to_string())?.excess;
    let best = best_bounds(4).map_err(|e| e.to_string())?.1;
    check(h4 == Some(8) && hs3 == 8 && int(&best) == Some(8), format!("H4 {h4:?}, formula {hs3}, best {best}"))?;
    Ok("20 = 20, 36 = 36, 8 = 8 = 8".into())
}

fn criterion5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = f64::INFINITY;
    for i in 0..200 {
        let q = 2 + i % 2;
        let m = rng.gen_range(1..=4);
        let (c, norm) = normalized(&game_matrix_from_tensor(&random_tensor(&mut rng, m, q)));
        let c = c.to_f64();
        let cm = CMatrix::from(&norm);
        let n = cm.order() as f64;
        let tol = if q == 2 { 1e-9 } else { 1e-7 };
        let nu_b = n.sqrt() * nu(&cm);
        let sigma_b = n * spectral_norm(&cm);
        let r_b = n * numerical_radius(&cm, 1e-9);
        for (lhs, rhs, name) in [(c, nu_b, "C <= sqrt(n) nu"), (nu_b, sigma_b, "sqrt(n) nu <= n sigma"), (c, r_b, "C <= n r")] {
            let slack = rhs - lhs;
            worst = worst.min(slack);
            check(slack >= -tol, format!("instance {i} (m={m}, q={q}): {name} fails by {slack}"))?;
        }
    }
    // Saturation against constant row sums, both ways.
    let cores: Vec<SignMatrix> = vec![
        circulant(&[-1, 1, 1, 1]).unwrap(),
        builtin(16, 0).unwrap().matrix,
        builtin(16, 1).unwrap().matrix,
        sylvester(1),
        sylvester(3),
        builtin(12, 0).unwrap().matrix,
    ];
    let mut seen = [0usize; 2];
    let mut saturation = |c: f64, cm: &CMatrix, constant: bool, what: &str| -> Result<(), String> {
        let n = cm.order() as f64;
        let attained = (n.sqrt() * nu(cm) - c).abs() <= 1e-9 * (1.0 + c);
        seen[usize::from(constant)] += 1;
        check(attained == constant, format!("{what}: attained {attained}, constant rows {constant}"))?;
        check(nu_saturated(cm, 1e-9).saturated == constant, format!("{what}: saturation flag"))
    };
    for h in &cores {
        let c = correlation_lhv(&h.to_core(), &cfg()).unwrap().value.to_f64();
        let sums = h.row_sums();
        saturation(c, &CMatrix::from(h), sums.iter().all(|&s| s == sums[0]), &format!("core of order {}", h.order()))?;
    }
    for q in 2..=5 {
        let (c, norm) = normalized(&fourier_square(q).unwrap());
        saturation(c.to_f64(), &CMatrix::from(&norm), constant_row_sum(&norm, 1e-9).is_some(), &format!("fourier q={q}"))?;
    }
    check(seen[0] > 0 && seen[1] > 0, "both directions exercised".into())?;
    Ok(format!("200 games, smallest slack {worst:.3e}; saturation {} constant / {} not", seen[1], seen[0]))
}

fn digits(mut i: usize, len: usize, q: usize) -> Vec<usize> {
    (0..len)
        .map(|_| {
            let d = i % q;
            i /= q;
            d
        })
        .collect()
}

fn criterion6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let plain = LhvConfig {
        fast_path: false,
        ..cfg()
    };
    for i in 0..100 {
        let q = 2 + i % 2;
        let m = rng.gen_range(1..=3);
        let t = random_tensor(&mut rng, m, q);
        // Direct sum over the probability-form coefficients; the strategy
        // exponent `e` answers outcome `-e`.
        let coeff = |a: usize, b: usize, x: usize, y: usize| -> i64 {
            let v = t.get(a, b, x, y);
            i64::try_from(v.to_integer()).unwrap()
        };
        let total = q.pow(2 * m as u32);
        let mut best = i64::MIN;
        let mut opt = Vec::new();
        for s in 0..total {
            let d = digits(s, 2 * m, q);
            let flip = |e: usize| (q - e) % q;
            let v: i64 = (0..m)
                .flat_map(|x| (0..m).map(move |y| (x, y)))
                .map(|(x, y)| coeff(flip(d[x]), flip(d[m + y]), x, y))
                .sum();
            if v > best {
                best = v;
                opt.clear();
            }
            if v == best {
                opt.push(Strategy::new(q, &d[..m], &d[m..]).unwrap());
            }
        }
        opt.sort();
        let game = game_matrix_from_tensor(&t);
        for c in [&cfg(), &plain] {
            let value = lhv_value(&game, c).map_err(|e| e.to_string())?.value;
            let ok = match int(&value) {
                Some(v) => v == best,
                None => q != 2 && (value.to_f64() - best as f64).abs() < 1e-9,
            };
            check(ok, format!("instance {i} (m={m}, q={q}): solver {value}, brute force {best}"))?;
            let mut got = enumerate_optimizers(&game, c).map_err(|e| e.to_string())?;
            got.sort();
            check(got == opt, format!("instance {i} (m={m}, q={q}): optimizer sets differ"))?;
        }
    }
    Ok("100 instances, values and optimizer sets equal".into())
}

fn criterion7() -> Outcome {
    let chsh = sylvester(1).to_game();
    let prod = lhv(&tensor_game(&chsh, &chsh).map_err(|e| e.to_string())?);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bad = 0;
    for _ in 0..50 {
        let pair: Vec<(Real, GameMatrix)> = (0..2)
            .map(|_| {
                let m = rng.gen_range(1..=2);
                normalized(&game_matrix_from_tensor(&random_tensor(&mut rng, m, 2)))
            })
            .collect();
        let c12 = lhv(&tensor_game(&pair[0].1, &pair[1].1).map_err(|e| e.to_string())?);
        if int(&c12) != int(&pair[0].0).zip(int(&pair[1].0)).map(|(a, b)| a * b) {
            bad += 1;
        }
    }
    let summary = format!("CHSH x CHSH gives {prod}; {bad}/50 random pairs not multiplicative");
    check(int(&prod) == Some(4) && bad == 0, summary.clone())?;
    Ok(summary)
}

fn all_pairs(xs: &[SignMatrix], ys: Option<&[SignMatrix]>, a: u64) -> Result<Vec<MquwmParams>, String> {
    let pairs: Vec<(&SignMatrix, &SignMatrix)> = match ys {
        Some(ys) => xs.iter().flat_map(|x| ys.iter().map(move |y| (x, y))).collect(),
        None => (0..xs.len()).flat_map(|i| (i + 1..xs.len()).map(move |j| (&xs[i], &xs[j]))).collect(),
    };
    pairs.into_iter().map(|(x, y)| mquwm_check(x, y, a).map_err(|e| e.to_string())).collect()
}

fn criterion8() -> Outcome {
    let set = |n, p| weighing_set(n, p).map_err(|e| e.to_string());
    let (a2, b2) = (set(2, Party::Alice)?, set(2, Party::Bob)?);
    let want2 = MquwmParams { m: 2, k: 2, l: 1, a: 4 };
    for ps in [all_pairs(&a2, None, 4)?, all_pairs(&b2, None, 4)?, all_pairs(&a2, Some(&b2), 4)?] {
        check(ps.iter().all(|p| *p == want2), format!("order 2: {ps:?}"))?;
    }
    let (a8, b8) = (set(8, Party::Alice)?, set(8, Party::Bob)?);
    check(a8.len() == 8 && b8.len() == 8, "order 8 sets must hold 8 matrices".into())?;
    let want8 = MquwmParams { m: 8, k: 8, l: 4, a: 16 };
    for s in [&a8, &b8] {
        let ps = all_pairs(s, None, 16)?;
        check(ps.len() == 28 && ps.iter().all(|p| *p == want8), format!("order 8: {ps:?}"))?;
        check(all_pairs(s, None, 4).is_err(), "order 8 accepted with a = 4".into())?;
    }
    // Each pairing is an optimal strategy of the Sylvester H8 core.
    let h = sylvester(3);
    let pairings = order8_pairings();
    check(pairings.len() == 64, format!("{} pairings", pairings.len()))?;
    let mut vertices = std::collections::HashSet::new();
    for [i, j, k, l] in pairings {
        let a = a8[j - 1].row(i - 1);
        let b = b8[l - 1].row(k - 1);
        let cols: Vec<i64> = (0..8)
            .map(|y| (0..8).map(|x| (a[x] * h.get(x, y)) as i64).sum())
            .collect();
        let value: i64 = cols.iter().zip(b).map(|(c, &s)| c * s as i64).sum();
        let best_response = cols.iter().zip(b).all(|(c, &s)| c * s as i64 == c.abs());
        check(value == 20 && best_response, format!("pairing ({i},{j},{k},{l}) gives {value}"))?;
        let mut v: Vec<i8> = (0..64).map(|e| a[e / 8] * b[e % 8]).collect();
        if v[0] < 0 {
            v.iter_mut().for_each(|s| *s = -*s);
        }
        vertices.insert(v);
    }
    check(vertices.len() == 64, format!("{} distinct vertices", vertices.len()))?;
    Ok("order 2 as (2,2,1,4); order 8 as (8,8,4,16), a = 4 rejected; 64 pairings optimal and distinct".into())
}

fn main() -> ExitCode {
    let criteria: [fn() -> Outcome; 8] = [
        criterion1, criterion2, criterion3, criterion4, criterion5, criterion6, criterion7, criterion8,
    ];
    let mut unexpected = Vec::new();
    for (i, f) in criteria.iter().enumerate() {
        let n = i + 1;
        let outcome = f();
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {n}: {tag}: {detail}");
        if outcome.is_err() != EXPECTED_FAILURES.contains(&n) {
            unexpected.push(n);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: outcomes as expected (known failures {EXPECTED_FAILURES:?})");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
