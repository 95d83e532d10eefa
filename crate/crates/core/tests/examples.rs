use bell_excess::bounds::{bounds_report, spectral_norm, CMatrix};
use bell_excess::catalog::{builtin, detect_regular_equivalent, load_file, MatrixKind};
use bell_excess::constructions::{
    fourier_square, gyni_tensor, is_hadamard, mquwm_check, paley_hadamard, sylvester, SignMatrix,
};
use bell_excess::format::{parse_game_matrix, parse_game_tensor, write_game_matrix, write_game_tensor};
use bell_excess::game::{apply_relabeling, game_matrix_from_tensor, tensor_from_game_matrix, GameTensor, Relabeling};
use bell_excess::lhv::{count_optimizers, lhv_value, LhvConfig};
use bell_excess::tightness::{collect_vertices, tightness_report};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

fn cfg() -> LhvConfig {
    LhvConfig::default()
}

fn value(h: &SignMatrix) -> i64 {
    lhv_value(&h.to_game(), &cfg()).unwrap().value.as_integer().unwrap().to_i64().unwrap()
}

#[test]
fn fourier_square_is_relabeled_gyni() {
    for q in 2..=5 {
        let fs = fourier_square(q).unwrap();
        // Probability form read off directly: q^2 where b = x and a = -y.
        let t = tensor_from_game_matrix(&fs).unwrap();
        let q2 = BigRational::from_integer(BigInt::from(q * q));
        for (a, b, x, y) in (0..q * q * q * q).map(|c| (c / (q * q * q), c / (q * q) % q, c / q % q, c % q)) {
            let want = if b == x && (a + y) % q == 0 { q2.clone() } else { BigRational::zero() };
            assert_eq!(t.get(a, b, x, y), &want, "q={q} at {a}{b}{x}{y}");
        }
        // GYNI with Alice's outcomes negated, scaled by q^2.
        let negate: Vec<usize> = (0..q).map(|a| (q - a) % q).collect();
        let r = Relabeling {
            alice_outputs: vec![negate; q],
            ..Relabeling::identity(q, q)
        };
        let g = apply_relabeling(&gyni_tensor(q).unwrap(), &r).unwrap();
        let scaled = GameTensor::new(q, q, g.coeffs().iter().map(|c| c * &q2).collect()).unwrap();
        let m = game_matrix_from_tensor(&scaled);
        let (a, b) = (m.to_c64_vec(), fs.to_c64_vec());
        assert!(a.iter().zip(&b).all(|(u, v)| (u - v).norm() < 1e-9), "q={q}");
        let c = lhv_value(&game_matrix_from_tensor(&gyni_tensor(q).unwrap()), &cfg()).unwrap().value;
        assert!((c.to_f64() - q as f64).abs() < 1e-9);
    }
}

#[test]
fn worked_values() {
    assert_eq!(value(&sylvester(1)), 2);
    assert_eq!(value(&sylvester(2)), 8);
    assert_eq!(value(&sylvester(3)), 20);
    assert_eq!(value(&sylvester(4)), 64);
    assert_eq!(value(&builtin(12, 0).unwrap().matrix), 36);
    // CHSH: four correlation points, each reached by two strategy pairs.
    let plain = LhvConfig {
        fast_path: false,
        ..cfg()
    };
    assert_eq!(count_optimizers(&sylvester(1).to_game(), &plain).unwrap(), 8);
    assert_eq!(collect_vertices(&sylvester(1).to_core(), &cfg()).unwrap().len(), 4);
}

#[test]
fn paley_order_20_is_tight() {
    let h = paley_hadamard(19).unwrap();
    assert!(is_hadamard(&h));
    let r = tightness_report(&h.to_core(), &cfg()).unwrap();
    assert_eq!((r.vertex_count, r.affine_rank, r.tight), (20064, 399, true));
    assert!(!r.regular_equivalent);
}

#[test]
fn small_table_rows() {
    let row = |o, i| {
        let r = tightness_report(&builtin(o, i).unwrap().matrix.to_core(), &cfg()).unwrap();
        (r.vertex_count, r.affine_rank, r.tight)
    };
    assert_eq!(row(8, 0), (64, 63, true));
    assert_eq!(row(12, 0), (2640, 143, true));
    assert_eq!(row(16, 1), (192, 81, false));
    assert_eq!(row(16, 2), (64, 45, false));
}

#[test]
fn sylvester_16_counts() {
    // 448 correlation points, 896 strategy pairs.
    let r = tightness_report(&sylvester(4).to_core(), &cfg()).unwrap();
    assert_eq!((r.vertex_count, r.strategy_pairs, r.affine_rank), (448, 896, 105));
    assert!(r.regular_equivalent && !r.tight);
}

#[test]
fn regular_classes_at_order_16() {
    let flags: Vec<bool> = (0..5)
        .map(|i| detect_regular_equivalent(&builtin(16, i).unwrap().matrix, &cfg()).unwrap())
        .collect();
    assert_eq!(flags, [true, true, true, false, false]);
}

#[test]
fn spectral_bound_met_by_regular_h4() {
    let h = builtin(4, 0).unwrap().matrix;
    let b = bounds_report(&CMatrix::from(&h), true, false, 1e-9);
    assert!((b.sigma_bound - 8.0).abs() < 1e-9);
    assert_eq!(b.best_upper.unwrap().to_f64(), 8.0);
    assert_eq!(b.best_lower.unwrap().to_f64(), 6.0);
    assert!((4.0 * spectral_norm(&CMatrix::from(&h)) - value(&h) as f64).abs() < 1e-9);
}

#[test]
fn mquwm_counterexamples() {
    let h2 = sylvester(1);
    assert!(mquwm_check(&h2, &h2, 4).is_ok());
    assert!(mquwm_check(&h2, &h2, 1).is_err());
    let w = SignMatrix::from_rows(&[vec![1, 0], vec![0, 1]]).unwrap();
    assert!(mquwm_check(&h2, &w, 2).is_err());
}

#[test]
fn files_roundtrip() {
    let dir = std::env::temp_dir().join(format!("bell-excess-examples-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let g = fourier_square(4).unwrap();
    assert_eq!(parse_game_matrix(&write_game_matrix(&g)).unwrap(), g);
    let t = gyni_tensor(3).unwrap();
    assert_eq!(parse_game_tensor(&write_game_tensor(&t)).unwrap(), t);
    let path = dir.join("h.txt");
    std::fs::write(&path, format!("{}\n{}", sylvester(2).to_text(), sylvester(1).to_text())).unwrap();
    let entries = load_file(&path, MatrixKind::Hadamard).unwrap();
    assert_eq!(entries.iter().map(|e| e.order).collect::<Vec<_>>(), [4, 2]);
    std::fs::remove_dir_all(&dir).unwrap();
}
