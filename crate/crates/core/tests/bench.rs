use wordproblem::bench::{curve_to_csv, fit_complexity, lower_bound_curve, rows_to_csv, run_bench, Bench, Family, Model};
use wordproblem::{builtin, word_engine};

fn planted(f: impl Fn(f64) -> f64, top: u32) -> Vec<(usize, u64)> {
    (4..=top).map(|k| 1usize << k).map(|n| (n, (3.7 * f(n as f64)).round() as u64)).collect()
}

#[test]
fn planted_constants_within_five_percent() {
    for model in Model::standard(3) {
        let rows = planted(|n| model.eval(n), 20);
        let fit = fit_complexity(&rows, &Model::standard(3)).unwrap();
        assert_eq!(fit.winner, model);
        assert!((fit.constant - 3.7).abs() / 3.7 < 0.05, "{model}: {}", fit.constant);
    }
}

#[test]
fn bench_output_is_deterministic() {
    for family in [Family::BasilicaAb, Family::Z4Balanced, Family::HeisBalanced] {
        let a = rows_to_csv(&run_bench(family, 4..=8, 3).unwrap());
        let b = rows_to_csv(&run_bench(family, 4..=8, 3).unwrap());
        assert_eq!(a, b, "{family}");
        assert!(a.starts_with("m,n,stages,steps\n"));
        assert_eq!(a.lines().count(), 6);
    }
}

#[test]
fn basilica_rows_reject_and_grow() {
    let rows = Bench::new(Family::BasilicaAb).unwrap().run(4..=10, 1).unwrap();
    assert!(rows.iter().all(|r| !r.accepted));
    assert!(rows.windows(2).all(|p| p[0].steps < p[1].steps && p[0].n * 2 == p[1].n));
}

#[test]
fn family_names_round_trip() {
    for f in [Family::BasilicaAb, Family::Poly1Baba, Family::GrigorchukAb, Family::Z4Balanced, Family::HeisBalanced] {
        assert_eq!(f.name().parse::<Family>().unwrap(), f);
    }
    assert!("nope".parse::<Family>().is_err());
    for m in Model::standard(4) {
        assert_eq!(m.to_string().parse::<Model>().unwrap(), m);
    }
}

#[test]
fn lower_bound_curve_is_monotone() {
    let g = builtin::grigorchuk().symmetrize();
    let table = word_engine::growth(&g, 6).unwrap();
    let curve = lower_bound_curve(&table, 1..=10);
    assert_eq!(curve.len(), 6);
    assert!(curve.windows(2).all(|p| p[0].1 < p[1].1));
    assert!(curve_to_csv(&curve).starts_with("n,n_log_gamma\n1,2.321928\n"));
}
