mod common;

use hdg_core::analysis::{error_q_l2, error_report, error_u_l2, jump_norm};
use hdg_core::hdg::solve;
use hdg_core::quadrature::triangle_rule;
use hdg_core::study::{
    compare_methods, emit_study, format_sci, run_single, run_study, OutputFormat, StudyConfig,
    CSV_HEADER,
};
use hdg_core::{observed_order, DiscretizationConfig, Mesh, MethodVariant, Problem};

use common::interpolant;

fn config(json: &str) -> StudyConfig {
    StudyConfig::from_json(json).unwrap()
}

#[test]
fn interpolation_error_satisfies_pythagoras() {
    let mesh = Mesh::generate_structured(4).unwrap();
    let cfg = DiscretizationConfig::new(1, 1);
    let p = Problem::SinSin;
    let sol = interpolant(&mesh, &cfg, &p);
    let rule = triangle_rule(16);
    let err = error_u_l2(&sol, |x| p.u(x), &mesh, &rule);
    let norm = error_u_l2(&sol, |_| 0.0, &mesh, &rule);
    // ||u||^2 on the unit square is 1/4
    assert!(err > 0.0);
    assert!((err * err + norm * norm - 0.25).abs() < 1e-12);
    // the discrete norm is just the scaled coefficient sum
    let direct: f64 = (0..mesh.num_cells())
        .map(|c| mesh.geometry(c).det * sol.u[c].iter().map(|v| v * v).sum::<f64>())
        .sum();
    assert!((direct.sqrt() - norm).abs() < 1e-12);
}

#[test]
fn compatible_polynomials_have_zero_error() {
    let mesh = Mesh::generate_structured(3).unwrap();
    for k in 0..=2 {
        let cfg = DiscretizationConfig::new(k, 0);
        let p: Problem = format!("patch:{}", k + 1).parse().unwrap();
        let sol = interpolant(&mesh, &cfg, &p);
        let r = error_report(3, &mesh, &cfg, &sol, &p);
        assert!(
            r.err_q <= 1e-12 && r.err_u <= 1e-11 && r.err_jump <= 1e-11,
            "k={k}: {r:?}"
        );
    }
}

#[test]
fn norms_scale_linearly() {
    let mesh = Mesh::generate_structured(3).unwrap();
    let cfg = DiscretizationConfig::new(1, 1);
    let sol = interpolant(&mesh, &cfg, &Problem::SinSin);
    let rule = triangle_rule(12);
    let mut scaled = sol.clone();
    let alpha = -2.5;
    for v in scaled
        .q
        .iter_mut()
        .chain(&mut scaled.u)
        .chain(&mut scaled.u_hat)
        .flatten()
    {
        *v *= alpha;
    }
    let nq = |s| error_q_l2(s, |_| [0.0, 0.0], &mesh, &rule);
    let nu = |s| error_u_l2(s, |_| 0.0, &mesh, &rule);
    assert!((nq(&scaled) - alpha.abs() * nq(&sol)).abs() <= 1e-12 * nq(&scaled));
    assert!((nu(&scaled) - alpha.abs() * nu(&sol)).abs() <= 1e-12 * nu(&scaled));
    let j = jump_norm(&sol, &mesh);
    assert!(j > 0.0);
    assert!((jump_norm(&scaled, &mesh) - alpha.abs() * j).abs() <= 1e-12 * j);
}

#[test]
fn quadrature_budget_is_sufficient() {
    let mesh = Mesh::generate_structured(10).unwrap();
    let p = Problem::SinSin;
    for (k, l) in [(0, 0), (1, 2), (2, 2)] {
        let cfg = DiscretizationConfig::new(k, l);
        let sol = solve(&mesh, &cfg, MethodVariant::Proj, |x| p.f(x), |x| p.g(x)).unwrap();
        let e = cfg.exactness();
        let (small, big) = (triangle_rule(e), triangle_rule(2 * e));
        let q = (
            error_q_l2(&sol, |x| p.q(x), &mesh, &small),
            error_q_l2(&sol, |x| p.q(x), &mesh, &big),
        );
        let u = (
            error_u_l2(&sol, |x| p.u(x), &mesh, &small),
            error_u_l2(&sol, |x| p.u(x), &mesh, &big),
        );
        assert!((q.0 - q.1).abs() <= 1e-3 * q.1);
        assert!((u.0 - u.1).abs() <= 1e-3 * u.1);
    }
}

fn order(
    p: &Problem,
    v: MethodVariant,
    k: usize,
    l: usize,
    n: usize,
    pick: fn(&hdg_core::ErrorReport) -> f64,
) -> f64 {
    let cfg = DiscretizationConfig::new(k, l);
    let a = run_single(p, v, &cfg, n).unwrap();
    let b = run_single(p, v, &cfg, 2 * n).unwrap();
    observed_order((a.h_global, pick(&a)), (b.h_global, pick(&b))).unwrap()
}

#[test]
fn observed_orders_near_reference_values() {
    let p = Problem::SinSin;
    let v = MethodVariant::Proj;
    assert!((order(&p, v, 2, 0, 20, |r| r.err_q) - 2.95).abs() <= 0.2);
    assert!((order(&p, v, 0, 1, 10, |r| r.err_u) - 2.01).abs() <= 0.2);
    assert!((order(&p, v, 1, 1, 40, |r| r.err_u) - 3.01).abs() <= 0.2);
    assert!((order(&p, v, 0, 2, 40, |r| r.err_jump) - 1.02).abs() <= 0.2);
}

#[test]
fn patch_study_omits_orders() {
    let recs = run_study(&config(
        r#"{"problem": "patch:1", "variants": ["proj"], "k": [0], "l": [0], "levels": [4]}"#,
    ))
    .unwrap();
    assert_eq!(recs.len(), 1);
    let r = &recs[0];
    assert!(r.report.err_q <= 1e-11 && r.report.err_u <= 1e-11 && r.report.err_jump <= 1e-11);
    assert!(r.order_q.is_none() && r.order_u.is_none() && r.order_jump.is_none());

    // exact at every level, so no orders even with refinement
    let recs = run_study(&config(
        r#"{"problem": "patch:2", "variants": ["proj"], "k": [1], "l": [1], "levels": [2, 4]}"#,
    ))
    .unwrap();
    assert!(recs
        .iter()
        .all(|r| r.order_q.is_none() && r.order_u.is_none()));
}

const SMALL: &str = r#"{"problem": "paper-sin", "variants": ["ls", "proj"], "k": [1], "l": [0, 1], "levels": [4, 8, 16, 32]}"#;

#[test]
fn csv_is_deterministic_and_round_trips() {
    let cfg = config(SMALL);
    let recs = run_study(&cfg).unwrap();
    let text = emit_study(&recs, OutputFormat::Csv).unwrap();
    assert_eq!(
        text,
        emit_study(&run_study(&cfg).unwrap(), OutputFormat::Csv).unwrap()
    );
    assert_eq!(text.lines().next(), Some(CSV_HEADER));

    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), recs.len());
    let close = |s: &str, v: f64| {
        let parsed: f64 = s.parse().unwrap();
        s == format_sci(v) && (parsed - v).abs() <= 5e-7 * v.abs()
    };
    for (row, rec) in rows.iter().zip(&recs) {
        assert_eq!(&row[0], rec.variant.to_string());
        assert_eq!(row[3].parse::<usize>().unwrap(), rec.n);
        assert!(close(&row[4], rec.report.err_q));
        assert!(close(&row[6], rec.report.err_u));
        assert!(close(&row[8], rec.report.err_jump));
        match rec.order_q {
            Some(o) => assert!(close(&row[5], o)),
            None => assert_eq!(&row[5], ""),
        }
    }
    // each 4-level series has three rows with orders
    for series in rows.chunks(4) {
        assert_eq!(series.iter().filter(|r| !r[5].is_empty()).count(), 3);
        assert!(series[0][5].is_empty());
    }
}

#[test]
fn ls_and_proj_coincide_without_enrichment() {
    let recs = run_study(&config(SMALL)).unwrap();
    let pick = |v: MethodVariant| -> Vec<String> {
        recs.iter()
            .filter(|r| r.variant == v && r.l == 0)
            .map(|r| {
                [r.report.err_q, r.report.err_u, r.report.err_jump]
                    .map(format_sci)
                    .join(",")
            })
            .collect()
    };
    assert_eq!(pick(MethodVariant::Ls), pick(MethodVariant::Proj));
}

#[test]
fn markdown_output_groups_by_variant_and_k() {
    let recs = run_study(&config(SMALL)).unwrap();
    let md = emit_study(&recs, OutputFormat::Md).unwrap();
    assert!(md.contains("LS") && md.contains("PROJ"));
    assert!(md.lines().filter(|l| l.starts_with('|')).count() >= recs.len());
}

#[test]
fn compare_needs_two_variants() {
    let single = config(
        r#"{"problem": "paper-sin", "variants": ["proj"], "k": [0], "l": [0], "levels": [2, 4]}"#,
    );
    assert!(compare_methods(&single).is_err());
    let cmp = compare_methods(&config(
        r#"{"problem": "paper-sin", "variants": ["std", "proj"], "k": [0], "l": [0], "levels": [8, 16]}"#,
    ))
    .unwrap();
    assert_eq!(cmp.rows.len(), 2);
    assert!(cmp.text.contains("PROJ"));
}

#[test]
fn invalid_study_configs_are_rejected() {
    for bad in [
        r#"{"problem": "nope", "variants": ["proj"], "k": [0], "l": [0]}"#,
        r#"{"problem": "paper-sin", "variants": [], "k": [0], "l": [0]}"#,
        r#"{"problem": "paper-sin", "variants": ["proj"], "k": [4], "l": [0]}"#,
        r#"{"problem": "paper-sin", "variants": ["proj"], "k": [0], "l": [0], "levels": [0]}"#,
        r#"{"problem": "paper-sin", "variants": ["proj"], "k": [0], "l": [0], "tau_coeff": -1.0}"#,
    ] {
        assert!(run_study(&config(bad)).is_err(), "{bad}");
    }
}
