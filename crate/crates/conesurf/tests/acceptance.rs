//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line. Run with `cargo test -p conesurf --test acceptance -- --nocapture`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::panic::{catch_unwind, resume_unwind, UnwindSafe};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use conesurf::builders::{self, BuildParams, BuiltModel, ModelBuilder};
use conesurf::cohomology::{
    eval_word, h1_dimension, h1_representative, Character, CocycleVector, Presentation,
};
use conesurf::develop::{
    holonomy_of_loop, holonomy_with_base, loop_concat, reverse_path, vertex_star_loop, DualLoop,
    DualStep, SpanningTree,
};
use conesurf::geom::{Sim2, SE2};
use conesurf::rep::{
    classify_representation, classify_xi, common_fixed_point, conjugate_representation,
    dm_condition, extract_representation, extract_representation_based, rescale_representation,
    validate_marking, xi_distance, BetaVector, Marking, RepError,
};
use conesurf::surface::SurfaceComplex;

fn criterion<F: FnOnce() + UnwindSafe>(number: u32, name: &str, body: F) {
    let outcome = catch_unwind(body);
    match &outcome {
        Ok(()) => println!("criterion {number:02} {name}: PASS"),
        Err(_) => println!("criterion {number:02} {name}: FAIL"),
    }
    if let Err(e) = outcome {
        resume_unwind(e);
    }
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Every builder model, by name.
fn all_models() -> Vec<(String, BuiltModel)> {
    let mut out = Vec::new();
    out.push((
        "tetrahedron".to_string(),
        builders::Tetrahedron.build(&BuildParams::default()).unwrap(),
    ));
    out.push((
        "cube".to_string(),
        builders::Cube.build(&BuildParams::default()).unwrap(),
    ));
    out.push((
        "flat_torus".to_string(),
        builders::FlatTorus
            .build(&BuildParams {
                periods: Some((c64(1.0, 0.0), c64(0.0, 1.0))),
                ..Default::default()
            })
            .unwrap(),
    ));
    out.push(("pillowcase".to_string(), {
        let square = vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 1.0), c64(0.0, 1.0)];
        builders::DoublePolygon
            .build(&BuildParams {
                polygon: Some(square),
                ..Default::default()
            })
            .unwrap()
    }));
    for k in 3..=8 {
        out.push((
            format!("double_{k}gon"),
            builders::DoublePolygon
                .build(&BuildParams {
                    polygon: Some(builders::regular_polygon(k)),
                    ..Default::default()
                })
                .unwrap(),
        ));
    }
    out
}

/// A random admissible loop: a random walk closed up through the spanning
/// tree.
fn random_loop(
    s: &SurfaceComplex,
    tree: &SpanningTree,
    base: &str,
    rng: &mut StdRng,
    len: usize,
) -> DualLoop {
    let mut steps = Vec::new();
    let mut current = base.to_string();
    for _ in 0..len {
        let e: u8 = rng.gen_range(0..3);
        let partner = s.glued_partner(&current, e).unwrap();
        steps.push(DualStep::new(current.clone(), e));
        current = partner.triangle;
    }
    let back = reverse_path(s, &tree.path_to(&current).unwrap()).unwrap();
    steps.extend(back);
    DualLoop::new(base, steps)
}

fn marking_loops(m: &Marking) -> Vec<DualLoop> {
    m.a_loops
        .iter()
        .chain(&m.b_loops)
        .chain(&m.c_loops)
        .cloned()
        .collect()
}

/// Finds the refined-complex vertex class corresponding to an old class,
/// preferring a member on an untouched triangle and falling back to corner
/// coordinates on the pieces of a split one.
fn map_class_to_refined(
    s: &SurfaceComplex,
    refined: &SurfaceComplex,
    record: &conesurf::surface::SubdivisionRecord,
    class_id: &str,
) -> String {
    let class = s.vertex_class(class_id).unwrap();
    for (tid, corner) in &class.members {
        if record.pieces_of(tid).is_none() {
            return refined.class_of_corner(tid, *corner).unwrap().id.clone();
        }
    }
    let (tid, corner) = &class.members[0];
    let z = s.chart(tid).unwrap().corners[*corner as usize];
    let (a, b) = record.pieces_of(tid).unwrap();
    for pid in [a, b] {
        let chart = refined.chart(pid).unwrap();
        for k in 0..3u8 {
            if (chart.corners[k as usize] - z).norm() <= 1e-12 * (1.0 + z.norm()) {
                return refined.class_of_corner(pid, k).unwrap().id.clone();
            }
        }
    }
    panic!("old vertex {class_id} not found in the refined complex");
}

#[test]
fn criterion_01_gauss_bonnet() {
    criterion(1, "gauss-bonnet", || {
        for (name, model) in all_models() {
            let residual = model.surface.gauss_bonnet_residual();
            assert!(
                residual.abs() <= 1e-9,
                "{name}: |chi + sum(beta)| = {residual}"
            );
        }
    });
}

#[test]
fn criterion_02_cone_point_holonomy() {
    criterion(2, "cone-point holonomy", || {
        for (name, model) in all_models() {
            let s = &model.surface;
            for class in s.vertex_classes() {
                let theta = s.cone_angle(class);
                let beta = s.singularity_order(class);
                let (start, _) = class.members[0].clone();
                let start_corner = class
                    .members
                    .iter()
                    .filter(|(t, _)| *t == start)
                    .map(|&(_, c)| c)
                    .min()
                    .unwrap();
                let star = vertex_star_loop(s, &class.id, &start).unwrap();
                let h = holonomy_of_loop(s, &star).unwrap();
                let expected = Complex64::from_polar(1.0, theta);
                assert!(
                    (h.u() - expected).norm() <= 1e-9,
                    "{name} {}: rotation angle off by {}",
                    class.id,
                    (h.u() - expected).norm()
                );
                if (beta - beta.round()).abs() > 1e-9 {
                    let fp = h.fixed_point(1e-9).unwrap();
                    let placed = s.chart(&start).unwrap().corners[start_corner as usize];
                    let bound = 1e-9 * s.mean_incident_edge_length(class);
                    assert!(
                        (fp - placed).norm() <= bound,
                        "{name} {}: fixed point off by {}",
                        class.id,
                        (fp - placed).norm()
                    );
                }
            }
        }
    });
}

#[test]
fn criterion_03_torus_holonomy() {
    criterion(3, "torus holonomy", || {
        let model = builders::FlatTorus
            .build(&BuildParams {
                periods: Some((c64(1.0, 0.0), c64(0.0, 1.0))),
                ..Default::default()
            })
            .unwrap();
        let s = &model.surface;
        let (a, b) = (&model.loops["a"], &model.loops["b"]);
        let ha = holonomy_of_loop(s, a).unwrap();
        let hb = holonomy_of_loop(s, b).unwrap();
        assert!(ha.dist(&SE2::translation(c64(1.0, 0.0))) <= 1e-12);
        assert!(hb.dist(&SE2::translation(c64(0.0, -1.0))) <= 1e-12);
        let hab = holonomy_of_loop(s, &loop_concat(a, b).unwrap()).unwrap();
        let hba = holonomy_of_loop(s, &loop_concat(b, a).unwrap()).unwrap();
        assert!(hab.dist(&hba) <= 1e-12);
    });
}

#[test]
fn criterion_04_homomorphism_and_conjugacy() {
    criterion(4, "homomorphism and conjugacy", || {
        let mut rng = StdRng::seed_from_u64(40);
        for (name, model) in all_models() {
            let s = &model.surface;
            let base = s.charts()[0].id.clone();
            let tree = SpanningTree::new(s, &base).unwrap();
            for _ in 0..100 {
                let len1 = rng.gen_range(0..12);
                let len2 = rng.gen_range(0..12);
                let l1 = random_loop(s, &tree, &base, &mut rng, len1);
                let l2 = random_loop(s, &tree, &base, &mut rng, len2);
                let h1 = holonomy_of_loop(s, &l1).unwrap();
                let h2 = holonomy_of_loop(s, &l2).unwrap();
                let h12 = holonomy_of_loop(s, &loop_concat(&l1, &l2).unwrap()).unwrap();
                assert!(
                    h12.dist(&h1.compose(&h2)) <= 1e-9,
                    "{name}: homomorphism defect {}",
                    h12.dist(&h1.compose(&h2))
                );
            }
            let g = SE2::new(
                Complex64::from_polar(1.0, rng.gen_range(-3.0..3.0)),
                c64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
            );
            for _ in 0..20 {
                let len = rng.gen_range(0..12);
                let l = random_loop(s, &tree, &base, &mut rng, len);
                let h = holonomy_of_loop(s, &l).unwrap();
                let (hg, _) = holonomy_with_base(s, &l, g).unwrap();
                let conj = g.compose(&h).compose(&g.inverse());
                assert!(hg.dist(&conj) <= 1e-9, "{name}: conjugacy defect");
            }
        }
    });
}

#[test]
fn criterion_05_subdivision_invariance() {
    criterion(5, "subdivision invariance", || {
        let mut rng = StdRng::seed_from_u64(50);
        for (name, model) in all_models() {
            let s = &model.surface;
            let gluings = s.gluings();
            let pick = &gluings[rng.gen_range(0..gluings.len())];
            let t = rng.gen_range(0.25..0.75);
            let (refined, record) = s.hinge_subdivide(&pick.left, t).unwrap();

            assert!((refined.total_area() - s.total_area()).abs() <= 1e-12 * (1.0 + s.total_area()));
            assert_eq!(refined.euler_characteristic(), s.euler_characteristic());
            let new_class = refined.vertex_class(record.new_vertex_class()).unwrap();
            assert!((refined.cone_angle(new_class) - 2.0 * PI).abs() <= 1e-9);
            // all old cone angles survive
            for class in s.vertex_classes() {
                let theta_old = s.cone_angle(class);
                let new_id = map_class_to_refined(s, &refined, &record, &class.id);
                let theta_new = refined.cone_angle(refined.vertex_class(&new_id).unwrap());
                assert!(
                    (theta_new - theta_old).abs() <= 1e-9,
                    "{name}: cone angle drifted by {}",
                    (theta_new - theta_old).abs()
                );
            }
            // remapped loops keep their holonomy
            let mut loops: Vec<DualLoop> = model.loops.values().cloned().collect();
            if let Some(m) = &model.marking {
                loops.extend(marking_loops(m));
            }
            for l in &loops {
                let before = holonomy_of_loop(s, l).unwrap();
                let remapped = record.remap_loop(l).unwrap();
                let after = holonomy_of_loop(&refined, &remapped).unwrap();
                assert!(
                    before.dist(&after) <= 1e-9,
                    "{name}: holonomy changed by {} after remap",
                    before.dist(&after)
                );
            }
        }
    });
}

#[test]
fn criterion_06_cohomology_dimensions() {
    criterion(6, "cohomology dimensions", || {
        let mut rng = StdRng::seed_from_u64(60);
        for s in 2..=8usize {
            let p = Presentation::free(s);
            for trial in 0..20 {
                let rho = if trial == 0 {
                    Character::trivial(s)
                } else {
                    Character::new(
                        (0..s)
                            .map(|_| Complex64::from_polar(1.0, rng.gen_range(-3.0..3.0)))
                            .collect(),
                    )
                };
                let expected = if rho.is_trivial(1e-9) { s } else { s - 1 };
                assert_eq!(h1_dimension(&p, &rho, 1e-9).unwrap(), expected);
            }
        }
        // commutator cocycle closed form against the SE(2)-product oracle
        for _ in 0..50 {
            let alpha = Complex64::from_polar(1.0, rng.gen_range(-3.0..3.0));
            let beta = Complex64::from_polar(1.0, rng.gen_range(-3.0..3.0));
            let x = c64(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let y = c64(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let rho = Character::new(vec![alpha, beta]);
            let sigma = CocycleVector::new(vec![x, y]);
            let word = [(0usize, 1i8), (1, 1), (0, -1), (1, -1)];
            let (_, value) = eval_word(&rho, &sigma, &word).unwrap();
            let closed_form = (c64(1.0, 0.0) - beta) * x - (c64(1.0, 0.0) - alpha) * y;
            assert!((value - closed_form).norm() <= 1e-12);
            let se2 = SE2::new(alpha, x)
                .compose(&SE2::new(beta, y))
                .compose(&SE2::new(alpha, x).inverse())
                .compose(&SE2::new(beta, y).inverse());
            assert!((value - se2.v()).norm() <= 1e-12);
        }
    });
}

#[test]
fn criterion_07_classification_invariance() {
    criterion(7, "classification invariance", || {
        let mut rng = StdRng::seed_from_u64(70);
        let marked: Vec<(String, BuiltModel)> = all_models()
            .into_iter()
            .filter(|(name, _)| name == "pillowcase" || name == "cube")
            .collect();
        for (name, model) in marked {
            let s = &model.surface;
            let m = model.marking.as_ref().unwrap();
            let beta = model.beta.as_ref().unwrap();
            let reference = classify_xi(s, m, beta).unwrap();
            let rep = extract_representation(s, m).unwrap();

            // character-angle law and relator identity
            let g = m.a_loops.len();
            for (j, &b) in beta.values().iter().enumerate() {
                let expected = Complex64::from_polar(1.0, 2.0 * PI * (b + 1.0));
                assert!((rep.rho.values()[2 * g + j] - expected).norm() <= 1e-9);
            }
            assert!(rep.relator_holonomy().is_identity(1e-9));

            // homothety of all chart coordinates
            for lambda in [0.1, 7.0] {
                let scaled = s.scaled(lambda).unwrap();
                let xi = classify_xi(&scaled, m, beta).unwrap();
                assert!(
                    xi_distance(&reference, &xi).unwrap() <= 1e-9,
                    "{name}: homothety {lambda} moved the class"
                );
            }

            // rescaling of the representation
            for lambda in [0.1, 1.0, 7.0] {
                let xi = classify_representation(
                    &rescale_representation(&rep, lambda).unwrap(),
                    beta,
                    s.tol(),
                )
                .unwrap();
                assert!(xi_distance(&reference, &xi).unwrap() <= 1e-9);
            }

            // 50 random similarity conjugations
            for _ in 0..50 {
                let sim = Sim2::new(
                    Complex64::from_polar(
                        rng.gen_range(0.2..4.0),
                        rng.gen_range(-3.0..3.0),
                    ),
                    c64(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
                );
                let xi = classify_representation(
                    &conjugate_representation(&rep, &sim),
                    beta,
                    s.tol(),
                )
                .unwrap();
                assert!(
                    xi_distance(&reference, &xi).unwrap() <= 1e-9,
                    "{name}: similarity conjugation moved the class"
                );
            }

            // base-placement change of the development
            let base_iso = SE2::new(
                Complex64::from_polar(1.0, rng.gen_range(-3.0..3.0)),
                c64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
            );
            let moved = extract_representation_based(s, m, base_iso).unwrap();
            let xi = classify_representation(&moved, beta, s.tol()).unwrap();
            assert!(xi_distance(&reference, &xi).unwrap() <= 1e-9);

            // hinge subdivision plus loop remap
            let gluings = s.gluings();
            let pick = &gluings[rng.gen_range(0..gluings.len())];
            let (refined, record) = s.hinge_subdivide(&pick.left, 0.37).unwrap();
            let remapped = Marking {
                base: record
                    .pieces_of(&m.base)
                    .map(|(a, _)| a.to_string())
                    .unwrap_or_else(|| m.base.clone()),
                a_loops: m.a_loops.iter().map(|l| record.remap_loop(l).unwrap()).collect(),
                b_loops: m.b_loops.iter().map(|l| record.remap_loop(l).unwrap()).collect(),
                c_loops: m.c_loops.iter().map(|l| record.remap_loop(l).unwrap()).collect(),
                punctures: m
                    .punctures
                    .iter()
                    .map(|p| map_class_to_refined(s, &refined, &record, p))
                    .collect(),
            };
            let xi = classify_xi(&refined, &remapped, beta).unwrap();
            assert!(
                xi_distance(&reference, &xi).unwrap() <= 1e-9,
                "{name}: subdivision moved the class"
            );
        }
    });
}

#[test]
fn criterion_08_regularity() {
    criterion(8, "regularity", || {
        for (name, model) in all_models() {
            let Some(m) = &model.marking else { continue };
            let s = &model.surface;
            let rep = extract_representation(s, m).unwrap();
            assert!(
                common_fixed_point(&rep, s.tol()).is_none(),
                "{name}: holonomy has a common fixed point"
            );
            let g = m.a_loops.len();
            let n = m.c_loops.len();
            let reduced = 2 * g + n - 1;
            let rho_g = Character::new(rep.rho.values()[..reduced].to_vec());
            let tau_g = CocycleVector::new(rep.tau.values()[..reduced].to_vec());
            let class = h1_representative(&rho_g, &tau_g);
            assert!(
                class.norm() > 1e-6 * tau_g.norm(),
                "{name}: projected class too small"
            );
        }

        // integer orders are rejected
        let torus = builders::FlatTorus
            .build(&BuildParams {
                periods: Some((c64(1.0, 0.0), c64(0.0, 1.0))),
                ..Default::default()
            })
            .unwrap();
        let s = &torus.surface;
        let class = s.vertex_classes()[0].id.clone();
        let star = vertex_star_loop(s, &class, "t0").unwrap();
        let m = Marking {
            base: "t0".into(),
            a_loops: vec![torus.loops["a"].clone()],
            b_loops: vec![torus.loops["b"].clone()],
            c_loops: vec![star],
            punctures: vec![class],
        };
        let beta = BetaVector::new(vec![0.0]).unwrap();
        assert!(matches!(
            classify_xi(s, &m, &beta),
            Err(RepError::IntegerOrder { index: 0, .. })
        ));
    });
}

#[test]
fn criterion_09_deligne_mostow_predicate() {
    criterion(9, "deligne-mostow predicate", || {
        let check = |values: Vec<f64>| dm_condition(&BetaVector::new(values).unwrap()).unwrap();
        assert!(check(vec![-0.5, -0.5, -0.5, -0.5]));
        assert!(check(vec![-0.25, -0.25, -0.75, -0.75]));
        assert!(check(vec![-1.0 / 3.0, -1.0 / 3.0, -2.0 / 3.0, -2.0 / 3.0]));
        assert!(!check(vec![-0.1, -0.1, -0.9, -0.9]));
        // the integrality window is exactly 1e−9
        let eps = 3e-9;
        assert!(!check(vec![
            -0.25 + eps,
            -0.25,
            -0.75,
            -0.75 - eps
        ]));
    });
}

#[test]
fn criterion_10_dimension_audit() {
    criterion(10, "dimension audit", || {
        let cases: Vec<(usize, usize, BuiltModel)> = vec![
            (0, 4, {
                let square =
                    vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 1.0), c64(0.0, 1.0)];
                builders::DoublePolygon
                    .build(&BuildParams {
                        polygon: Some(square),
                        ..Default::default()
                    })
                    .unwrap()
            }),
            (0, 5, {
                builders::DoublePolygon
                    .build(&BuildParams {
                        polygon: Some(builders::regular_polygon(5)),
                        ..Default::default()
                    })
                    .unwrap()
            }),
            (0, 8, builders::Cube.build(&BuildParams::default()).unwrap()),
        ];
        for (g, n, model) in cases {
            let m = model.marking.as_ref().unwrap();
            let beta = model.beta.as_ref().unwrap();
            let xi = classify_xi(&model.surface, m, beta).unwrap();
            assert_eq!(xi.genus, g);
            assert_eq!(xi.punctures, n);
            assert_eq!(xi.proj.len(), 2 * g + n - 2);
            let target_dim = 2 * g + n - 3;
            assert_eq!(xi.proj.len(), target_dim + 1);
            assert_eq!(xi.torus.len(), 2 * g);
        }
    });
}

#[test]
fn criterion_11_format_round_trip() {
    criterion(11, "format round-trip", || {
        for (name, model) in all_models() {
            let json = model.surface.to_json();
            let back = SurfaceComplex::parse(json.as_bytes()).unwrap();
            assert_eq!(json, back.to_json(), "{name}: surface round-trip");
            assert_eq!(
                model.surface.vertex_classes().len(),
                back.vertex_classes().len()
            );
            if let Some(m) = &model.marking {
                let mj = m.to_json();
                let mback = Marking::parse(mj.as_bytes()).unwrap();
                assert_eq!(mj, mback.to_json(), "{name}: marking round-trip");
                assert_eq!(*m, mback);
            }
            // validation still passes after the round trip
            if let (Some(m), Some(beta)) = (&model.marking, &model.beta) {
                let report = validate_marking(&back, m, beta).unwrap();
                assert!(report.passed());
            }
        }

        // repeated serialization is byte-stable
        let again: BTreeMap<String, String> = all_models()
            .into_iter()
            .map(|(name, model)| (name, model.surface.to_json()))
            .collect();
        for (name, model) in all_models() {
            assert_eq!(again[&name], model.surface.to_json());
        }
    });
}
